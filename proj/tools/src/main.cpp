#include <iostream>

#include "bordepth_cli/commands.hpp"

int main(int argc, char** argv) { return bordepth::cli::run(argc, argv, std::cout, std::cerr); }
