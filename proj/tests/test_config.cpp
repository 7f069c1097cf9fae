#include <doctest.h>

#include <sstream>

#include "bordepth/config.hpp"
#include "bordepth/errors.hpp"

using namespace bordepth;

TEST_SUITE("config") {

TEST_CASE("parse and typed getters") {
    std::istringstream in(R"(# comment
methods = bor, f1 ; fk5
candidates.size = 50   # trailing comment
env.gamma=0.9
eval.shortlists = yes
data.dir = data
)");
    const auto c = Config::parse(in, "/base");
    CHECK(c.get_list("methods", {}) == std::vector<std::string>{"bor", "f1", "fk5"});
    CHECK(c.get_int("candidates.size", 0) == 50);
    CHECK(c.get_double("env.gamma", 0.0) == 0.9);
    CHECK(c.get_bool("eval.shortlists", false));
    CHECK(c.get_uint("jobs", 4) == 4);
    CHECK(c.get_path("data.dir") == std::filesystem::path("/base/data"));
    CHECK(c.get_path("nothing").empty());
    CHECK_THROWS_AS((void)c.get_int("env.gamma", 0), ConfigError);
}

TEST_CASE("syntax errors") {
    std::istringstream no_eq("just words\n");
    CHECK_THROWS_AS((void)Config::parse(no_eq), ConfigError);
    std::istringstream dup("a = 1\na = 2\n");
    CHECK_THROWS_AS((void)Config::parse(dup), ConfigError);
    Config c;
    CHECK_THROWS_AS(c.apply("novalue"), ConfigError);
    c.apply("a = 3");
    CHECK(c.get_int("a", 0) == 3);
}

TEST_CASE("write then parse is the identity") {
    Config c;
    c.set("z", "1");
    c.set("a.b", "x, y");
    std::stringstream buf;
    c.write(buf);
    CHECK(buf.str() == "a.b = x, y\nz = 1\n");
    CHECK(Config::parse(buf) == c);
}

TEST_CASE("unknown keys") {
    Config c;
    c.set("jobs", "2");
    c.set("sweep.jobs", "1;2");
    const std::vector<std::string_view> known{"jobs"};
    c.check_keys(known);
    c.set("jbos", "1");
    CHECK_THROWS_AS(c.check_keys(known), ConfigError);
}

TEST_CASE("sweep expansion") {
    Config c;
    c.set("seeds", "1");
    c.set("sweep.candidates.size", "20, 50, 100");
    c.set("sweep.methods", "bor,fk1 ; f1,fk1");
    const auto cells = expand_sweep(c);
    REQUIRE(cells.size() == 6);
    CHECK(cells[0].name == "candidates.size=20 methods=bor,fk1");
    CHECK(cells[1].name == "candidates.size=20 methods=f1,fk1");
    CHECK(cells[5].name == "candidates.size=100 methods=f1,fk1");
    CHECK(cells[5].config.get_int("candidates.size", 0) == 100);
    CHECK_FALSE(cells[0].config.has("sweep.methods"));
    CHECK(cells[0].config.get_string("seeds", "") == "1");

    Config plain;
    plain.set("seeds", "1");
    const auto one = expand_sweep(plain);
    REQUIRE(one.size() == 1);
    CHECK(one[0].name == "default");
    CHECK(one[0].config == plain);

    Config empty_axis;
    empty_axis.set("sweep.jobs", " ; ");
    CHECK_THROWS_AS((void)expand_sweep(empty_axis), ConfigError);
}

}
