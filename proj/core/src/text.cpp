#include "bordepth/text.hpp"

namespace bordepth {

namespace {

bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(unsigned char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_token_byte(unsigned char c) { return is_upper(c) || is_lower(c) || is_digit(c) || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (!is_token_byte(c)) {
            flush();
            continue;
        }
        if (is_upper(c) && i > 0) {
            const auto prev = static_cast<unsigned char>(text[i - 1]);
            const bool next_lower =
                i + 1 < text.size() && is_lower(static_cast<unsigned char>(text[i + 1]));
            // aB -> a|B, 1B -> 1|B, ABc -> A|Bc
            if (is_lower(prev) || is_digit(prev) || (is_upper(prev) && next_lower)) {
                flush();
            }
        }
        current.push_back(is_upper(c) ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    }
    flush();
    return tokens;
}

}  // namespace bordepth
