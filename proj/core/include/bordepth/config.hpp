#pragma once

// Run configuration: `key = value` lines, `#` starts a comment.
// `sweep.<key> = a ; b ; c` declares a grid axis over <key>. Without any ';' the
// levels are comma separated instead.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bordepth {

class Config {
  public:
    Config() = default;

    /// Relative paths in the config resolve against `base_dir`.
    [[nodiscard]] static Config parse(std::istream& in, std::filesystem::path base_dir = {});
    [[nodiscard]] static Config load(const std::filesystem::path& path);

    /// Applies a `key=value` override.
    void apply(std::string_view assignment);
    void set(std::string key, std::string value);
    void erase(std::string_view key);

    [[nodiscard]] bool has(std::string_view key) const;
    [[nodiscard]] std::optional<std::string> find(std::string_view key) const;

    [[nodiscard]] std::string get_string(std::string_view key, std::string_view fallback) const;
    [[nodiscard]] std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
    [[nodiscard]] std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const;
    [[nodiscard]] double get_double(std::string_view key, double fallback) const;
    [[nodiscard]] bool get_bool(std::string_view key, bool fallback) const;
    /// Items separated by ',' or ';', trimmed, empties dropped.
    [[nodiscard]] std::vector<std::string> get_list(std::string_view key,
                                                    std::vector<std::string> fallback) const;
    /// Resolved against base_dir when relative. Empty when the key is absent.
    [[nodiscard]] std::filesystem::path get_path(std::string_view key) const;

    /// Throws ConfigError naming the first key not in `known` (sweep.* keys are checked by suffix).
    void check_keys(std::span<const std::string_view> known) const;

    [[nodiscard]] const std::map<std::string, std::string, std::less<>>& values() const {
        return values_;
    }
    [[nodiscard]] const std::filesystem::path& base_dir() const { return base_dir_; }
    void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

    /// Sorted `key = value` lines; parse(write(c)) == c.
    void write(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;

    friend bool operator==(const Config& a, const Config& b) { return a.values_ == b.values_; }

  private:
    std::map<std::string, std::string, std::less<>> values_;
    std::filesystem::path base_dir_;
};

struct SweepCell {
    /// "key=value key=value" over the swept keys, in key order; "default" with no axes.
    std::string name;
    Config config;
};

/// Cartesian product of the sweep.* axes, last key varying fastest.
/// The returned configs carry no sweep.* keys.
[[nodiscard]] std::vector<SweepCell> expand_sweep(const Config& config);

}  // namespace bordepth
