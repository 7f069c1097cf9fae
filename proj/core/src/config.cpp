#include "bordepth/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "bordepth/errors.hpp"

namespace bordepth {

namespace {

constexpr std::string_view kSweepPrefix = "sweep.";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ConfigError(fmt::format("{}: '{}' is not a valid number", key, text));
    }
    return value;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto stop = text.find_first_of(",;", start);
        const auto piece =
            trim(text.substr(start, stop == std::string_view::npos ? std::string_view::npos
                                                                     : stop - start));
        if (!piece.empty()) {
            out.emplace_back(piece);
        }
        if (stop == std::string_view::npos) {
            break;
        }
        start = stop + 1;
    }
    return out;
}

}  // namespace

Config Config::parse(std::istream& in, std::filesystem::path base_dir) {
    Config c;
    c.base_dir_ = std::move(base_dir);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
        }
        const auto key = trim(view.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(fmt::format("config line {}: empty key", line_no));
        }
        if (c.has(key)) {
            throw ConfigError(fmt::format("config line {}: duplicate key '{}'", line_no, key));
        }
        c.set(std::string(key), std::string(trim(view.substr(eq + 1))));
    }
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
    }
    return parse(in, path.parent_path());
}

void Config::apply(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || trim(assignment.substr(0, eq)).empty()) {
        throw ConfigError(fmt::format("override '{}' is not key=value", assignment));
    }
    set(std::string(trim(assignment.substr(0, eq))),
        std::string(trim(assignment.substr(eq + 1))));
}

void Config::set(std::string key, std::string value) {
    values_.insert_or_assign(std::move(key), std::move(value));
}

void Config::erase(std::string_view key) {
    if (const auto it = values_.find(key); it != values_.end()) {
        values_.erase(it);
    }
}

bool Config::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::optional<std::string> Config::find(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string Config::get_string(std::string_view key, std::string_view fallback) const {
    const auto v = find(key);
    return v ? *v : std::string(fallback);
}

std::int64_t Config::get_int(std::string_view key, std::int64_t fallback) const {
    const auto v = find(key);
    return v ? parse_number<std::int64_t>(key, *v) : fallback;
}

std::uint64_t Config::get_uint(std::string_view key, std::uint64_t fallback) const {
    const auto v = find(key);
    return v ? parse_number<std::uint64_t>(key, *v) : fallback;
}

double Config::get_double(std::string_view key, double fallback) const {
    const auto v = find(key);
    return v ? parse_number<double>(key, *v) : fallback;
}

bool Config::get_bool(std::string_view key, bool fallback) const {
    const auto v = find(key);
    if (!v) {
        return fallback;
    }
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, *v));
}

std::vector<std::string> Config::get_list(std::string_view key,
                                          std::vector<std::string> fallback) const {
    const auto v = find(key);
    return v ? split_list(*v) : fallback;
}

std::filesystem::path Config::get_path(std::string_view key) const {
    const auto v = find(key);
    if (!v || v->empty()) {
        return {};
    }
    std::filesystem::path p(*v);
    if (p.is_relative() && !base_dir_.empty()) {
        p = base_dir_ / p;
    }
    return p;
}

void Config::check_keys(std::span<const std::string_view> known) const {
    for (const auto& [key, value] : values_) {
        std::string_view k = key;
        if (k.starts_with(kSweepPrefix)) {
            k.remove_prefix(kSweepPrefix.size());
        }
        if (std::find(known.begin(), known.end(), k) == known.end()) {
            throw ConfigError(fmt::format("unknown config key '{}'", key));
        }
    }
}

void Config::write(std::ostream& out) const {
    for (const auto& [key, value] : values_) {
        out << key << " = " << value << '\n';
    }
}

void Config::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", path.string()));
    }
    write(out);
}

std::vector<SweepCell> expand_sweep(const Config& config) {
    Config base = config;
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    for (const auto& [key, value] : config.values()) {
        if (key.starts_with(kSweepPrefix)) {
            // Levels are ';'-separated when any ';' is present, so a level may itself be a list.
            std::vector<std::string> levels;
            if (value.find(';') == std::string::npos) {
                levels = split_list(value);
            } else {
                std::string_view rest = value;
                while (!rest.empty()) {
                    const auto stop = rest.find(';');
                    const auto piece = trim(rest.substr(0, stop));
                    if (!piece.empty()) {
                        levels.emplace_back(piece);
                    }
                    rest = stop == std::string_view::npos ? std::string_view() : rest.substr(stop + 1);
                }
            }
            if (levels.empty()) {
                throw ConfigError(fmt::format("{} has no values", key));
            }
            axes.emplace_back(key.substr(kSweepPrefix.size()), std::move(levels));
            base.erase(key);
        }
    }
    if (axes.empty()) {
        return {{"default", base}};
    }
    std::vector<SweepCell> cells;
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        SweepCell cell{{}, base};
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const auto& level = axes[a].second[idx[a]];
            cell.config.set(axes[a].first, level);
            if (a > 0) {
                cell.name += ' ';
            }
            cell.name += axes[a].first + "=" + level;
        }
        cells.push_back(std::move(cell));
        std::size_t a = axes.size();
        while (a > 0) {
            --a;
            if (++idx[a] < axes[a].second.size()) {
                break;
            }
            idx[a] = 0;
            if (a == 0) {
                return cells;
            }
        }
    }
}

}  // namespace bordepth
