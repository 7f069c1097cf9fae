#include "bordepth/policy_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "bordepth/errors.hpp"

namespace bordepth {

namespace {

constexpr std::array<const char*, 5> kEdgeNames{"top", "gap", "spread", "size", "ceiling"};

std::string real(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_real(std::string_view token) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw DataError(fmt::format("policy file: bad number '{}'", token));
    }
    return v;
}

template <typename Int>
Int parse_int(std::string_view token) {
    Int v{};
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw DataError(fmt::format("policy file: bad integer '{}'", token));
    }
    return v;
}

std::vector<std::string> split_line(std::istream& in, std::string_view expected_tag) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(fmt::format("policy file: truncated before '{}'", expected_tag));
    }
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) {
        tokens.push_back(t);
    }
    if (tokens.empty() || tokens.front() != expected_tag) {
        throw DataError(fmt::format("policy file: expected '{}' line, got '{}'", expected_tag, line));
    }
    return tokens;
}

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> bytes{};
    for (std::size_t i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    }
    out.write(bytes.data(), bytes.size());
}

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> bytes{};
    for (std::size_t i = 0; i < 4; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    }
    out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_bytes(std::istream& in, std::size_t n) {
    std::array<unsigned char, 8> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n))) {
        throw DataError("policy file: truncated binary payload");
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    }
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_bytes(in, 8)); }

void write_tabular(std::ostream& out, const TabularPolicy& p) {
    out << "scaler " << real(p.scaler.top_min) << ' ' << real(p.scaler.top_max) << '\n';
    for (std::size_t j = 0; j < p.bin_edges.size(); ++j) {
        out << "edges " << kEdgeNames[j];
        for (const double e : p.bin_edges[j]) {
            out << ' ' << real(e);
        }
        out << '\n';
    }
    out << "depth_edges";
    for (const auto d : p.depth_edges) {
        out << ' ' << d;
    }
    out << '\n';
    std::vector<std::uint64_t> keys;
    keys.reserve(p.q_table.size());
    for (const auto& [k, v] : p.q_table) {
        keys.push_back(k);
    }
    std::sort(keys.begin(), keys.end());
    out << "entries " << keys.size() << '\n';
    for (const auto k : keys) {
        const auto& q = p.q_table.at(k);
        out << k << ' ' << real(q.stop) << ' ' << real(q.cont) << '\n';
    }
}

TabularPolicy read_tabular(std::istream& in) {
    TabularPolicy p;
    auto scaler = split_line(in, "scaler");
    if (scaler.size() != 3) {
        throw DataError("policy file: scaler line needs two values");
    }
    p.scaler.top_min = parse_real(scaler[1]);
    p.scaler.top_max = parse_real(scaler[2]);
    for (std::size_t j = 0; j < p.bin_edges.size(); ++j) {
        auto edges = split_line(in, "edges");
        if (edges.size() < 2 || edges[1] != kEdgeNames[j]) {
            throw DataError(fmt::format("policy file: expected edges for '{}'", kEdgeNames[j]));
        }
        for (std::size_t i = 2; i < edges.size(); ++i) {
            p.bin_edges[j].push_back(parse_real(edges[i]));
        }
    }
    auto depth = split_line(in, "depth_edges");
    for (std::size_t i = 1; i < depth.size(); ++i) {
        p.depth_edges.push_back(parse_int<std::int64_t>(depth[i]));
    }
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw DataError(std::string("policy file: ") + e.what());
    }
    auto entries = split_line(in, "entries");
    if (entries.size() != 2) {
        throw DataError("policy file: entries line needs a count");
    }
    const auto count = parse_int<std::size_t>(entries[1]);
    std::string line;
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) {
            throw DataError(fmt::format("policy file: expected {} entries, found {}", count, i));
        }
        std::istringstream ss(line);
        std::string key, stop, cont, extra;
        if (!(ss >> key >> stop >> cont) || (ss >> extra)) {
            throw DataError(fmt::format("policy file: malformed entry '{}'", line));
        }
        p.q_table[parse_int<std::uint64_t>(key)] = {parse_real(stop), parse_real(cont)};
    }
    return p;
}

void write_neural(std::ostream& out, const NeuralPolicy& p) {
    const auto& sizes = p.network.layer_sizes();
    put_u32(out, static_cast<std::uint32_t>(sizes.size()));
    for (const auto s : sizes) {
        put_u64(out, s);
    }
    put_f64(out, p.scaler.top_min);
    put_f64(out, p.scaler.top_max);
    const auto params = p.network.parameters();
    put_u64(out, params.size());
    for (const double w : params) {
        put_f64(out, w);
    }
}

NeuralPolicy read_neural(std::istream& in) {
    const auto layer_count = get_bytes(in, 4);
    if (layer_count < 2 || layer_count > 64) {
        throw DataError("policy file: implausible layer count");
    }
    std::vector<std::size_t> sizes;
    for (std::uint64_t i = 0; i < layer_count; ++i) {
        sizes.push_back(static_cast<std::size_t>(get_bytes(in, 8)));
    }
    if (sizes.front() != kFeatureCount || sizes.back() != 2) {
        throw DataError("policy file: network must map 6 features to 2 action values");
    }
    NeuralPolicy p;
    p.scaler.top_min = get_f64(in);
    p.scaler.top_max = get_f64(in);
    const auto count = get_bytes(in, 8);
    if (count > (std::uint64_t{1} << 32)) {
        throw DataError("policy file: implausible parameter count");
    }
    std::vector<double> params;
    params.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
        params.push_back(get_f64(in));
    }
    try {
        p.network = Mlp(std::move(sizes), std::move(params));
    } catch (const DomainError& e) {
        throw DataError(std::string("policy file: ") + e.what());
    }
    return p;
}

}  // namespace

void write_policy(std::ostream& out, const Policy& policy) {
    out << "bordepth-policy " << kPolicyFormatVersion << ' ' << policy_kind(policy) << '\n';
    std::visit(
        [&out](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, FixedKPolicy>) {
                out << "k " << p.k << '\n';
            } else if constexpr (std::is_same_v<T, TabularPolicy>) {
                write_tabular(out, p);
            } else {
                write_neural(out, p);
            }
        },
        policy);
}

Policy read_policy(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("policy file: empty");
    }
    std::istringstream header(line);
    std::string magic, kind;
    int version = 0;
    if (!(header >> magic >> version >> kind) || magic != "bordepth-policy") {
        throw DataError("policy file: missing 'bordepth-policy' header");
    }
    if (version != kPolicyFormatVersion) {
        throw DataError(fmt::format("policy file: unsupported version {}", version));
    }
    if (kind == "fixed_k") {
        auto k = split_line(in, "k");
        if (k.size() != 2) {
            throw DataError("policy file: k line needs one value");
        }
        const auto value = parse_int<std::int64_t>(k[1]);
        if (value < 1) {
            throw DataError("policy file: fixed k must be >= 1");
        }
        return FixedKPolicy{value};
    }
    if (kind == "tabular") {
        return read_tabular(in);
    }
    if (kind == "neural") {
        return read_neural(in);
    }
    throw DataError(fmt::format("policy file: unknown policy kind '{}'", kind));
}

void save_policy(const std::filesystem::path& path, const Policy& policy) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(fmt::format("cannot write policy file {}", path.string()));
    }
    write_policy(out, policy);
    if (!out) {
        throw DataError(fmt::format("write failed for {}", path.string()));
    }
}

Policy load_policy(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(fmt::format("cannot open policy file {}", path.string()));
    }
    return read_policy(in);
}

}  // namespace bordepth
