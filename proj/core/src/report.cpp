#include "bordepth/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "bordepth/errors.hpp"

namespace bordepth {

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(std::span<const double> xs) {
    MeanStd out;
    if (xs.empty()) {
        return out;
    }
    for (const double x : xs) {
        out.mean += x;
    }
    out.mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (const double x : xs) {
        ss += (x - out.mean) * (x - out.mean);
    }
    out.std = std::sqrt(ss / static_cast<double>(xs.size()));
    return out;
}

struct Tally {
    std::size_t n = 0;
    std::size_t found = 0;
    double k_sum = 0.0;
    double k_sq = 0.0;
    double reward_sum = 0.0;

    void add(const EpisodeTrace& t) {
        ++n;
        const auto k = static_cast<double>(t.chosen_k);
        k_sum += k;
        k_sq += k * k;
        if (t.found) {
            ++found;
            reward_sum += t.terminal_reward;
        }
    }
    [[nodiscard]] double found_pct() const {
        return 100.0 * static_cast<double>(found) / static_cast<double>(n);
    }
    [[nodiscard]] double mean_k() const { return k_sum / static_cast<double>(n); }
};

double k_std(std::span<const EpisodeTrace> traces, double mean) {
    double ss = 0.0;
    for (const auto& t : traces) {
        const double d = static_cast<double>(t.chosen_k) - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(traces.size()));
}

struct RqGroup {
    std::string_view label;
    std::int64_t lo;
    std::int64_t hi;
};

constexpr std::array<RqGroup, 4> kRqGroups{{
    {"1", 1, 1},
    {"2-5", 2, 5},
    {"6-30", 6, 30},
    {"31+", 31, kOpenEnd},
}};

// Quoted only when needed, so plain names stay plain.
std::string csv(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (const char c : field) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + '"';
}

std::string real(double v) { return fmt::format("{:.6f}", v); }

std::string real(const std::optional<double>& v) { return v ? real(*v) : std::string(); }

std::string bits(metric::Bits b) {
    return b.is_negative_infinity() ? std::string("-inf") : real(b.value());
}

std::string one_decimal(double v) { return fmt::format("{:.1f}", v); }

std::string with_std(double mean, const std::optional<double>& sd) {
    return sd ? fmt::format("{:.1f} ± {:.1f}", mean, *sd) : one_decimal(mean);
}

void write_file(const std::filesystem::path& path,
                void (*writer)(std::ostream&, std::span<const EvalReport>),
                std::span<const EvalReport> reports) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(fmt::format("cannot open '{}' for writing", path.string()));
    }
    writer(out, reports);
    out.flush();
    if (!out) {
        throw DataError(fmt::format("write to '{}' failed", path.string()));
    }
}

}  // namespace

const MethodRow& EvalReport::method(std::string_view name) const {
    for (const auto& m : methods) {
        if (m.method == name) {
            return m;
        }
    }
    throw DataError(fmt::format("report has no method '{}'", name));
}

const BucketRow& EvalReport::bucket(std::string_view method_name, std::string_view label) const {
    for (const auto& b : buckets) {
        if (b.method == method_name && b.bucket == label) {
            return b;
        }
    }
    throw DataError(fmt::format("report has no bucket '{}' for method '{}'", label, method_name));
}

EvalReport summarize(std::string condition, std::span<const MethodTraces> methods,
                     BucketScheme scheme, std::int64_t candidate_n) {
    if (methods.empty()) {
        throw DataError("summarize needs at least one method");
    }
    EvalReport report;
    report.condition = std::move(condition);
    report.candidate_n = candidate_n;
    report.scheme = scheme;

    for (const auto& mt : methods) {
        if (mt.per_seed.empty() || mt.per_seed.size() != mt.seeds.size()) {
            throw DataError(fmt::format("method '{}' needs one trace set per seed", mt.method));
        }
        const std::size_t n = mt.per_seed.front().size();
        for (const auto& traces : mt.per_seed) {
            if (traces.empty() || traces.size() != n) {
                throw DataError(
                    fmt::format("method '{}': seeds must share a non-empty test set", mt.method));
            }
        }
        const std::optional<double> no_std;
        auto spread = [&](const MeanStd& ms) {
            return mt.deterministic ? no_std : std::optional<double>(ms.std);
        };

        std::vector<double> found, mean_k, within;
        std::vector<EpisodeTrace> pooled;
        Tally all;
        for (std::size_t s = 0; s < mt.per_seed.size(); ++s) {
            const auto& traces = mt.per_seed[s];
            Tally t;
            for (const auto& tr : traces) {
                t.add(tr);
                all.add(tr);
            }
            SeedRow row;
            row.method = mt.method;
            row.seed = mt.seeds[s];
            row.n = t.n;
            row.found_pct = t.found_pct();
            row.mean_k = t.mean_k();
            row.k_std = k_std(traces, row.mean_k);
            if (t.found > 0) {
                row.reward_bits = t.reward_sum / static_cast<double>(t.found);
            }
            row.aggregate_bor = metric::aggregate_bor(traces, candidate_n);
            found.push_back(row.found_pct);
            mean_k.push_back(row.mean_k);
            within.push_back(row.k_std);
            report.seeds.push_back(row);
            pooled.insert(pooled.end(), traces.begin(), traces.end());
        }

        MethodRow row;
        row.method = mt.method;
        row.deterministic = mt.deterministic;
        row.seeds = mt.per_seed.size();
        row.n = n;
        const MeanStd f = mean_std(found);
        const MeanStd k = mean_std(mean_k);
        row.found_pct = f.mean;
        row.found_pct_std = spread(f);
        row.mean_k = k.mean;
        row.mean_k_std = spread(k);
        row.k_std_within = mean_std(within).mean;
        if (all.found > 0) {
            row.reward_bits = all.reward_sum / static_cast<double>(all.found);
        }
        row.aggregate_bor = metric::aggregate_bor(pooled, candidate_n);
        report.methods.push_back(row);

        for (const auto& b : buckets(scheme)) {
            BucketRow br;
            br.method = mt.method;
            br.bucket = std::string(b.label);
            br.first_rank = b.first_rank;
            br.last_rank = b.last_rank;
            std::vector<double> bf, bk;
            for (const auto& traces : mt.per_seed) {
                Tally t;
                for (const auto& tr : traces) {
                    if (bucketize(tr, scheme).label == b.label) {
                        t.add(tr);
                    }
                }
                br.n = t.n;
                if (t.n > 0) {
                    bf.push_back(t.found_pct());
                    bk.push_back(t.mean_k());
                }
            }
            if (!bf.empty()) {
                const MeanStd bfs = mean_std(bf);
                const MeanStd bks = mean_std(bk);
                br.found_pct = bfs.mean;
                br.found_pct_std = spread(bfs);
                br.mean_k = bks.mean;
                br.mean_k_std = spread(bks);
            }
            report.buckets.push_back(br);
        }

        for (const auto& g : kRqGroups) {
            Tally t;
            for (const auto& tr : pooled) {
                if (tr.relevant_count >= g.lo && tr.relevant_count <= g.hi) {
                    t.add(tr);
                }
            }
            RelevanceRow rr;
            rr.method = mt.method;
            rr.group = std::string(g.label);
            rr.n = t.n / mt.per_seed.size();
            if (t.n > 0) {
                rr.found_pct = t.found_pct();
                rr.mean_k = t.mean_k();
            }
            report.per_rq.push_back(rr);
        }
    }
    return report;
}

void write_summary_csv(std::ostream& out, std::span<const EvalReport> reports) {
    out << "condition,method,seeds,n,found_pct,found_pct_std,mean_k,mean_k_std,k_std_within,"
           "reward_bits,aggregate_bor\n";
    for (const auto& r : reports) {
        for (const auto& m : r.methods) {
            out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", csv(r.condition), csv(m.method),
                               m.seeds, m.n, real(m.found_pct), real(m.found_pct_std),
                               real(m.mean_k), real(m.mean_k_std), real(m.k_std_within),
                               real(m.reward_bits), bits(m.aggregate_bor));
        }
    }
}

void write_seeds_csv(std::ostream& out, std::span<const EvalReport> reports) {
    out << "condition,method,seed,n,found_pct,mean_k,k_std,reward_bits,aggregate_bor\n";
    for (const auto& r : reports) {
        for (const auto& s : r.seeds) {
            out << fmt::format("{},{},{},{},{},{},{},{},{}\n", csv(r.condition), csv(s.method), s.seed, s.n,
                               real(s.found_pct), real(s.mean_k), real(s.k_std),
                               real(s.reward_bits), bits(s.aggregate_bor));
        }
    }
}

void write_buckets_csv(std::ostream& out, std::span<const EvalReport> reports) {
    out << "condition,method,bucket,first_rank,last_rank,n,found_pct,found_pct_std,mean_k,"
           "mean_k_std\n";
    for (const auto& r : reports) {
        for (const auto& b : r.buckets) {
            const std::string last = b.last_rank == kOpenEnd ? std::string() : fmt::format("{}", b.last_rank);
            out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", csv(r.condition), csv(b.method), b.bucket,
                               b.first_rank, last, b.n, real(b.found_pct),
                               real(b.found_pct_std), real(b.mean_k), real(b.mean_k_std));
        }
    }
}

void write_per_rq_csv(std::ostream& out, std::span<const EvalReport> reports) {
    out << "condition,method,rq_group,n,found_pct,mean_k\n";
    for (const auto& r : reports) {
        for (const auto& g : r.per_rq) {
            out << fmt::format("{},{},{},{},{},{}\n", csv(r.condition), csv(g.method), g.group, g.n,
                               real(g.found_pct), real(g.mean_k));
        }
    }
}

void write_plot_csv(std::ostream& out, std::span<const EvalReport> reports) {
    out << "condition,method,bucket,mean_k,found_pct\n";
    for (const auto& r : reports) {
        for (const auto& b : r.buckets) {
            out << fmt::format("{},{},{},{},{}\n", csv(r.condition), csv(b.method), b.bucket,
                               real(b.mean_k), real(b.found_pct));
        }
    }
}

void emit_csv(std::span<const EvalReport> reports, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw DataError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
    }
    write_file(out_dir / "summary.csv", &write_summary_csv, reports);
    write_file(out_dir / "seeds.csv", &write_seeds_csv, reports);
    write_file(out_dir / "buckets.csv", &write_buckets_csv, reports);
    write_file(out_dir / "per_rq.csv", &write_per_rq_csv, reports);
    write_file(out_dir / "plot_data.csv", &write_plot_csv, reports);
}

void emit_csv(const EvalReport& report, const std::filesystem::path& out_dir) {
    emit_csv(std::span<const EvalReport>(&report, 1), out_dir);
}

std::string render_text(const EvalReport& report) {
    std::string out = fmt::format("condition {}  N={}  buckets={}\n", report.condition,
                                  report.candidate_n, to_string(report.scheme));
    out += fmt::format("{:<14} {:>6} {:>14} {:>14} {:>7} {:>8} {:>9}\n", "method", "seeds",
                       "found%", "K", "K_sd", "bits", "agg_bor");
    for (const auto& m : report.methods) {
        out += fmt::format("{:<14} {:>6} {:>14} {:>14} {:>7.1f} {:>8} {:>9}\n", m.method, m.seeds,
                           with_std(m.found_pct, m.found_pct_std),
                           with_std(m.mean_k, m.mean_k_std), m.k_std_within,
                           m.reward_bits ? fmt::format("{:.3f}", *m.reward_bits) : "-",
                           m.aggregate_bor.is_negative_infinity()
                               ? std::string("-inf")
                               : fmt::format("{:.3f}", m.aggregate_bor.value()));
    }
    out += "\nby gold rank\n";
    out += fmt::format("{:<14} {:<10} {:>5} {:>14} {:>14}\n", "method", "bucket", "n", "found%",
                       "K");
    for (const auto& b : report.buckets) {
        out += fmt::format("{:<14} {:<10} {:>5} {:>14} {:>14}\n", b.method, b.bucket, b.n,
                           b.found_pct ? with_std(*b.found_pct, b.found_pct_std) : "-",
                           b.mean_k ? with_std(*b.mean_k, b.mean_k_std) : "-");
    }
    return out;
}

}  // namespace bordepth
