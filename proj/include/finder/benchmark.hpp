#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "finder/metrics.hpp"
#include "finder/planner.hpp"
#include "finder/stats.hpp"
#include "finder/textio.hpp"
#include "finder/worldgen.hpp"

namespace finder {

inline constexpr const char* kFinderVersion = "1.0.0";

struct BenchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Paired-suite configuration: every policy replays the identical
/// (world, spawn, targets) per episode index, enabling signed-rank testing.
struct BenchConfig {
    std::vector<PolicyKind> policies{PolicyKind::Full, PolicyKind::NoSto, PolicyKind::NoOto,
                                     PolicyKind::GreedyFrontier, PolicyKind::RandomWalk};
    int episodes = 100;
    uint64_t master_seed = 7;
    WorldGenParams world = default_worldgen_params();
    PolicyConfig base;  // kind is overridden per policy
    int workers = 1;
    double alpha = 0.05;
};

struct BenchPolicySummary {
    std::string policy;
    double sr = 0.0;
    double mspl = 0.0;
    double mean_steps = 0.0;
};

struct PairwiseTest {
    std::string policy_a;
    std::string policy_b;
    double p_value = 1.0;
    bool significant = false;  // at alpha / m after Bonferroni
};

struct BenchReport {
    std::vector<BenchPolicySummary> summaries;
    std::vector<PairwiseTest> pairwise;  // Wilcoxon on per-episode SPL terms
    double alpha = 0.05;
    double bonferroni_threshold = 0.05;
    uint64_t master_seed = 0;
    int episodes = 0;
    std::vector<std::vector<EpisodeResult>> results;  // [policy][episode]
};

namespace detail {

inline void validate_bench_config(const BenchConfig& cfg) {
    std::string errors;
    auto fail = [&](const std::string& m) {
        if (!errors.empty()) errors += "; ";
        errors += m;
    };
    if (cfg.policies.empty()) fail("no policies listed");
    if (cfg.episodes < 1) fail("episodes must be >= 1");
    if (cfg.workers < 1) fail("workers must be >= 1");
    if (cfg.base.budget < 1) fail("budget must be >= 1");
    if (cfg.base.epsilon < 0) fail("epsilon must be >= 0");
    if (cfg.base.motion.turn_deg <= 0 || 360 % cfg.base.motion.turn_deg != 0)
        fail("turn_deg must divide 360");
    if (!(cfg.base.unknown_cost >= 1.0)) fail("unknown_cost must be >= 1");
    if (cfg.world.k() < 1 || cfg.world.k() > 8) fail("world K out of range");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) fail("alpha must lie in (0,1)");
    for (size_t i = 0; i < cfg.policies.size(); ++i)
        for (size_t j = i + 1; j < cfg.policies.size(); ++j)
            if (cfg.policies[i] == cfg.policies[j]) fail("duplicate policy listed");
    if (!errors.empty()) throw BenchError("invalid bench config: " + errors);
}

/// Runs tasks 0..count-1 across `workers` threads. Exceptions propagate.
template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
    if (count <= 0) return;
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    int i = next.fetch_add(1);
                    if (i >= count || failed.load()) return;
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
                failed.store(true);
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace detail

/// Per-episode CSV, columns fixed and versioned:
///   seed,policy,S,p,l,steps,found_steps,fail_reason
/// found_steps is semicolon-joined in target order, -1 for never-found.
inline void write_episode_csv(std::ostream& out, std::span<const EpisodeResult> results) {
    out << "seed,policy,S,p,l,steps,found_steps,fail_reason\n";
    for (const EpisodeResult& r : results) {
        out << r.world_seed << ',' << r.policy << ',' << (r.success ? 1 : 0) << ',' << r.path_len << ','
            << r.optimal_len << ',' << r.steps << ',';
        for (size_t i = 0; i < r.found_steps.size(); ++i) out << (i ? ";" : "") << r.found_steps[i];
        out << ',' << r.fail_reason << '\n';
    }
}

inline std::vector<EpisodeResult> read_episode_csv(std::istream& in) {
    LineReader reader(in);
    std::string header = reader.require("csv header");
    if (header != "seed,policy,S,p,l,steps,found_steps,fail_reason")
        throw BenchError("unrecognized csv header: " + header);
    std::vector<EpisodeResult> out;
    std::string line;
    while (reader.next(line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        size_t start = 0;
        for (size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 8)
            throw BenchError("csv line " + std::to_string(reader.line_no()) + ": expected 8 fields");
        EpisodeResult r;
        r.world_seed = parse_uint(fields[0], "seed");
        r.policy = fields[1];
        r.success = parse_int(fields[2], "S") != 0;
        r.path_len = static_cast<int>(parse_int(fields[3], "p"));
        r.optimal_len = static_cast<int>(parse_int(fields[4], "l"));
        r.steps = static_cast<int>(parse_int(fields[5], "steps"));
        if (!fields[6].empty()) {
            size_t s = 0;
            for (size_t i = 0; i <= fields[6].size(); ++i) {
                if (i == fields[6].size() || fields[6][i] == ';') {
                    r.found_steps.push_back(static_cast<int>(parse_int(
                        std::string_view(fields[6]).substr(s, i - s), "found_steps")));
                    s = i + 1;
                }
            }
        }
        r.fail_reason = fields[7];
        out.push_back(std::move(r));
    }
    return out;
}

/// Runs the paired suite. Episode i of every policy uses the world generated
/// from derive_seed(master_seed, i) and the spawn derived from the same seed,
/// so rows pair across policies. Results are byte-identical for any worker
/// count: tasks write into a pre-indexed table and aggregation is ordered.
inline BenchReport run_benchmark(const BenchConfig& cfg) {
    detail::validate_bench_config(cfg);
    const SimilarityTable table = synthetic_similarity(cfg.master_seed, cfg.world);

    BenchReport report;
    report.alpha = cfg.alpha;
    report.master_seed = cfg.master_seed;
    report.episodes = cfg.episodes;
    report.results.assign(cfg.policies.size(), std::vector<EpisodeResult>(cfg.episodes));

    const int total = static_cast<int>(cfg.policies.size()) * cfg.episodes;
    detail::parallel_for(total, cfg.workers, [&](int task) {
        const int p = task / cfg.episodes;
        const int i = task % cfg.episodes;
        uint64_t episode_seed = derive_seed(cfg.master_seed, static_cast<uint64_t>(i));
        GridWorld world = generate_world(episode_seed, cfg.world);
        PolicyConfig pc = cfg.base;
        pc.kind = cfg.policies[p];
        report.results[p][i] = run_episode(world, table, pc, episode_seed, episode_seed);
    });

    for (size_t p = 0; p < cfg.policies.size(); ++p) {
        const auto& rs = report.results[p];
        BenchPolicySummary s;
        s.policy = policy_name(cfg.policies[p]);
        s.sr = success_rate(rs);
        s.mspl = mspl(rs);
        double steps = 0.0;
        for (const auto& r : rs) steps += r.steps;
        s.mean_steps = steps / static_cast<double>(rs.size());
        report.summaries.push_back(s);
    }

    const size_t m = cfg.policies.size() * (cfg.policies.size() - 1) / 2;
    report.bonferroni_threshold = m > 0 ? cfg.alpha / static_cast<double>(m) : cfg.alpha;
    for (size_t a = 0; a < cfg.policies.size(); ++a)
        for (size_t b = a + 1; b < cfg.policies.size(); ++b) {
            std::vector<double> sa, sb;
            for (int i = 0; i < cfg.episodes; ++i) {
                sa.push_back(spl_term(report.results[a][i]));
                sb.push_back(spl_term(report.results[b][i]));
            }
            PairwiseTest t;
            t.policy_a = policy_name(cfg.policies[a]);
            t.policy_b = policy_name(cfg.policies[b]);
            t.p_value = wilcoxon_signed_rank(sa, sb);
            t.significant = t.p_value < report.bonferroni_threshold;
            report.pairwise.push_back(t);
        }
    return report;
}

inline void write_report(std::ostream& out, const BenchReport& report, const BenchConfig& cfg) {
    out << "finder-bench-report v1\n";
    out << "version " << kFinderVersion << '\n';
    out << "master_seed " << report.master_seed << '\n';
    out << "episodes " << report.episodes << '\n';
    out << "world " << cfg.world.width << 'x' << cfg.world.height << " R=" << cfg.world.room_types
        << " L=" << cfg.world.class_count << " K=" << cfg.world.k() << '\n';
    out << "epsilon " << format_double(cfg.base.epsilon) << " budget " << cfg.base.budget << " range "
        << format_double(cfg.base.sensor.range) << " fov_deg " << format_double(cfg.base.sensor.fov_deg)
        << " turn_deg " << cfg.base.motion.turn_deg << '\n';
    out << '\n';
    out << "policy            SR      MSPL    mean_steps\n";
    for (const auto& s : report.summaries)
        out << s.policy << std::string(s.policy.size() < 18 ? 18 - s.policy.size() : 1, ' ')
            << detail::format_fixed(s.sr, 4) << "  " << detail::format_fixed(s.mspl, 4) << "  "
            << detail::format_fixed(s.mean_steps, 2) << '\n';
    out << '\n';
    out << "pairwise Wilcoxon signed-rank on per-episode SPL terms, alpha "
        << detail::format_fixed(report.alpha, 4) << ", Bonferroni threshold "
        << format_double(report.bonferroni_threshold) << " (m=" << report.pairwise.size() << ")\n";
    for (const auto& t : report.pairwise)
        out << t.policy_a << " vs " << t.policy_b << "  p=" << format_double(t.p_value)
            << (t.significant ? "  significant" : "") << '\n';
}

/// Scalability sweep: for each K, run episodes of one policy until the
/// requested number of successes is collected (or the per-K attempt cap is
/// hit, flagged as `capped`). Attempts are consumed in index order so any
/// worker count reproduces the identical row.
struct SweepConfig {
    std::vector<int> ks{1, 2, 3, 4, 5, 6, 7, 8};
    int successes_per_k = 100;
    int attempt_cap = 500;
    uint64_t master_seed = 7;
    WorldGenParams world = default_worldgen_params();
    std::vector<int> target_class_pool{1, 6, 11, 2, 7, 12, 3, 8};
    PolicyKind policy = PolicyKind::Full;
    PolicyConfig base;
    int workers = 1;
};

struct SweepRow {
    int k = 0;
    int successes = 0;
    int attempts = 0;
    bool capped = false;
    double mean_steps = 0.0;
    double median_steps = 0.0;
};

inline std::vector<SweepRow> scalability_sweep(const SweepConfig& cfg) {
    if (cfg.successes_per_k < 1) throw BenchError("invalid sweep config: successes_per_k must be >= 1");
    if (cfg.attempt_cap < 1) throw BenchError("invalid sweep config: attempt_cap must be >= 1");
    std::vector<SweepRow> rows;
    for (int k : cfg.ks) {
        if (k < 1 || k > static_cast<int>(cfg.target_class_pool.size()))
            throw BenchError("invalid sweep config: K exceeds the target class pool");
        WorldGenParams params = cfg.world;
        params.target_classes.assign(cfg.target_class_pool.begin(), cfg.target_class_pool.begin() + k);
        const SimilarityTable table = synthetic_similarity(cfg.master_seed, params);

        SweepRow row;
        row.k = k;
        std::vector<int> success_steps;
        int attempt = 0;
        while (static_cast<int>(success_steps.size()) < cfg.successes_per_k && attempt < cfg.attempt_cap) {
            int batch = std::min(cfg.attempt_cap - attempt, std::max(cfg.workers * 4, 8));
            std::vector<EpisodeResult> batch_results(static_cast<size_t>(batch));
            detail::parallel_for(batch, cfg.workers, [&](int b) {
                uint64_t episode_seed =
                    derive_seed(cfg.master_seed, static_cast<uint64_t>(k), static_cast<uint64_t>(attempt + b));
                GridWorld world = generate_world(episode_seed, params);
                PolicyConfig pc = cfg.base;
                pc.kind = cfg.policy;
                batch_results[b] = run_episode(world, table, pc, episode_seed, episode_seed);
            });
            for (int b = 0; b < batch; ++b) {
                ++row.attempts;
                if (batch_results[b].success) success_steps.push_back(batch_results[b].steps);
                if (static_cast<int>(success_steps.size()) >= cfg.successes_per_k) break;
            }
            attempt += batch;
        }
        row.successes = static_cast<int>(success_steps.size());
        row.capped = row.successes < cfg.successes_per_k;
        if (!success_steps.empty()) {
            double sum = 0.0;
            for (int s : success_steps) sum += s;
            row.mean_steps = sum / static_cast<double>(success_steps.size());
            std::vector<int> sorted = success_steps;
            std::sort(sorted.begin(), sorted.end());
            size_t n = sorted.size();
            row.median_steps = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
        }
        rows.push_back(row);
    }
    return rows;
}

inline void write_sweep(std::ostream& out, std::span<const SweepRow> rows) {
    out << "k,successes,attempts,capped,mean_steps,median_steps\n";
    for (const SweepRow& r : rows)
        out << r.k << ',' << r.successes << ',' << r.attempts << ',' << (r.capped ? 1 : 0) << ','
            << detail::format_fixed(r.mean_steps, 4) << ',' << detail::format_fixed(r.median_steps, 4)
            << '\n';
}

}  // namespace finder
