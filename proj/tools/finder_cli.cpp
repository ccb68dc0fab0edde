// Command line front end: world generation, single episodes with map dumps,
// paired benchmark suites, scalability sweeps, and signed-rank comparisons.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "finder/finder.hpp"

namespace fs = std::filesystem;
using namespace finder;

namespace {

struct WorldGenFlags {
    int width = 64;
    int height = 64;
    int room_types = 5;
    int classes = 20;
    std::vector<int> target_classes{1, 6, 11};
    int min_rooms = 9;
    int max_rooms = 13;
    int room_min = 5;
    int room_max = 9;
    int obj_min = 2;
    int obj_max = 4;
    int group_max = 3;
    double resolution = 0.25;

    WorldGenParams params() const {
        WorldGenParams p;
        p.width = width;
        p.height = height;
        p.room_types = room_types;
        p.class_count = classes;
        p.target_classes = target_classes;
        p.min_rooms = min_rooms;
        p.max_rooms = max_rooms;
        p.room_min_side = room_min;
        p.room_max_side = room_max;
        p.min_object_groups_per_room = obj_min;
        p.max_object_groups_per_room = obj_max;
        p.max_group_size = group_max;
        p.resolution = resolution;
        p.affinity = structured_affinity(classes, room_types);
        return p;
    }
};

void add_worldgen_flags(CLI::App* cmd, WorldGenFlags& w) {
    cmd->add_option("--width", w.width, "world width in cells");
    cmd->add_option("--height", w.height, "world height in cells");
    cmd->add_option("--room-types", w.room_types, "room classes incl. corridor (<= 16)");
    cmd->add_option("--classes", w.classes, "scene object classes (L)");
    cmd->add_option("--target-classes", w.target_classes, "target class ids (K entries)")
        ->delimiter(',');
    cmd->add_option("--min-rooms", w.min_rooms);
    cmd->add_option("--max-rooms", w.max_rooms);
    cmd->add_option("--room-min", w.room_min, "min room side");
    cmd->add_option("--room-max", w.room_max, "max room side");
    cmd->add_option("--obj-min", w.obj_min, "min object groups per room");
    cmd->add_option("--obj-max", w.obj_max, "max object groups per room");
    cmd->add_option("--group-max", w.group_max, "max cells per object group");
    cmd->add_option("--resolution", w.resolution, "meters per cell (metadata)");
}

struct PolicyFlags {
    std::string policy = "full";
    std::string config_path;
    double epsilon = 2.0;
    int budget = 500;
    double range = 10.0;
    double fov_deg = 79.0;
    int turn_deg = 30;
    double unknown_cost = 1.0;

    PolicyConfig config() const {
        PolicyConfig c;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open policy config: " + config_path);
            c = parse_policy_config(in).config;
        }
        auto kind = parse_policy(policy);
        if (!kind) throw ConfigError("unknown policy '" + policy + "'");
        c.kind = *kind;
        c.epsilon = epsilon;
        c.budget = budget;
        c.sensor.range = range;
        c.sensor.fov_deg = fov_deg;
        c.motion.turn_deg = turn_deg;
        c.unknown_cost = unknown_cost;
        return c;
    }
};

void add_policy_flags(CLI::App* cmd, PolicyFlags& p, bool with_policy = true) {
    if (with_policy) cmd->add_option("--policy", p.policy, "full|no_sto|no_oto|greedy_frontier|random_walk|oracle");
    cmd->add_option("--config", p.config_path, "policy config file (overridden by flags)");
    cmd->add_option("--epsilon", p.epsilon, "found threshold in cells");
    cmd->add_option("--budget", p.budget, "max actions per episode");
    cmd->add_option("--range", p.range, "sensor range in cells");
    cmd->add_option("--fov", p.fov_deg, "sensor field of view, degrees");
    cmd->add_option("--turn", p.turn_deg, "turn increment, degrees");
    cmd->add_option("--unknown-cost", p.unknown_cost, "A* cost multiplier for unknown cells");
}

void dump_maps(const std::string& dir, const StepSnapshot& snap, const SensorConfig&) {
    fs::create_directories(dir);
    auto name = [&](const std::string& base) {
        std::ostringstream s;
        s << dir << '/' << base << '_' << std::setw(4) << std::setfill('0') << snap.step << ".pgm";
        return s.str();
    };
    write_pgm_file(name("occupancy"), *snap.occ);
    if (snap.sto) {
        write_pgm_file(name("confidence"), snap.sto->confidence, 1.0);
        for (size_t j = 0; j < snap.sto->channels.size(); ++j)
            write_pgm_file(name("sto_t" + std::to_string(snap.sto->target_ids[j])), snap.sto->channels[j], 1.0);
    }
    if (snap.oto) {
        double hi = 1.0;
        for (const auto& ch : snap.oto->channels)
            for (double v : ch) hi = std::max(hi, v);
        for (size_t j = 0; j < snap.oto->channels.size(); ++j)
            write_pgm_file(name("oto_t" + std::to_string(snap.oto->target_ids[j])), snap.oto->channels[j], hi);
    }
    if (snap.unified) {
        double k = snap.sto ? static_cast<double>(snap.sto->channels.size()) : 1.0;
        write_pgm_file(name("unified"), *snap.unified, std::max(1.0, 2.0 * k));
    }
}

int cmd_gen(uint64_t seed, int count, const WorldGenFlags& wflags, const std::string& out_dir,
            const std::string& similarity_out) {
    WorldGenParams params = wflags.params();
    fs::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
        uint64_t s = derive_seed(seed, static_cast<uint64_t>(i));
        GridWorld world = generate_world(s, params);
        std::ostringstream name;
        name << out_dir << "/world_" << std::setw(4) << std::setfill('0') << i << ".scn";
        save_scenario_file(name.str(), world);
        std::cout << name.str() << " seed=" << s << " objects=" << world.scene_objects.size() << '\n';
    }
    if (!similarity_out.empty()) {
        save_similarity_file(similarity_out, synthetic_similarity(seed, params));
        std::cout << similarity_out << '\n';
    }
    return 0;
}

int cmd_run(const std::string& scenario, const std::string& similarity, const PolicyFlags& pflags,
            uint64_t seed, const std::string& dump_dir, int dump_every, const std::string& csv_out) {
    GridWorld world = load_scenario_file(scenario);
    WorldGenParams params;  // only used when no similarity file is given
    SimilarityTable table;
    if (!similarity.empty()) {
        table = load_similarity_file(similarity);
    } else {
        params.width = world.width;
        params.height = world.height;
        params.room_types = world.room_types;
        params.class_count = world.class_count;
        for (int j = 0; j < world.target_count(); ++j) params.target_classes.push_back(world.target_class(j));
        params.affinity = structured_affinity(world.class_count, world.room_types);
        table = synthetic_similarity(seed, params);
    }
    PolicyConfig cfg = pflags.config();
    StepCallback cb = nullptr;
    if (!dump_dir.empty()) {
        cb = [&, dump_every](const StepSnapshot& snap) {
            if (dump_every > 0 && snap.step % dump_every != 0) return;
            if (dump_every <= 0 && snap.step != 0) return;  // default: first step only; final dumped below
            dump_maps(dump_dir, snap, cfg.sensor);
        };
    }
    // Keep the last snapshot around for a final dump.
    OccupancyMap last_occ;
    ScoreStack last_sto, last_oto;
    UnifiedMap last_unified;
    int last_step = -1;
    bool have_scores = false;
    StepCallback chain = [&](const StepSnapshot& snap) {
        last_occ = *snap.occ;
        last_step = snap.step;
        have_scores = snap.unified != nullptr;
        if (have_scores) {
            last_sto = *snap.sto;
            last_oto = *snap.oto;
            last_unified = *snap.unified;
        }
        if (cb) cb(snap);
    };
    EpisodeResult r = run_episode(world, table, cfg, seed, seed, chain);
    if (!dump_dir.empty() && last_step >= 0) {
        StepSnapshot snap;
        snap.step = last_step;
        snap.occ = &last_occ;
        if (have_scores) {
            snap.sto = &last_sto;
            snap.oto = &last_oto;
            snap.unified = &last_unified;
        }
        dump_maps(dump_dir, snap, cfg.sensor);
    }
    std::cout << "policy=" << r.policy << " success=" << (r.success ? 1 : 0) << " p=" << r.path_len
              << " l=" << r.optimal_len << " steps=" << r.steps << " spl=" << format_double(spl_term(r));
    if (!r.fail_reason.empty()) std::cout << " fail=" << r.fail_reason;
    std::cout << '\n';
    if (!csv_out.empty()) {
        std::ofstream out(csv_out, std::ios::binary);
        if (!out) throw BenchError("cannot open for writing: " + csv_out);
        std::vector<EpisodeResult> rs{r};
        write_episode_csv(out, rs);
    }
    return r.success ? 0 : 1;
}

int cmd_bench(uint64_t seed, int episodes, const std::vector<std::string>& policy_names,
              const WorldGenFlags& wflags, const PolicyFlags& pflags, const std::string& out_dir,
              int workers, double alpha) {
    BenchConfig cfg;
    cfg.master_seed = seed;
    cfg.episodes = episodes;
    cfg.world = wflags.params();
    cfg.base = pflags.config();
    cfg.workers = workers;
    cfg.alpha = alpha;
    cfg.policies.clear();
    for (const auto& n : policy_names) {
        auto k = parse_policy(n);
        if (!k) throw ConfigError("unknown policy '" + n + "'");
        cfg.policies.push_back(*k);
    }
    BenchReport report = run_benchmark(cfg);
    fs::create_directories(out_dir);
    for (size_t p = 0; p < cfg.policies.size(); ++p) {
        std::string path = out_dir + "/" + policy_name(cfg.policies[p]) + ".csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw BenchError("cannot open for writing: " + path);
        write_episode_csv(out, report.results[p]);
    }
    {
        std::ofstream out(out_dir + "/report.txt", std::ios::binary);
        write_report(out, report, cfg);
    }
    write_report(std::cout, report, cfg);
    return 0;
}

int cmd_sweep(uint64_t seed, int successes, int cap, std::vector<int> ks, const WorldGenFlags& wflags,
              const PolicyFlags& pflags, const std::string& policy, const std::string& out_path,
              int workers) {
    SweepConfig cfg;
    cfg.master_seed = seed;
    cfg.successes_per_k = successes;
    cfg.attempt_cap = cap;
    if (!ks.empty()) cfg.ks = std::move(ks);
    cfg.world = wflags.params();
    cfg.base = pflags.config();
    auto k = parse_policy(policy);
    if (!k) throw ConfigError("unknown policy '" + policy + "'");
    cfg.policy = *k;
    cfg.workers = workers;
    auto rows = scalability_sweep(cfg);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw BenchError("cannot open for writing: " + out_path);
        write_sweep(out, rows);
    }
    write_sweep(std::cout, rows);
    return 0;
}

int cmd_stats(const std::string& path_a, const std::string& path_b, double alpha, const std::string& metric) {
    auto load = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw BenchError("cannot open: " + p);
        return read_episode_csv(in);
    };
    auto ra = load(path_a);
    auto rb = load(path_b);
    if (ra.size() != rb.size()) throw BenchError("csv files differ in episode count");
    std::vector<double> a, b;
    for (size_t i = 0; i < ra.size(); ++i) {
        if (ra[i].world_seed != rb[i].world_seed)
            throw BenchError("csv files are not paired: seed mismatch at row " + std::to_string(i + 1));
        if (metric == "spl") {
            a.push_back(spl_term(ra[i]));
            b.push_back(spl_term(rb[i]));
        } else if (metric == "success") {
            a.push_back(ra[i].success ? 1.0 : 0.0);
            b.push_back(rb[i].success ? 1.0 : 0.0);
        } else if (metric == "steps") {
            a.push_back(ra[i].steps);
            b.push_back(rb[i].steps);
        } else {
            throw ConfigError("unknown metric '" + metric + "' (want spl|success|steps)");
        }
    }
    double p = wilcoxon_signed_rank(a, b);
    std::cout << "n " << a.size() << '\n';
    std::cout << "metric " << metric << '\n';
    std::cout << "p " << format_double(p) << '\n';
    std::cout << "significant_at_alpha " << (p < alpha ? 1 : 0) << " (alpha " << format_double(alpha)
              << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finder: multi-object search on deterministic grid worlds"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate scenario files");
    uint64_t gen_seed = 7;
    int gen_count = 1;
    std::string gen_out = "worlds";
    std::string gen_sim;
    WorldGenFlags gen_w;
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--count", gen_count, "number of worlds");
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--similarity-out", gen_sim, "also write the synthetic similarity table");
    add_worldgen_flags(gen, gen_w);

    // run
    auto* run = app.add_subcommand("run", "run a single episode");
    std::string run_scn, run_sim, run_dump, run_csv;
    uint64_t run_seed = 7;
    int run_dump_every = 0;
    PolicyFlags run_p;
    run->add_option("--scenario", run_scn, "scenario file")->required();
    run->add_option("--similarity", run_sim, "similarity file (default: synthetic from world params)");
    run->add_option("--seed", run_seed, "episode seed (spawn + action rng)");
    run->add_option("--dump-maps", run_dump, "directory for pgm map dumps");
    run->add_option("--dump-every", run_dump_every, "dump every Nth step (default: first and final)");
    run->add_option("--csv", run_csv, "write the episode row to a csv file");
    add_policy_flags(run, run_p);

    // bench
    auto* bench = app.add_subcommand("bench", "paired benchmark suite");
    uint64_t bench_seed = 7;
    int bench_eps = 100, bench_workers = 1;
    double bench_alpha = 0.05;
    std::vector<std::string> bench_policies{"full", "no_sto", "no_oto", "greedy_frontier", "random_walk"};
    std::string bench_out = "bench_out";
    WorldGenFlags bench_w;
    PolicyFlags bench_p;
    bench->add_option("--seed", bench_seed, "master seed (worlds + spawns)");
    bench->add_option("--episodes", bench_eps, "episodes per policy");
    bench->add_option("--policies", bench_policies, "policies to pair")->delimiter(',');
    bench->add_option("--out", bench_out, "output directory (per-policy csv + report.txt)");
    bench->add_option("--workers", bench_workers, "worker threads");
    bench->add_option("--alpha", bench_alpha, "significance level before Bonferroni");
    add_worldgen_flags(bench, bench_w);
    add_policy_flags(bench, bench_p, /*with_policy=*/false);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "scalability sweep over K");
    uint64_t sweep_seed = 7;
    int sweep_succ = 100, sweep_cap = 500, sweep_workers = 1;
    std::vector<int> sweep_ks;
    std::string sweep_out, sweep_policy = "full";
    WorldGenFlags sweep_w;
    PolicyFlags sweep_p;
    sweep->add_option("--seed", sweep_seed, "master seed");
    sweep->add_option("--successes", sweep_succ, "successful episodes per K");
    sweep->add_option("--cap", sweep_cap, "attempt cap per K");
    sweep->add_option("--ks", sweep_ks, "K values (default 1..8)")->delimiter(',');
    sweep->add_option("--policy", sweep_policy, "policy to sweep");
    sweep->add_option("--out", sweep_out, "output csv");
    sweep->add_option("--workers", sweep_workers, "worker threads");
    add_worldgen_flags(sweep, sweep_w);
    add_policy_flags(sweep, sweep_p, /*with_policy=*/false);

    // stats
    auto* stats = app.add_subcommand("stats", "Wilcoxon signed-rank over two paired csv files");
    std::string stats_a, stats_b, stats_metric = "spl";
    double stats_alpha = 0.05;
    stats->add_option("--a", stats_a, "first csv")->required();
    stats->add_option("--b", stats_b, "second csv")->required();
    stats->add_option("--alpha", stats_alpha, "significance level");
    stats->add_option("--metric", stats_metric, "spl|success|steps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(gen_seed, gen_count, gen_w, gen_out, gen_sim);
        if (run->parsed())
            return cmd_run(run_scn, run_sim, run_p, run_seed, run_dump, run_dump_every, run_csv);
        if (bench->parsed())
            return cmd_bench(bench_seed, bench_eps, bench_policies, bench_w, bench_p, bench_out,
                             bench_workers, bench_alpha);
        if (sweep->parsed())
            return cmd_sweep(sweep_seed, sweep_succ, sweep_cap, sweep_ks, sweep_w, sweep_p, sweep_policy,
                             sweep_out, sweep_workers);
        if (stats->parsed()) return cmd_stats(stats_a, stats_b, stats_alpha, stats_metric);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
