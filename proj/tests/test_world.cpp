#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "finder/rng.hpp"
#include "finder/scenario_io.hpp"
#include "finder/world.hpp"
#include "finder/worldgen.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace finder;
using helpers::ascii_world;

TEST_CASE("generate_world is deterministic in seed and params", "[world][gen]") {
    WorldGenParams params = default_worldgen_params();
    GridWorld a = generate_world(7, params);
    GridWorld b = generate_world(7, params);
    CHECK(a == b);

    GridWorld c = generate_world(8, params);
    CHECK_FALSE(a.scene_objects == c.scene_objects);

    validate_world(a);
    CHECK(a.width == 64);
    CHECK(a.room_types == 5);
    CHECK(a.class_count == 20);
    CHECK(a.targets.size() == 3);
}

TEST_CASE("generate_world rejects bad params", "[world][gen]") {
    WorldGenParams params = default_worldgen_params();
    params.target_classes.clear();
    CHECK_THROWS_WITH(generate_world(7, params), Catch::Matchers::ContainsSubstring("K out of range"));

    params = default_worldgen_params();
    params.target_classes = {0, 1, 2, 3, 4, 5, 6, 7, 8};  // 9 targets
    CHECK_THROWS_WITH(generate_world(7, params), Catch::Matchers::ContainsSubstring("K out of range"));

    params = default_worldgen_params();
    params.affinity[0] = 1.5;
    CHECK_THROWS_AS(generate_world(7, params), GenerationError);
}

TEST_CASE("enclosed robot sees only itself and the blocking faces", "[world][observe]") {
    GridWorld w = ascii_world({
        ".....",
        "..#..",
        ".#.#.",
        "..#..",
        ".....",
    });
    RobotState robot{{2, 2}, 0};
    SensorConfig sensor{10.0, 360.0};
    Observation obs = observe(w, robot, sensor);

    std::vector<Cell> cells;
    for (auto& v : obs.visible) cells.push_back(v.cell);
    std::sort(cells.begin(), cells.end());
    std::vector<Cell> expected{{2, 1}, {1, 2}, {2, 2}, {3, 2}, {2, 3}};
    std::sort(expected.begin(), expected.end());
    CHECK(cells == expected);
    CHECK(obs.detections.empty());
    for (auto& v : obs.visible) CHECK(v.occluding == (v.cell != robot.cell));
}

TEST_CASE("object outside the half-fov is not detected", "[world][observe]") {
    GridWorld w = ascii_world({
        "......",
        "......",
        "......",
        "......",
        "......",
        "......",
    });
    helpers::add_object(w, 0, {4, 4});  // 45 degrees off a 0-degree heading from (0,0)
    RobotState robot{{0, 0}, 0};
    Observation obs = observe(w, robot, SensorConfig{10.0, 79.0});
    CHECK(obs.detections.empty());

    // Widening the cone past 90 degrees brings it into view.
    obs = observe(w, robot, SensorConfig{10.0, 91.0});
    REQUIRE(obs.detections.size() == 1);
    CHECK(obs.detections[0].cell == Cell{4, 4});
}

TEST_CASE("open room with 360 fov is fully visible", "[world][observe][oracle]") {
    std::vector<std::string> rows(11, std::string(11, '.'));
    GridWorld w = ascii_world(rows);
    RobotState robot{{5, 5}, 0};
    SensorConfig sensor{10.0, 360.0};
    Observation obs = observe(w, robot, sensor);
    CHECK(obs.visible.size() == 121);

    // Brute-force oracle agrees cell by cell.
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 11; ++x) CHECK(oracles::cell_visible_brute(w, robot, sensor, Cell{x, y}));
    CHECK(obs.room_histogram[0] == 121);
}

TEST_CASE("visibility matches the brute-force oracle on obstacle fixtures", "[world][observe][oracle]") {
    GridWorld w = ascii_world({
        "........",
        "..##....",
        "........",
        "....#...",
        "........",
        "........",
    });
    for (int heading : {0, 90, 180, 270}) {
        RobotState robot{{1, 3}, heading};
        SensorConfig sensor{6.0, 79.0};
        Observation obs = observe(w, robot, sensor);
        std::set<std::pair<int, int>> vis;
        for (auto& v : obs.visible) vis.insert({v.cell.x, v.cell.y});
        for (int y = 0; y < w.height; ++y)
            for (int x = 0; x < w.width; ++x) {
                bool brute = oracles::cell_visible_brute(w, robot, sensor, Cell{x, y});
                INFO("cell " << x << "," << y << " heading " << heading);
                CHECK(vis.count({x, y}) == static_cast<size_t>(brute));
            }
    }
}

TEST_CASE("detected objects are never behind obstacles", "[world][observe][property]") {
    WorldGenParams params = default_worldgen_params();
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        GridWorld w = generate_world(seed, params);
        Rng rng(seed);
        std::vector<Cell> spawns = valid_spawn_cells(w);
        for (int trial = 0; trial < 25; ++trial) {
            RobotState robot{spawns[rng.uniform_int(0, static_cast<int>(spawns.size()) - 1)],
                             30 * rng.uniform_int(0, 11)};
            Observation obs = observe(w, robot, SensorConfig{});
            for (const auto& d : obs.detections) {
                CHECK(line_of_sight(w, robot.cell, d.cell));
                CHECK(w.scene_objects[d.object_index].cell == d.cell);
            }
            // Histogram counts exactly the visible free cells.
            int free_count = 0;
            for (const auto& v : obs.visible)
                if (!v.occluding) ++free_count;
            int hist_sum = 0;
            for (int h : obs.room_histogram) hist_sum += h;
            CHECK(hist_sum == free_count);
        }
    }
}

TEST_CASE("step kinematics", "[world][step]") {
    GridWorld w = ascii_world({
        "....",
        ".#..",
        "....",
    });
    MotionConfig motion{30};

    SECTION("forward east onto a free cell") {
        StepResult r = step(w, RobotState{{0, 0}, 0}, Action::Forward, motion);
        CHECK(r.robot.cell == Cell{1, 0});
        CHECK_FALSE(r.blocked);
    }
    SECTION("forward into an obstacle is a flagged no-op") {
        StepResult r = step(w, RobotState{{0, 1}, 0}, Action::Forward, motion);
        CHECK(r.robot.cell == Cell{0, 1});
        CHECK(r.blocked);
    }
    SECTION("forward off the map edge is blocked") {
        StepResult r = step(w, RobotState{{0, 0}, 180}, Action::Forward, motion);
        CHECK(r.blocked);
    }
    SECTION("turns move the heading on the 30 degree lattice") {
        StepResult r = step(w, RobotState{{0, 0}, 0}, Action::TurnLeft, motion);
        CHECK(r.robot.heading_deg == 30);
        r = step(w, RobotState{{0, 0}, 0}, Action::TurnRight, motion);
        CHECK(r.robot.heading_deg == 330);
        r = step(w, RobotState{{0, 0}, 0}, Action::Stop, motion);
        CHECK(r.robot == RobotState{{0, 0}, 0});
    }
    SECTION("forward snaps to the nearest grid direction") {
        // Heading 30 snaps to the (1,1) diagonal.
        StepResult r = step(w, RobotState{{2, 0}, 30}, Action::Forward, motion);
        CHECK(r.robot.cell == Cell{3, 1});
        // Heading 60 also snaps to the diagonal; heading 90 goes straight +y.
        r = step(w, RobotState{{2, 0}, 90}, Action::Forward, motion);
        CHECK(r.robot.cell == Cell{2, 1});
    }
}

TEST_CASE("shortest_path_len basics and corridor fixture", "[world][path]") {
    GridWorld corridor = ascii_world({"....."});
    CHECK(shortest_path_len(corridor, {0, 0}, {0, 0}) == 0);
    CHECK(shortest_path_len(corridor, {0, 0}, {4, 0}) == 4);

    GridWorld split = ascii_world({
        "..#..",
        "..#..",
        "..#..",
    });
    CHECK_FALSE(shortest_path_len(split, {0, 0}, {4, 0}).has_value());
    CHECK_THROWS_AS(shortest_path_len(split, {2, 0}, {0, 0}), WorldError);
}

TEST_CASE("shortest_path_len equals the Dijkstra oracle and is symmetric", "[world][path][oracle]") {
    WorldGenParams params = default_worldgen_params();
    params.width = 32;
    params.height = 32;
    params.min_rooms = 4;
    params.max_rooms = 7;
    for (uint64_t seed : {11ull, 12ull, 13ull}) {
        GridWorld w = generate_world(seed, params);
        std::vector<Cell> spawns = valid_spawn_cells(w);
        Rng rng(seed * 31 + 1);
        for (int trial = 0; trial < 20; ++trial) {
            Cell a = spawns[rng.uniform_int(0, static_cast<int>(spawns.size()) - 1)];
            Cell b = spawns[rng.uniform_int(0, static_cast<int>(spawns.size()) - 1)];
            auto ours = shortest_path_len(w, a, b);
            auto ref = oracles::dijkstra_distance(w, a, b);
            CHECK(ours == ref);
            CHECK(ours == shortest_path_len(w, b, a));
        }
    }
}

TEST_CASE("observation and step sequences are fully deterministic", "[world][property]") {
    WorldGenParams params = default_worldgen_params();
    GridWorld w = generate_world(21, params);
    auto run_trace = [&] {
        RobotState robot = {valid_spawn_cells(w)[5], 60};
        MotionConfig motion{30};
        SensorConfig sensor{};
        std::ostringstream trace;
        Rng rng(99);
        for (int i = 0; i < 60; ++i) {
            Observation obs = observe(w, robot, sensor);
            trace << obs.visible.size() << ':' << obs.detections.size() << ';';
            Action a = static_cast<Action>(rng.uniform_int(0, 2));
            StepResult r = step(w, robot, a, motion);
            robot = r.robot;
            CHECK(w.is_free(robot.cell));  // closure: robot stays on free cells
        }
        return trace.str();
    };
    CHECK(run_trace() == run_trace());
}

TEST_CASE("scenario round-trips and validates", "[world][io]") {
    WorldGenParams params = default_worldgen_params();
    GridWorld w = generate_world(42, params);

    std::ostringstream out;
    save_scenario(out, w);
    std::istringstream in(out.str());
    GridWorld back = load_scenario(in);
    CHECK(back == w);

    // Canonical text is stable under a second round trip.
    std::ostringstream out2;
    save_scenario(out2, back);
    CHECK(out.str() == out2.str());
}

TEST_CASE("scenario loader reports malformed input", "[world][io]") {
    auto load_str = [](const std::string& s) {
        std::istringstream in(s);
        return load_scenario(in);
    };
    CHECK_THROWS_WITH(load_str("bogus\n"), Catch::Matchers::ContainsSubstring("bad magic"));

    WorldGenParams params = default_worldgen_params();
    GridWorld w = generate_world(42, params);
    std::ostringstream out;
    save_scenario(out, w);
    std::string good = out.str();

    // Break a map row.
    std::string bad = good;
    bad.replace(bad.find("\n.") + 1, 1, "x");
    CHECK_THROWS_AS(load_str(bad), ScenarioError);

    // Drop the target list.
    std::string no_targets = good.substr(0, good.find("tgt "));
    CHECK_THROWS_WITH(load_str(no_targets), Catch::Matchers::ContainsSubstring("target count mismatch"));

    // Point a target at a missing object.
    std::string bad_target = good.substr(0, good.find("tgt ")) + "tgt 9999\ntgt 0\ntgt 1\n";
    CHECK_THROWS_AS(load_str(bad_target), ScenarioError);
}
