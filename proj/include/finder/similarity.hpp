#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "finder/textio.hpp"
#include "finder/world.hpp"
#include "finder/worldgen.hpp"

namespace finder {

struct SimilarityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pluggable stand-in for a vision-language model. Holds the object-level
/// cooccurrence matrix W (L x K, entries in [0,1]) and the scene-level
/// room-affinity matrix A (R x K). Immutable after load; freely shareable.
struct SimilarityTable {
    int class_count = 0;   // L
    int target_count = 0;  // K
    int room_types = 0;    // R
    std::vector<std::string> class_names;   // L
    std::vector<std::string> target_names;  // K, each must also be a class name
    std::vector<double> w;                  // L x K row-major
    std::vector<double> room_affinity;      // R x K row-major

    double w_at(int class_id, int target_index) const {
        return w[static_cast<size_t>(class_id) * target_count + target_index];
    }
    double affinity_at(int room_type, int target_index) const {
        return room_affinity[static_cast<size_t>(room_type) * target_count + target_index];
    }
    /// Class id a target column refers to (resolved through its name).
    int target_class(int target_index) const {
        const std::string& name = target_names[target_index];
        for (int c = 0; c < class_count; ++c)
            if (class_names[c] == name) return c;
        throw SimilarityError("target name '" + name + "' is not a class name");
    }

    friend bool operator==(const SimilarityTable&, const SimilarityTable&) = default;
};

/// Validates internal invariants: dimensions, [0,1] ranges, unique names,
/// self-similarity 1 for each target's own class.
inline void validate_similarity(const SimilarityTable& t) {
    if (t.class_count < 1 || t.target_count < 1 || t.room_types < 1)
        throw SimilarityError("similarity table dimensions must be positive");
    if (static_cast<int>(t.class_names.size()) != t.class_count ||
        static_cast<int>(t.target_names.size()) != t.target_count)
        throw SimilarityError("similarity name count mismatch");
    if (t.w.size() != static_cast<size_t>(t.class_count) * t.target_count)
        throw SimilarityError("W block must be L x K");
    if (t.room_affinity.size() != static_cast<size_t>(t.room_types) * t.target_count)
        throw SimilarityError("A block must be R x K");
    std::unordered_set<std::string> seen;
    for (const auto& n : t.class_names)
        if (!seen.insert(n).second) throw SimilarityError("duplicate class name '" + n + "'");
    for (double v : t.w)
        if (!(v >= 0.0 && v <= 1.0)) throw SimilarityError("similarity out of range");
    for (double v : t.room_affinity)
        if (!(v >= 0.0 && v <= 1.0)) throw SimilarityError("room affinity out of range");
    for (int j = 0; j < t.target_count; ++j) {
        if (t.w_at(t.target_class(j), j) != 1.0)
            throw SimilarityError("target '" + t.target_names[j] + "' must have self-similarity 1");
    }
}

/// Checks a table against a world before an episode: L, K, R must match and
/// each target column must refer to the class of the world's target object.
inline void bind_similarity(const SimilarityTable& t, const GridWorld& world) {
    if (t.class_count != world.class_count)
        throw SimilarityError("similarity table L mismatch: table " + std::to_string(t.class_count) +
                              ", world " + std::to_string(world.class_count));
    if (t.target_count != world.target_count())
        throw SimilarityError("similarity table K mismatch: table " + std::to_string(t.target_count) +
                              ", world " + std::to_string(world.target_count()));
    if (t.room_types != world.room_types)
        throw SimilarityError("similarity table R mismatch: table " + std::to_string(t.room_types) +
                              ", world " + std::to_string(world.room_types));
    for (int j = 0; j < t.target_count; ++j)
        if (t.target_class(j) != world.target_class(j))
            throw SimilarityError("target column " + std::to_string(j) + " class mismatch");
}

/// Scene-level semantic score of one observation for target j: the
/// room-affinity of the view, averaged over visible free cells. An empty
/// histogram (robot facing a wall) scores 0 by definition.
inline double scene_score(const Observation& obs, int target_index, const SimilarityTable& t) {
    if (target_index < 0 || target_index >= t.target_count)
        throw SimilarityError("scene_score: target index out of range");
    if (static_cast<int>(obs.room_histogram.size()) != t.room_types)
        throw SimilarityError("scene_score: histogram size mismatch");
    long long total = 0;
    double weighted = 0.0;
    for (int r = 0; r < t.room_types; ++r) {
        total += obs.room_histogram[r];
        weighted += obs.room_histogram[r] * t.affinity_at(r, target_index);
    }
    if (total == 0) return 0.0;
    return weighted / static_cast<double>(total);
}

/// Object-level cooccurrence similarity w_ij, a table lookup.
inline double object_similarity(int class_id, int target_index, const SimilarityTable& t) {
    if (class_id < 0 || class_id >= t.class_count)
        throw SimilarityError("object_similarity: class id out of range");
    if (target_index < 0 || target_index >= t.target_count)
        throw SimilarityError("object_similarity: target index out of range");
    return t.w_at(class_id, target_index);
}

inline constexpr const char* kSimilarityMagic = "finder-similarity v1";

// Similarity format, line oriented:
//   finder-similarity v1
//   classes L / targets K / rooms R
//   class <name>    x L
//   target <name>   x K
//   W               followed by L rows of K decimals
//   A               followed by R rows of K decimals
inline void save_similarity(std::ostream& out, const SimilarityTable& t) {
    out << kSimilarityMagic << '\n';
    out << "classes " << t.class_count << '\n';
    out << "targets " << t.target_count << '\n';
    out << "rooms " << t.room_types << '\n';
    for (const auto& n : t.class_names) out << "class " << n << '\n';
    for (const auto& n : t.target_names) out << "target " << n << '\n';
    out << "W\n";
    for (int i = 0; i < t.class_count; ++i) {
        for (int j = 0; j < t.target_count; ++j) out << (j ? " " : "") << format_double(t.w_at(i, j));
        out << '\n';
    }
    out << "A\n";
    for (int r = 0; r < t.room_types; ++r) {
        for (int j = 0; j < t.target_count; ++j) out << (j ? " " : "") << format_double(t.affinity_at(r, j));
        out << '\n';
    }
}

inline SimilarityTable load_similarity(std::istream& in) {
    LineReader reader(in);
    auto fail = [&](const std::string& msg) -> SimilarityError {
        return SimilarityError("similarity line " + std::to_string(reader.line_no()) + ": " + msg);
    };

    if (reader.require("magic line") != kSimilarityMagic)
        throw fail("bad magic, expected 'finder-similarity v1'");
    auto keyed_int = [&](const std::string& key) {
        auto parts = split_ws(reader.require(key));
        if (parts.size() != 2 || parts[0] != key) throw fail("expected '" + key + " <value>'");
        return static_cast<int>(parse_int(parts[1], key));
    };
    SimilarityTable t;
    t.class_count = keyed_int("classes");
    t.target_count = keyed_int("targets");
    t.room_types = keyed_int("rooms");
    if (t.class_count < 1 || t.target_count < 1 || t.room_types < 1)
        throw fail("dimensions must be positive");

    for (int i = 0; i < t.class_count; ++i) {
        auto parts = split_ws(reader.require("class name"));
        if (parts.size() != 2 || parts[0] != "class") throw fail("expected 'class <name>'");
        t.class_names.emplace_back(parts[1]);
    }
    for (int j = 0; j < t.target_count; ++j) {
        auto parts = split_ws(reader.require("target name"));
        if (parts.size() != 2 || parts[0] != "target") throw fail("expected 'target <name>'");
        t.target_names.emplace_back(parts[1]);
    }

    auto read_block = [&](const std::string& header, int rows, std::vector<double>& dst) {
        if (reader.require(header + " header") != header) throw fail("expected '" + header + "'");
        for (int r = 0; r < rows; ++r) {
            auto parts = split_ws(reader.require(header + " row"));
            if (static_cast<int>(parts.size()) != t.target_count)
                throw fail(header + " row has wrong entry count");
            for (auto p : parts) {
                double v = parse_double(p, header + " entry");
                if (!(v >= 0.0 && v <= 1.0)) throw fail("similarity out of range: " + std::string(p));
                dst.push_back(v);
            }
        }
    };
    read_block("W", t.class_count, t.w);
    read_block("A", t.room_types, t.room_affinity);

    try {
        validate_similarity(t);
    } catch (const SimilarityError& e) {
        throw SimilarityError(std::string("similarity invalid: ") + e.what());
    }
    return t;
}

inline void save_similarity_file(const std::string& path, const SimilarityTable& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimilarityError("cannot open for writing: " + path);
    save_similarity(out, t);
    if (!out) throw SimilarityError("write failed: " + path);
}

inline SimilarityTable load_similarity_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SimilarityError("cannot open: " + path);
    return load_similarity(in);
}

namespace detail {

/// Room-type distribution of one class under the generator: rooms draw their
/// type uniformly from 1..R-1 and class c within a type-r room with
/// probability proportional to affinity(c, r).
inline std::vector<double> class_room_distribution(const WorldGenParams& params, int class_id) {
    int R = params.room_types;
    std::vector<double> type_totals(R, 0.0);
    for (int r = 1; r < R; ++r)
        for (int c = 0; c < params.class_count; ++c) type_totals[r] += params.affinity_at(c, r);
    std::vector<double> v(R, 0.0);
    double sum = 0.0;
    for (int r = 1; r < R; ++r) {
        if (type_totals[r] <= 0.0) continue;
        v[r] = params.affinity_at(class_id, r) / type_totals[r];  // ∝ q_r * P(c | r), q uniform
        sum += v[r];
    }
    if (sum > 0.0)
        for (double& x : v) x /= sum;
    return v;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

}  // namespace detail

/// Synthetic similarity model derived from the generator's own placement
/// distribution. w_ij is the same-room-type cooccurrence of class i with
/// target class j, normalized as the cosine of their room-type distributions
/// (so a class scores 1 against itself and 0 against room-disjoint classes).
/// The scene-level block is the generator's affinity table for the target
/// classes. Fully analytic, hence trivially deterministic in the seed.
inline SimilarityTable synthetic_similarity(uint64_t /*seed*/, const WorldGenParams& params) {
    SimilarityTable t;
    t.class_count = params.class_count;
    t.target_count = params.k();
    t.room_types = params.room_types;
    for (int c = 0; c < params.class_count; ++c) t.class_names.push_back("class" + std::to_string(c));
    for (int tc : params.target_classes) t.target_names.push_back("class" + std::to_string(tc));

    std::vector<std::vector<double>> dist(params.class_count);
    for (int c = 0; c < params.class_count; ++c) dist[c] = detail::class_room_distribution(params, c);

    t.w.resize(static_cast<size_t>(t.class_count) * t.target_count);
    for (int i = 0; i < t.class_count; ++i)
        for (int j = 0; j < t.target_count; ++j) {
            double v = detail::cosine(dist[i], dist[params.target_classes[j]]);
            // Clamp fp noise so the [0,1] invariant and the self-similarity
            // convention hold exactly.
            if (i == params.target_classes[j]) v = 1.0;
            t.w[static_cast<size_t>(i) * t.target_count + j] = std::min(1.0, std::max(0.0, v));
        }

    t.room_affinity.resize(static_cast<size_t>(t.room_types) * t.target_count);
    for (int r = 0; r < t.room_types; ++r)
        for (int j = 0; j < t.target_count; ++j)
            t.room_affinity[static_cast<size_t>(r) * t.target_count + j] =
                params.affinity_at(params.target_classes[j], r);

    validate_similarity(t);
    return t;
}

}  // namespace finder
