#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "finder/mapping.hpp"
#include "finder/similarity.hpp"

namespace finder {

enum class ScoreKind { SceneToObject, ObjectToObject };

/// Multi-channel score map, one channel per remaining target. Channels are
/// keyed by the original target index and dropped outright when a target is
/// found, so fusion never re-attracts the robot to completed targets. The
/// StO stack also owns the accumulated confidence map driving its temporal
/// updates.
struct ScoreStack {
    ScoreKind kind = ScoreKind::SceneToObject;
    std::vector<int> target_ids;          // original target indices, channel order
    std::vector<Grid<double>> channels;   // one H x W grid per remaining target
    ConfidenceMap confidence;             // accumulated (StO kind only)

    int channel_count() const { return static_cast<int>(channels.size()); }
    int channel_of(int target_id) const {
        for (size_t i = 0; i < target_ids.size(); ++i)
            if (target_ids[i] == target_id) return static_cast<int>(i);
        return -1;
    }
};

inline ScoreStack make_score_stack(ScoreKind kind, int width, int height, std::span<const int> target_ids) {
    ScoreStack s;
    s.kind = kind;
    s.target_ids.assign(target_ids.begin(), target_ids.end());
    s.channels.assign(target_ids.size(), Grid<double>(width, height, 0.0));
    if (kind == ScoreKind::SceneToObject) s.confidence = ConfidenceMap(width, height, 0.0);
    return s;
}

/// Temporal scene-to-object update. Per channel j the instantaneous map is
/// cone * s_j, blended into the accumulator by confidence weighting:
///   V <- (C_now ⊙ (cone * s_j) + C_prev ⊙ V_prev) / (C_now + C_prev)
/// with 0/0 defined as 0. Afterwards the stack's confidence advances by the
/// ratio-of-squares fusion. Scores must have one entry per remaining target.
inline void sto_update(ScoreStack& stack, const ConfidenceMap& cone, std::span<const double> scene_scores) {
    if (stack.kind != ScoreKind::SceneToObject)
        throw std::invalid_argument("sto_update: stack is not scene-to-object");
    if (scene_scores.size() != stack.channels.size())
        throw std::invalid_argument("sto_update: need one scene score per remaining target");
    if (cone.width() != stack.confidence.width() || cone.height() != stack.confidence.height())
        throw std::invalid_argument("sto_update: cone dimension mismatch");
    for (size_t j = 0; j < stack.channels.size(); ++j) {
        Grid<double>& v = stack.channels[j];
        const double s = scene_scores[j];
        for (size_t i = 0; i < v.size(); ++i) {
            double c_now = cone[i], c_prev = stack.confidence[i];
            double denom = c_now + c_prev;
            if (denom > 0.0) v[i] = (c_now * (c_now * s) + c_prev * v[i]) / denom;
        }
    }
    stack.confidence = fuse_confidence(cone, stack.confidence);
}

/// Object-to-object score map, recomputed from scratch: channel j is the sum
/// over classes of the semantic presence map weighted by w_ij.
inline ScoreStack oto_compute(const SemanticMap& sem, const SimilarityTable& table,
                              std::span<const int> remaining_targets, int width, int height) {
    if (sem.class_count() != table.class_count)
        throw SimilarityError("oto_compute: semantic map L mismatch");
    ScoreStack s = make_score_stack(ScoreKind::ObjectToObject, width, height, remaining_targets);
    for (size_t j = 0; j < s.target_ids.size(); ++j) {
        Grid<double>& ch = s.channels[j];
        for (int i = 0; i < sem.class_count(); ++i) {
            double wij = object_similarity(i, s.target_ids[j], table);
            if (wij == 0.0) continue;
            for (Cell c : sem.marked(i)) ch.at(c) += wij;
        }
    }
    return s;
}

/// Min-max normalization to [0,1]. A constant channel has no contrast to
/// offer frontier ranking and maps to all zeros.
inline Grid<double> normalize_channel(const Grid<double>& channel) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : channel) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Grid<double> out(channel.width(), channel.height(), 0.0);
    if (!(hi > lo)) return out;
    // Divide rather than multiply by a reciprocal: the maximum then maps to
    // exactly 1 and normalization is exactly idempotent.
    double span = hi - lo;
    for (size_t i = 0; i < channel.size(); ++i) out[i] = (channel[i] - lo) / span;
    return out;
}

/// Sum of independently normalized channels of one stack.
inline Grid<double> sum_normalized(const ScoreStack& stack, int width, int height) {
    Grid<double> out(width, height, 0.0);
    for (const Grid<double>& ch : stack.channels) {
        Grid<double> n = normalize_channel(ch);
        for (size_t i = 0; i < out.size(); ++i) out[i] += n[i];
    }
    return out;
}

using UnifiedMap = Grid<double>;

/// Unified score map: element-wise sum of the per-channel normalized StO and
/// OtO maps, summed over channels. Values lie in [0, 2K].
inline UnifiedMap fuse(const ScoreStack& sto, const ScoreStack& oto) {
    if (sto.target_ids != oto.target_ids)
        throw std::invalid_argument("fuse: stacks must cover the same remaining targets");
    if (!sto.channels.empty() && !oto.channels.empty() &&
        (sto.channels[0].width() != oto.channels[0].width() ||
         sto.channels[0].height() != oto.channels[0].height()))
        throw std::invalid_argument("fuse: stack dimension mismatch");
    int w = sto.confidence.width(), h = sto.confidence.height();
    UnifiedMap out = sum_normalized(sto, w, h);
    UnifiedMap oto_part = sum_normalized(oto, w, h);
    for (size_t i = 0; i < out.size(); ++i) out[i] += oto_part[i];
    return out;
}

/// Removes a found target's channel from a stack, preserving the remaining
/// channels bit-exact.
inline void drop_target_channel(ScoreStack& stack, int target_id) {
    int ch = stack.channel_of(target_id);
    if (ch < 0) throw std::invalid_argument("drop_target_channel: target not in stack");
    stack.target_ids.erase(stack.target_ids.begin() + ch);
    stack.channels.erase(stack.channels.begin() + ch);
}

}  // namespace finder
