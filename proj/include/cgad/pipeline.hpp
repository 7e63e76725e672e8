#pragma once

#include "cgad/divergence.hpp"
#include "cgad/lagged_design.hpp"
#include "cgad/structure_learning.hpp"
#include "cgad/types.hpp"

#include <cstdint>

namespace cgad {

struct PipelineConfig {
    SolverConfig solver;
    int lag = 1;
    Index segment_len = 900;                 // samples; 15 min at 1 Hz
    double noise_sigma_scale = 0.01;
    DivergenceKind kind = DivergenceKind::shd;
    ShdOptions shd_options;
    bool restandardize_per_segment = false;  // default: reuse training stats
    std::uint64_t seed = 0;

    void validate() const;
};

/// Output of causal profiling: thresholded and weighted reference graphs
/// for each operating regime plus the standardization stats (from the
/// normal-class training design) applied to unseen segments.
struct CausalProfile {
    BinaryDbn g_normal;
    BinaryDbn g_attack;
    WeightedDbn weighted_normal;
    WeightedDbn weighted_attack;
    ColumnStats stats;
    PipelineConfig config;
    std::vector<std::string> sensor_names;

    Index node_count() const { return weighted_normal.node_count(); }
};

/// Adds iid zero-mean Gaussian noise per cell with per-sensor std equal to
/// sigma_scale times that sensor's empirical std pooled over the given
/// segments. sigma_scale = 0 returns the input unchanged (bit-equal).
std::vector<Matrix> inject_noise(const std::vector<Matrix>& segments, double sigma_scale,
                                 std::uint64_t seed);

/// Decision rule shared by every divergence kind: attack iff strictly
/// closer to the attack reference, ties resolve to normal; the score is
/// dist_normal - dist_attack (higher = more attack-like).
struct Decision {
    int predicted = 0;
    double score = 0.0;
};
Decision decide(double dist_attack, double dist_normal);

/// Phase 1: learn reference graphs from labeled training segments
/// (attack segments are noise-regularized first). Throws
/// Error{MissingClass} unless both labels are present. The trace
/// out-params, when given, receive the per-class solver traces.
CausalProfile profile(const SegmentedSeries& train, const PipelineConfig& config,
                      std::vector<std::string> sensor_names = {},
                      SolverTrace* normal_trace = nullptr,
                      SolverTrace* attack_trace = nullptr);

/// Phase 2, one segment: infer its graph, measure divergence to both
/// references, decide attack iff strictly closer to the attack reference
/// (ties -> normal). A non-converging fit yields predicted = 0 with the
/// converged flag cleared instead of an error.
SegmentScore score_segment(const Matrix& segment, const CausalProfile& profile,
                           DivergenceKind kind, Index segment_index = 0);

/// Phase 2, full test set; segments are scored independently (worker
/// threads when workers > 1) and reported in temporal order. Metrics are
/// attached when the test set carries labels.
DetectionReport score_all(const SegmentedSeries& test, const CausalProfile& profile,
                          DivergenceKind kind, int workers = 1);

} // namespace cgad
