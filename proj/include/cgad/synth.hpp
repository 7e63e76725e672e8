#pragma once

#include "cgad/types.hpp"

#include <cstdint>
#include <optional>

namespace cgad {

enum class PerturbTarget { intra, inter, both };

const char* to_string(PerturbTarget target);
PerturbTarget perturb_target_from_string(const std::string& name);

/// Ground-truth generator parameters. Intra graphs are acyclic by
/// construction; W is rescaled to spectral norm <= 0.9 when the draw
/// exceeds it, and A is rescaled so the reduced-form VAR companion matrix
/// has spectral radius <= 0.9 (keeps simulations stationary).
struct GeneratorSpec {
    int node_count = 8;
    int lag = 1;
    double edge_density = 0.3;
    double weight_min = 0.5;         // > 0
    double weight_max = 2.0;
    double noise_std = 0.1;
    std::uint64_t seed = 0;
    int regime_count = 2;
    int rewired_edges = 4;           // structural perturbation between regimes
    PerturbTarget perturb_target = PerturbTarget::both;

    void validate() const;           // throws Error{InvalidConfig}
};

WeightedDbn random_dbn(const GeneratorSpec& spec);

/// Generative recursion x_t = ([x_{t-1} ... x_{t-p}] A + z_t)(I - W)^{-1}
/// with z_t iid Gaussian(0, noise_std^2); p noise rows plus 100 burn-in
/// steps are discarded. Deterministic given seed.
MultivariateSeries simulate(const WeightedDbn& dbn, Index steps, double noise_std,
                            std::uint64_t seed);

struct TwoRegimeData {
    SegmentedSeries series;              // [N..N, A..A, N..N], labeled
    WeightedDbn normal_truth;
    WeightedDbn attack_truth;
};

/// Attack regime = normal regime with spec.rewired_edges edges rewired
/// (removed and replaced, never re-adding a removed edge) and reweighted;
/// stability rescaling is re-applied after rewiring. Step counts must be
/// multiples of segment_len. sim_seed defaults to a stream derived from
/// spec.seed, so train/test sets can share regimes but not noise.
TwoRegimeData two_regime_dataset(const GeneratorSpec& spec, Index normal_steps,
                                 Index attack_steps, Index segment_len,
                                 std::optional<std::uint64_t> sim_seed = std::nullopt);

} // namespace cgad
