#include "cgad/synth.hpp"

#include "cgad/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

namespace cgad {

const char* to_string(PerturbTarget target) {
    switch (target) {
        case PerturbTarget::intra: return "intra";
        case PerturbTarget::inter: return "inter";
        case PerturbTarget::both: return "both";
    }
    return "unknown";
}

PerturbTarget perturb_target_from_string(const std::string& name) {
    if (name == "intra") return PerturbTarget::intra;
    if (name == "inter") return PerturbTarget::inter;
    if (name == "both") return PerturbTarget::both;
    throw Error(ErrorCode::InvalidConfig, "unknown perturb target: " + name);
}

void GeneratorSpec::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidConfig, what);
    };
    require(node_count >= 2, "node_count must be >= 2");
    require(lag >= 0, "lag must be >= 0");
    require(edge_density >= 0.0 && edge_density < 1.0, "edge_density must be in [0,1)");
    require(weight_min > 0.0, "weight_min must be > 0");
    require(weight_max >= weight_min, "weight_max must be >= weight_min");
    require(noise_std > 0.0, "noise_std must be > 0");
    require(regime_count == 2, "only two regimes are supported");
    require(rewired_edges >= 0, "rewired_edges must be >= 0");
}

namespace {

// splitmix64; decorrelates per-purpose child seeds from one user seed
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m.transpose() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

// spectral radius of the reduced-form VAR companion matrix for row-vector
// dynamics x_t = sum_l x_{t-l} * (A_l * (I-W)^{-1})
double companion_radius(const Matrix& intra, const Matrix& inter, int k, int lag) {
    if (lag == 0 || inter.size() == 0) return 0.0;
    const Matrix m = (Matrix::Identity(k, k) - intra).inverse();
    Matrix companion = Matrix::Zero(lag * k, lag * k);
    for (int l = 0; l < lag; ++l) {
        companion.block(0, l * k, k, k) = (inter.middleRows(l * k, k) * m).transpose();
    }
    for (int l = 1; l < lag; ++l) {
        companion.block(l * k, (l - 1) * k, k, k).setIdentity();
    }
    Eigen::EigenSolver<Matrix> solver(companion, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void apply_stability_rescaling(Matrix& intra, Matrix& inter, int k, int lag) {
    const double w_norm = spectral_norm(intra);
    if (w_norm > 0.9) intra *= 0.9 / w_norm;
    if (lag > 0 && companion_radius(intra, inter, k, lag) > 0.9) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (companion_radius(intra, inter * mid, k, lag) <= 0.9 ? lo : hi) = mid;
        }
        inter *= lo;
    }
}

std::vector<std::string> default_names(int k) {
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) names.push_back("s" + std::to_string(i));
    return names;
}

double draw_weight(std::mt19937_64& rng, double lo, double hi) {
    const double magnitude = std::uniform_real_distribution<double>(lo, hi)(rng);
    const double sign = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5 ? 1.0 : -1.0;
    return sign * magnitude;
}

// Kahn topological order of the intra support; generation keeps it acyclic
std::vector<int> topological_order(const Matrix& intra) {
    const int k = static_cast<int>(intra.rows());
    std::vector<int> indegree(k, 0), order;
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) {
            if (intra(j, i) != 0.0) ++indegree[i];
        }
    }
    std::vector<int> queue;
    for (int i = 0; i < k; ++i) {
        if (indegree[i] == 0) queue.push_back(i);
    }
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        order.push_back(v);
        for (int i = 0; i < k; ++i) {
            if (intra(v, i) != 0.0 && --indegree[i] == 0) queue.push_back(i);
        }
    }
    return order;
}

} // namespace

WeightedDbn random_dbn(const GeneratorSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(mix_seed(spec.seed, 0));
    const int k = spec.node_count;

    std::vector<int> order(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) order[static_cast<size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix intra = Matrix::Zero(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            if (unit(rng) < spec.edge_density) {
                intra(order[static_cast<size_t>(a)], order[static_cast<size_t>(b)]) =
                    draw_weight(rng, spec.weight_min, spec.weight_max);
            }
        }
    }
    Matrix inter = Matrix::Zero(spec.lag * k, k);
    for (Index r = 0; r < inter.rows(); ++r) {
        for (Index c = 0; c < inter.cols(); ++c) {
            if (unit(rng) < spec.edge_density) {
                inter(r, c) = draw_weight(rng, spec.weight_min, spec.weight_max);
            }
        }
    }
    apply_stability_rescaling(intra, inter, k, spec.lag);

    WeightedDbn dbn;
    dbn.intra = std::move(intra);
    dbn.inter = std::move(inter);
    dbn.lag = spec.lag;
    dbn.sensor_names = default_names(k);
    return dbn;
}

MultivariateSeries simulate(const WeightedDbn& dbn, Index steps, double noise_std,
                            std::uint64_t seed) {
    const int k = static_cast<int>(dbn.node_count());
    const int p = dbn.lag;
    if (steps <= p) throw Error(ErrorCode::InvalidConfig, "steps must exceed the lag order");

    if (noise_std < 0.0) throw Error(ErrorCode::InvalidConfig, "noise_std must be >= 0");

    constexpr Index kBurnIn = 100;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, noise_std > 0.0 ? noise_std : 1.0);
    // noise_std 0 keeps the trajectory deterministic
    auto draw = [&] { return noise_std > 0.0 ? gauss(rng) : 0.0; };

    const Matrix mixing = (Matrix::Identity(k, k) - dbn.intra).inverse();
    Matrix rows(p + kBurnIn + steps, k);
    for (Index t = 0; t < p; ++t) {
        for (int c = 0; c < k; ++c) rows(t, c) = draw();
    }
    Eigen::RowVectorXd drive(k);
    for (Index t = p; t < rows.rows(); ++t) {
        for (int c = 0; c < k; ++c) drive(c) = draw();
        for (int l = 1; l <= p; ++l) {
            drive += rows.row(t - l) * dbn.inter.middleRows((l - 1) * k, k);
        }
        rows.row(t) = drive * mixing;
    }

    MultivariateSeries series;
    series.values = rows.bottomRows(steps);
    series.sensor_names = dbn.sensor_names;
    return series;
}

namespace {

struct RewirePlan {
    Matrix intra;
    Matrix inter;
};

// Shrink only the freshly added entries until the perturbed system is
// stable again; edges shared with the base regime keep their exact weights,
// so the regimes differ in the rewired edges alone.
void stabilize_added_edges(Matrix& intra, Matrix& inter, int k, int lag,
                           const std::vector<std::pair<int, int>>& added_intra,
                           const std::vector<std::pair<int, int>>& added_inter) {
    auto scaled = [&](double factor) {
        Matrix w = intra;
        Matrix a = inter;
        for (const auto& [r, c] : added_intra) w(r, c) *= factor;
        for (const auto& [r, c] : added_inter) a(r, c) *= factor;
        return std::pair{std::move(w), std::move(a)};
    };
    auto stable = [&](double factor) {
        const auto [w, a] = scaled(factor);
        if (spectral_norm(w) > 0.9) return false;
        return lag == 0 || companion_radius(w, a, k, lag) <= 0.9;
    };
    if (stable(1.0)) return;
    if (!stable(0.0)) {
        // removal alone destabilized the draw; fall back to global rescaling
        apply_stability_rescaling(intra, inter, k, lag);
        return;
    }
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (stable(mid) ? lo : hi) = mid;
    }
    std::tie(intra, inter) = scaled(lo);
}

RewirePlan rewire(const WeightedDbn& base, const GeneratorSpec& spec, std::mt19937_64& rng) {
    const int k = spec.node_count;
    Matrix intra = base.intra;
    Matrix inter = base.inter;

    enum class Slot { intra, inter };
    std::vector<std::pair<Slot, std::pair<int, int>>> pool;
    if (spec.perturb_target != PerturbTarget::inter) {
        for (int j = 0; j < k; ++j) {
            for (int i = 0; i < k; ++i) {
                if (intra(j, i) != 0.0) pool.push_back({Slot::intra, {j, i}});
            }
        }
    }
    if (spec.perturb_target != PerturbTarget::intra) {
        for (Index r = 0; r < inter.rows(); ++r) {
            for (Index c = 0; c < inter.cols(); ++c) {
                if (inter(r, c) != 0.0) {
                    pool.push_back({Slot::inter, {static_cast<int>(r), static_cast<int>(c)}});
                }
            }
        }
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    const size_t count = std::min(pool.size(), static_cast<size_t>(spec.rewired_edges));

    const std::vector<int> order = topological_order(base.intra);
    std::vector<int> position(static_cast<size_t>(k));
    for (int idx = 0; idx < k; ++idx) position[static_cast<size_t>(order[idx])] = idx;

    std::set<std::pair<int, int>> removed_intra, removed_inter;
    std::vector<std::pair<int, int>> added_intra, added_inter;
    std::uniform_int_distribution<int> node(0, k - 1);
    std::uniform_int_distribution<int> lag_row(0, std::max(0, static_cast<int>(inter.rows()) - 1));

    for (size_t e = 0; e < count; ++e) {
        const auto [slot, cell] = pool[e];
        if (slot == Slot::intra) {
            intra(cell.first, cell.second) = 0.0;
            removed_intra.insert(cell);
            // replace with a fresh edge that respects the base topological
            // order (keeps the perturbed graph acyclic) and never re-adds a
            // removed edge, so every rewire changes the support
            for (int attempt = 0; attempt < 10000; ++attempt) {
                const int a = node(rng), b = node(rng);
                if (a == b || position[a] >= position[b]) continue;
                if (intra(a, b) != 0.0 || base.intra(a, b) != 0.0) continue;
                if (removed_intra.count({a, b})) continue;
                intra(a, b) = draw_weight(rng, spec.weight_min, spec.weight_max);
                added_intra.push_back({a, b});
                break;
            }
        } else {
            inter(cell.first, cell.second) = 0.0;
            removed_inter.insert(cell);
            for (int attempt = 0; attempt < 10000; ++attempt) {
                const int r = lag_row(rng), c = node(rng);
                if (inter(r, c) != 0.0 || base.inter(r, c) != 0.0) continue;
                if (removed_inter.count({r, c})) continue;
                inter(r, c) = draw_weight(rng, spec.weight_min, spec.weight_max);
                added_inter.push_back({r, c});
                break;
            }
        }
    }
    stabilize_added_edges(intra, inter, k, spec.lag, added_intra, added_inter);
    return {std::move(intra), std::move(inter)};
}

} // namespace

TwoRegimeData two_regime_dataset(const GeneratorSpec& spec, Index normal_steps,
                                 Index attack_steps, Index segment_len,
                                 std::optional<std::uint64_t> sim_seed) {
    spec.validate();
    if (segment_len < 2) throw Error(ErrorCode::InvalidConfig, "segment_len must be >= 2");
    if (normal_steps % segment_len != 0 || attack_steps % segment_len != 0) {
        throw Error(ErrorCode::InvalidConfig,
                    "step counts must be multiples of segment_len");
    }
    if (segment_len <= spec.lag) {
        throw Error(ErrorCode::InvalidConfig, "segment_len must exceed the lag order");
    }

    TwoRegimeData data;
    data.normal_truth = random_dbn(spec);
    std::mt19937_64 rewire_rng(mix_seed(spec.seed, 1));
    RewirePlan plan = rewire(data.normal_truth, spec, rewire_rng);
    data.attack_truth = data.normal_truth;
    data.attack_truth.intra = std::move(plan.intra);
    data.attack_truth.inter = std::move(plan.inter);

    const std::uint64_t base_seed = sim_seed.value_or(mix_seed(spec.seed, 2));
    const Index normal_segments = normal_steps / segment_len;
    const Index front = (normal_segments + 1) / 2;
    const Index back = normal_segments - front;

    auto append_block = [&](const WeightedDbn& truth, Index block_steps, int label,
                            std::uint64_t seed) {
        if (block_steps == 0) return;
        const MultivariateSeries sim = simulate(truth, block_steps, spec.noise_std, seed);
        for (Index s = 0; s * segment_len < block_steps; ++s) {
            data.series.segments.push_back(sim.values.middleRows(s * segment_len, segment_len));
            data.series.labels->push_back(label);
        }
    };

    data.series.labels.emplace();
    append_block(data.normal_truth, front * segment_len, 0, mix_seed(base_seed, 10));
    append_block(data.attack_truth, attack_steps, 1, mix_seed(base_seed, 11));
    append_block(data.normal_truth, back * segment_len, 0, mix_seed(base_seed, 12));
    return data;
}

} // namespace cgad
