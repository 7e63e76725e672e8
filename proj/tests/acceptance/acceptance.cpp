// Acceptance suite: one self-contained check per criterion, each printing a
// single PASS/FAIL line. Run with a criterion number (1-8) or no argument
// for the full suite. Criterion 8 shells out to the CLI binary, whose path
// is the optional second argument.

#include "cgad/divergence.hpp"
#include "cgad/evaluation.hpp"
#include "cgad/io.hpp"
#include "cgad/lagged_design.hpp"
#include "cgad/pipeline.hpp"
#include "cgad/structure_learning.hpp"
#include "cgad/synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace cgad;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------
// helpers

Matrix random_dag_weights(int k, double density, double lo, double hi, std::mt19937_64& rng) {
    std::vector<int> order(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) order[static_cast<size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> weight(lo, hi);
    Matrix w = Matrix::Zero(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            if (unit(rng) < density) {
                const double sign = unit(rng) < 0.5 ? 1.0 : -1.0;
                w(order[static_cast<size_t>(a)], order[static_cast<size_t>(b)]) =
                    sign * weight(rng);
            }
        }
    }
    return w;
}

// acyclic background plus one directed cycle with entries in [0.5, 2]
Matrix random_cyclic_weights(int k, std::mt19937_64& rng) {
    Matrix w = random_dag_weights(k, 0.2, 0.5, 2.0, rng);
    std::uniform_int_distribution<int> length_dist(2, std::min(k, 5));
    const int length = length_dist(rng);
    std::vector<int> nodes(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) nodes[static_cast<size_t>(i)] = i;
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::uniform_real_distribution<double> weight(0.5, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int e = 0; e < length; ++e) {
        const double sign = unit(rng) < 0.5 ? 1.0 : -1.0;
        w(nodes[static_cast<size_t>(e)], nodes[static_cast<size_t>((e + 1) % length)]) =
            sign * weight(rng);
    }
    return w;
}

bool support_has_cycle(const Matrix& w) {
    BinaryDbn g;
    g.node_count = static_cast<int>(w.rows());
    g.lag = 0;
    for (int j = 0; j < g.node_count; ++j) {
        for (int i = 0; i < g.node_count; ++i) {
            if (i != j && w(j, i) != 0.0) g.intra_edges.emplace(j, i);
        }
    }
    return !intra_is_acyclic(g);
}

LaggedDesign random_design(int rows, int k, int lag, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    LaggedDesign d;
    d.lag = lag;
    d.current.resize(rows, k);
    d.lagged.resize(rows, lag * k);
    for (Index r = 0; r < d.current.rows(); ++r) {
        for (Index c = 0; c < d.current.cols(); ++c) d.current(r, c) = gauss(rng);
        for (Index c = 0; c < d.lagged.cols(); ++c) d.lagged(r, c) = gauss(rng);
    }
    return d;
}

double support_f1(const Matrix& estimated, const Matrix& truth, double threshold) {
    long tp = 0, fp = 0, fn = 0;
    for (Index r = 0; r < truth.rows(); ++r) {
        for (Index c = 0; c < truth.cols(); ++c) {
            const bool est = std::abs(estimated(r, c)) > threshold;
            const bool tru = truth(r, c) != 0.0;
            tp += est && tru;
            fp += est && !tru;
            fn += !est && tru;
        }
    }
    if (tp == 0) return (fp + fn) == 0 ? 1.0 : 0.0;
    const double precision = double(tp) / double(tp + fp);
    const double recall = double(tp) / double(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

BinaryDbn random_graph(int k, int lag, double density, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    BinaryDbn g;
    g.node_count = k;
    g.lag = lag;
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) {
            if (i != j && unit(rng) < density) g.intra_edges.emplace(j, i);
        }
    }
    for (int l = 1; l <= lag; ++l) {
        for (int j = 0; j < k; ++j) {
            for (int i = 0; i < k; ++i) {
                if (unit(rng) < density) g.inter_edges.emplace(j, l, i);
            }
        }
    }
    return g;
}

// brute-force symmetric difference via linear scans over edge vectors
long brute_force_shd(const BinaryDbn& g1, const BinaryDbn& g2) {
    std::vector<IntraEdge> e1(g1.intra_edges.begin(), g1.intra_edges.end());
    std::vector<IntraEdge> e2(g2.intra_edges.begin(), g2.intra_edges.end());
    std::vector<InterEdge> f1(g1.inter_edges.begin(), g1.inter_edges.end());
    std::vector<InterEdge> f2(g2.inter_edges.begin(), g2.inter_edges.end());
    long count = 0;
    auto tally = [&count](const auto& a, const auto& b) {
        for (const auto& e : a) {
            bool found = false;
            for (const auto& o : b) found = found || (o == e);
            count += found ? 0 : 1;
        }
    };
    tally(e1, e2);
    tally(e2, e1);
    tally(f1, f2);
    tally(f2, f1);
    return count;
}

// end-to-end detection on a two-regime dataset; fit_lag lets criterion 6
// run the same data through the static (p = 0) pipeline
DetectionReport run_detection(const GeneratorSpec& spec, Index segment_len, int fit_lag) {
    PipelineConfig config;
    config.lag = fit_lag;
    config.segment_len = segment_len;
    config.seed = spec.seed;

    const TwoRegimeData train =
        two_regime_dataset(spec, 20 * segment_len, 20 * segment_len, segment_len);
    const TwoRegimeData test =
        two_regime_dataset(spec, 20 * segment_len, 20 * segment_len, segment_len,
                           spec.seed * 7919 + 1);
    const CausalProfile prof = profile(train.series, config);
    return score_all(test.series, prof, config.kind, 2);
}

// ---------------------------------------------------------------------------
// criteria

Outcome criterion1() {
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> size(2, 8);
    double worst_acyclic = 0.0;
    double worst_cyclic = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix dag = random_dag_weights(size(rng), 0.4, 0.1, 2.0, rng);
        worst_acyclic = std::max(worst_acyclic, acyclicity(dag));
        Matrix cyc;
        do {
            cyc = random_cyclic_weights(size(rng), rng);
        } while (!support_has_cycle(cyc));
        worst_cyclic = std::min(worst_cyclic, acyclicity(cyc));
    }
    std::ostringstream detail;
    detail << "max h(acyclic) = " << worst_acyclic << " (need <= 1e-9), min h(cyclic) = "
           << worst_cyclic << " (need > 1e-3)";
    return {worst_acyclic <= 1e-9 && worst_cyclic > 1e-3, detail.str()};
}

Outcome criterion2() {
    std::mt19937_64 rng(1002);
    std::uniform_int_distribution<int> k_dist(2, 6), p_dist(0, 2);
    std::normal_distribution<double> gauss(0.0, 0.5);
    constexpr double step = 1e-6;
    double worst = 0.0;

    for (int trial = 0; trial < 50; ++trial) {
        const int k = k_dist(rng), p = p_dist(rng);
        LaggedDesign design = random_design(40, k, p, rng);
        Matrix w(k, k), a(p * k, k);
        for (Index i = 0; i < w.size(); ++i) w(i) = gauss(rng);
        w.diagonal().setZero();
        for (Index i = 0; i < a.size(); ++i) a(i) = gauss(rng);

        // sem loss gradient vs central differences
        auto [gw, ga] = sem_loss_gradient(w, a, design);
        auto fd_check = [&](Matrix& m, const Matrix& analytic) {
            for (Index i = 0; i < m.size(); ++i) {
                const double saved = m(i);
                m(i) = saved + step;
                const double up = sem_loss(w, a, design);
                m(i) = saved - step;
                const double down = sem_loss(w, a, design);
                m(i) = saved;
                const double numeric = (up - down) / (2.0 * step);
                const double scale = std::max({1.0, std::abs(numeric), std::abs(analytic(i))});
                worst = std::max(worst, std::abs(numeric - analytic(i)) / scale);
            }
        };
        fd_check(w, gw);
        fd_check(a, ga);

        // acyclicity gradient
        const Matrix hg = acyclicity_gradient(w);
        for (Index i = 0; i < w.size(); ++i) {
            const double saved = w(i);
            w(i) = saved + step;
            const double up = acyclicity(w);
            w(i) = saved - step;
            const double down = acyclicity(w);
            w(i) = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double scale = std::max({1.0, std::abs(numeric), std::abs(hg(i))});
            worst = std::max(worst, std::abs(numeric - hg(i)) / scale);
        }

        // full augmented-Lagrangian inner gradient
        const InnerProblem problem(design, 0.05, 0.05);
        Vector theta = Vector::Zero(problem.dim());
        std::uniform_real_distribution<double> unif(0.0, 0.5);
        for (Index i = 0; i < theta.size(); ++i) theta(i) = unif(rng);
        const Vector upper = problem.upper_bounds();
        for (Index i = 0; i < theta.size(); ++i) theta(i) = std::min(theta(i), upper(i));
        const double rho = 2.0, alpha = 0.7;
        Vector grad(problem.dim());
        problem.value_and_gradient(theta, rho, alpha, grad);
        Vector scratch(problem.dim());
        for (Index i = 0; i < theta.size(); ++i) {
            Vector probe = theta;
            probe(i) = theta(i) + step;
            const double up = problem.value_and_gradient(probe, rho, alpha, scratch);
            probe(i) = theta(i) - step;
            const double down = problem.value_and_gradient(probe, rho, alpha, scratch);
            const double numeric = (up - down) / (2.0 * step);
            const double scale = std::max({1.0, std::abs(numeric), std::abs(grad(i))});
            worst = std::max(worst, std::abs(numeric - grad(i)) / scale);
        }
    }
    std::ostringstream detail;
    detail << "worst relative gradient error = " << worst << " (need <= 1e-4)";
    return {worst <= 1e-4, detail.str()};
}

Outcome criterion3() {
    // raw-scale designs with scale-matched penalties; see README for the
    // rationale (standardizing destroys equal-noise orientation recovery)
    SolverConfig solver;
    solver.lambda_w = 5e-4;
    solver.lambda_a = 5e-4;
    constexpr double recovery_threshold = 0.06;

    int wins = 0;
    std::ostringstream failing;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        GeneratorSpec spec;
        spec.node_count = 8;
        spec.lag = 1;
        spec.edge_density = 0.3;
        spec.weight_min = 0.5;
        spec.weight_max = 2.0;
        spec.noise_std = 0.1;
        spec.seed = seed;
        const WeightedDbn truth = random_dbn(spec);
        const MultivariateSeries series = simulate(truth, 2000, spec.noise_std, seed + 500);
        const LaggedDesign design = build_design({series.values}, spec.lag);
        auto [fit, trace] = fit_dbn(design, solver);
        const double f1_w = support_f1(fit.intra, truth.intra, recovery_threshold);
        const double f1_a = support_f1(fit.inter, truth.inter, recovery_threshold);
        const bool ok = f1_w >= 0.9 && f1_a >= 0.9;
        wins += ok;
        if (!ok) failing << " " << seed << "(W " << f1_w << ", A " << f1_a << ")";
    }
    std::ostringstream detail;
    detail << wins << "/10 seeds with W and A edge-recovery F1 >= 0.9 (need >= 8)";
    if (!failing.str().empty()) detail << "; failing seeds:" << failing.str();
    return {wins >= 8, detail.str()};
}

Outcome criterion4() {
    std::mt19937_64 rng(1004);
    std::uniform_int_distribution<int> k_dist(2, 6), p_dist(0, 2);
    std::uniform_real_distribution<double> density(0.1, 0.6);

    for (int trial = 0; trial < 1000; ++trial) {
        const int k = k_dist(rng), p = p_dist(rng);
        const BinaryDbn g1 = random_graph(k, p, density(rng), rng);
        const BinaryDbn g2 = random_graph(k, p, density(rng), rng);
        if (shd(g1, g2) != brute_force_shd(g1, g2)) {
            return {false, "shd disagrees with brute-force counting"};
        }
    }
    for (int trial = 0; trial < 200; ++trial) {
        const int k = k_dist(rng), p = p_dist(rng);
        const BinaryDbn a = random_graph(k, p, density(rng), rng);
        const BinaryDbn b = random_graph(k, p, density(rng), rng);
        const BinaryDbn c = random_graph(k, p, density(rng), rng);
        if (shd(a, b) != shd(b, a)) return {false, "shd is not symmetric"};
        if (shd(a, a) != 0) return {false, "shd(g, g) != 0"};
        if ((shd(a, b) == 0) != (a.intra_edges == b.intra_edges &&
                                 a.inter_edges == b.inter_edges)) {
            return {false, "shd identity of indiscernibles failed"};
        }
        if (shd(a, c) > shd(a, b) + shd(b, c)) {
            return {false, "shd triangle inequality failed"};
        }
    }
    return {true, "1000 brute-force pairs equal; metric axioms hold on 200 triples"};
}

Outcome criterion5(Index segment_len) {
    GeneratorSpec spec;
    spec.node_count = 8;
    spec.lag = 1;
    spec.edge_density = 0.3;
    spec.noise_std = 0.1;
    spec.rewired_edges = 4;
    spec.seed = 11;

    const DetectionReport report = run_detection(spec, segment_len, spec.lag);
    const double f1 = report.f1_point_adjusted.value_or(0.0);
    const double auc = report.roc_auc.value_or(0.0);

    GeneratorSpec control = spec;
    control.rewired_edges = 0;
    const DetectionReport control_report = run_detection(control, segment_len, spec.lag);
    double attack_rate = 0.0;
    for (const auto& s : control_report.per_segment) attack_rate += s.predicted;
    attack_rate /= static_cast<double>(control_report.per_segment.size());

    std::ostringstream detail;
    detail << "F1 = " << f1 << " (need >= 0.9), ROC-AUC = " << auc
           << " (need >= 0.95), control attack rate = " << attack_rate << " (need <= 0.1)";
    return {f1 >= 0.9 && auc >= 0.95 && attack_rate <= 0.1, detail.str()};
}

Outcome criterion6(Index segment_len) {
    int wins = 0;
    std::ostringstream rows;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        GeneratorSpec spec;
        spec.node_count = 8;
        spec.lag = 1;
        spec.edge_density = 0.3;
        spec.noise_std = 0.1;
        spec.rewired_edges = 3;
        spec.perturb_target = PerturbTarget::inter;   // regimes differ only in lagged edges
        spec.seed = 30 + seed;

        const double f1_lag =
            run_detection(spec, segment_len, spec.lag).f1_point_adjusted.value_or(0.0);
        const double f1_static =
            run_detection(spec, segment_len, 0).f1_point_adjusted.value_or(0.0);
        if (f1_lag - f1_static >= 0.2) ++wins;
        rows << " [" << f1_lag << " vs " << f1_static << "]";
    }
    std::ostringstream detail;
    detail << wins << "/10 seeds with lag-mode F1 at least 0.2 above static mode (need >= 8);"
           << rows.str();
    return {wins >= 8, detail.str()};
}

Outcome criterion7() {
    std::mt19937_64 rng(1007);
    std::uniform_int_distribution<int> n_dist(2, 12);
    std::uniform_int_distribution<int> label_dist(0, 1);
    std::uniform_int_distribution<int> score_dist(0, 5);   // coarse grid forces ties

    for (int trial = 0; trial < 500; ++trial) {
        const int n = n_dist(rng);
        std::vector<int> labels(static_cast<size_t>(n));
        std::vector<double> scores(static_cast<size_t>(n));
        bool pos = false, neg = false;
        for (int i = 0; i < n; ++i) {
            labels[static_cast<size_t>(i)] = label_dist(rng);
            scores[static_cast<size_t>(i)] = 0.25 * score_dist(rng);
            (labels[static_cast<size_t>(i)] == 1 ? pos : neg) = true;
        }
        if (!pos || !neg) {
            --trial;
            continue;
        }
        double wins = 0.0;
        long pairs = 0;
        for (int i = 0; i < n; ++i) {
            if (labels[static_cast<size_t>(i)] != 1) continue;
            for (int j = 0; j < n; ++j) {
                if (labels[static_cast<size_t>(j)] != 0) continue;
                ++pairs;
                if (scores[static_cast<size_t>(i)] > scores[static_cast<size_t>(j)]) wins += 1.0;
                if (scores[static_cast<size_t>(i)] == scores[static_cast<size_t>(j)]) wins += 0.5;
            }
        }
        const double expected = wins / static_cast<double>(pairs);
        if (std::abs(roc_auc(labels, scores) - expected) > 1e-12) {
            return {false, "roc_auc disagrees with exhaustive pairwise counting"};
        }
    }

    // worked precision-at-k examples
    const bool ap1 = std::abs(prc_auc({1, 0}, {0.1, 0.9}) - 0.5) < 1e-12;
    const bool ap2 =
        std::abs(prc_auc({1, 1, 0, 0}, {0.9, 0.4, 0.8, 0.1}) - 5.0 / 6.0) < 1e-12;
    const bool ap3 = std::abs(prc_auc({1, 1, 0, 0}, {0.9, 0.8, 0.4, 0.1}) - 1.0) < 1e-12;
    if (!(ap1 && ap2 && ap3)) return {false, "prc_auc disagrees with hand enumeration"};
    return {true, "500 roc_auc cases equal brute force; prc_auc matches hand enumeration"};
}

Outcome criterion8(const std::string& cli) {
    namespace fs = std::filesystem;
    if (cli.empty()) return {false, "CLI path not supplied (second argument)"};
    const fs::path dir = fs::temp_directory_path() / "cgad_acceptance8";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto run = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    const std::string base = (dir / "").string();
    const std::string common = "synth --nodes 6 --lag 1 --seed 9 --normal-steps 2400 "
                               "--attack-steps 2400 --segment-len 200 --rewired-edges 4 ";
    for (const char* tag : {"a", "b"}) {
        const std::string t(tag);
        if (run(common + "--out-train " + base + "train_" + t + ".csv --out-test " + base +
                "test_" + t + ".csv --truth " + base + "truth_" + t + ".json") != 0) {
            return {false, "synth run failed"};
        }
        if (run("profile --train " + base + "train_" + t + ".csv --out " + base + "profile_" +
                t + ".json --segment-len 200 --lag 1") != 0) {
            return {false, "profile run failed"};
        }
    }
    if (run("score --test " + base + "test_a.csv --profile " + base +
            "profile_a.json --out " + base + "report_w1.json --workers 1") != 0 ||
        run("score --test " + base + "test_b.csv --profile " + base +
            "profile_b.json --out " + base + "report_w8.json --workers 8") != 0) {
        return {false, "score run failed"};
    }

    const bool synth_identical = slurp(dir / "train_a.csv") == slurp(dir / "train_b.csv") &&
                                 slurp(dir / "test_a.csv") == slurp(dir / "test_b.csv") &&
                                 slurp(dir / "truth_a.json") == slurp(dir / "truth_b.json");
    const bool profile_identical =
        slurp(dir / "profile_a.json") == slurp(dir / "profile_b.json");
    const bool report_identical =
        slurp(dir / "report_w1.json") == slurp(dir / "report_w8.json");
    std::ostringstream detail;
    detail << "synth byte-identical: " << (synth_identical ? "yes" : "NO")
           << ", profile byte-identical: " << (profile_identical ? "yes" : "NO")
           << ", report workers 1 vs 8 byte-identical: " << (report_identical ? "yes" : "NO");
    return {synth_identical && profile_identical && report_identical, detail.str()};
}

} // namespace

int main(int argc, char** argv) {
    const int which = argc > 1 ? std::atoi(argv[1]) : 0;
    const std::string cli = argc > 2 ? argv[2] : "";
    const Index segment_len = 300;

    int failures = 0;
    auto report = [&](int number, const char* name, const Outcome& outcome, double elapsed) {
        std::printf("[%s] criterion %d (%s): %s  [%.1fs]\n", outcome.pass ? "PASS" : "FAIL",
                    number, name, outcome.detail.c_str(), elapsed);
        failures += outcome.pass ? 0 : 1;
    };
    auto maybe_run = [&](int number, const char* name, auto&& fn) {
        if (which != 0 && which != number) return;
        const auto start = Clock::now();
        const Outcome outcome = fn();
        report(number, name, outcome, seconds_since(start));
    };

    maybe_run(1, "acyclicity correctness", [] { return criterion1(); });
    maybe_run(2, "gradient fidelity", [] { return criterion2(); });
    maybe_run(3, "structure recovery", [] { return criterion3(); });
    maybe_run(4, "shd oracle equivalence", [] { return criterion4(); });
    maybe_run(5, "end-to-end detection", [&] { return criterion5(segment_len); });
    maybe_run(6, "static-ablation direction", [&] { return criterion6(segment_len); });
    maybe_run(7, "metric oracles", [] { return criterion7(); });
    maybe_run(8, "determinism", [&] { return criterion8(cli); });

    return failures == 0 ? 0 : 1;
}
