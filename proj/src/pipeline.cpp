#include "cgad/pipeline.hpp"

#include "cgad/errors.hpp"
#include "cgad/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace cgad {

void PipelineConfig::validate() const {
    solver.validate();
    if (lag < 0) throw Error(ErrorCode::InvalidConfig, "lag must be >= 0");
    if (segment_len < 2) throw Error(ErrorCode::InvalidConfig, "segment_len must be >= 2");
    if (segment_len <= lag) {
        throw Error(ErrorCode::InvalidConfig, "segment_len must exceed the lag order");
    }
    if (noise_sigma_scale < 0.0) {
        throw Error(ErrorCode::InvalidConfig, "noise_sigma_scale must be >= 0");
    }
    if (shd_options.reversal_cost != 1 && shd_options.reversal_cost != 2) {
        throw Error(ErrorCode::InvalidConfig, "shd reversal cost must be 1 or 2");
    }
}

std::vector<Matrix> inject_noise(const std::vector<Matrix>& segments, double sigma_scale,
                                 std::uint64_t seed) {
    if (sigma_scale < 0.0) {
        throw Error(ErrorCode::InvalidConfig, "sigma_scale must be >= 0");
    }
    if (sigma_scale == 0.0 || segments.empty()) return segments;

    const Index k = segments.front().cols();
    Index total_rows = 0;
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(k);
    Eigen::RowVectorXd sum_sq = Eigen::RowVectorXd::Zero(k);
    for (const auto& s : segments) {
        total_rows += s.rows();
        sum += s.colwise().sum();
        sum_sq += s.array().square().colwise().sum().matrix();
    }
    const double n = static_cast<double>(total_rows);
    Eigen::RowVectorXd sigma(k);
    for (Index c = 0; c < k; ++c) {
        const double mean = sum(c) / n;
        sigma(c) = std::sqrt(std::max(0.0, sum_sq(c) / n - mean * mean));
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Matrix> out;
    out.reserve(segments.size());
    for (const auto& s : segments) {
        Matrix noisy = s;
        for (Index r = 0; r < s.rows(); ++r) {
            for (Index c = 0; c < k; ++c) {
                // constant sensors (sigma 0) stay bit-identical
                const double draw = gauss(rng);
                if (sigma(c) > 0.0) noisy(r, c) += sigma_scale * sigma(c) * draw;
            }
        }
        out.push_back(std::move(noisy));
    }
    return out;
}

CausalProfile profile(const SegmentedSeries& train, const PipelineConfig& config,
                      std::vector<std::string> sensor_names, SolverTrace* normal_trace,
                      SolverTrace* attack_trace) {
    config.validate();
    if (!train.labels) {
        throw Error(ErrorCode::MissingClass, "training segments carry no labels");
    }
    std::vector<Matrix> normal_segments, attack_segments;
    for (size_t i = 0; i < train.segments.size(); ++i) {
        ((*train.labels)[i] == 1 ? attack_segments : normal_segments)
            .push_back(train.segments[i]);
    }
    if (normal_segments.empty() || attack_segments.empty()) {
        throw Error(ErrorCode::MissingClass,
                    "training data must contain at least one segment of each class");
    }

    attack_segments = inject_noise(attack_segments, config.noise_sigma_scale, config.seed);

    auto [normal_design, normal_stats] =
        standardize(build_design(normal_segments, config.lag));
    auto [attack_design, attack_stats] =
        standardize(build_design(attack_segments, config.lag));

    CausalProfile out;
    out.config = config;
    out.stats = std::move(normal_stats);
    out.sensor_names = sensor_names;
    SolverTrace trace_n, trace_a;
    std::tie(out.weighted_normal, trace_n) =
        fit_dbn(normal_design, config.solver, sensor_names);
    std::tie(out.weighted_attack, trace_a) =
        fit_dbn(attack_design, config.solver, std::move(sensor_names));
    if (normal_trace) *normal_trace = std::move(trace_n);
    if (attack_trace) *attack_trace = std::move(trace_a);
    out.g_normal = threshold(out.weighted_normal, config.solver.edge_threshold);
    out.g_attack = threshold(out.weighted_attack, config.solver.edge_threshold);
    return out;
}

SegmentScore score_segment(const Matrix& segment, const CausalProfile& profile,
                           DivergenceKind kind, Index segment_index) {
    if (segment.cols() != profile.node_count()) {
        throw Error(ErrorCode::ShapeMismatch, "segment width does not match profile");
    }
    if (segment.rows() <= profile.config.lag) {
        throw Error(ErrorCode::LagTooLarge, "segment shorter than lag order + 1");
    }

    SegmentScore score;
    score.segment_index = segment_index;

    LaggedDesign design = build_design({segment}, profile.config.lag);
    design = profile.config.restandardize_per_segment ? standardize(design).first
                                                      : standardize(design, profile.stats);
    BinaryDbn g_t;
    try {
        auto [dbn, trace] = fit_dbn(design, profile.config.solver);
        g_t = threshold(dbn, profile.config.solver.edge_threshold);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DidNotConverge &&
            e.code() != ErrorCode::CyclicAfterThreshold) {
            throw;
        }
        // fail-safe: a segment we cannot profile is never flagged as attack
        score.converged = false;
        score.predicted = 0;
        score.shd_attack = std::numeric_limits<double>::quiet_NaN();
        score.shd_normal = std::numeric_limits<double>::quiet_NaN();
        score.score = 0.0;
        return score;
    }

    score.shd_attack = divergence(kind, g_t, profile.g_attack, profile.config.shd_options);
    score.shd_normal = divergence(kind, g_t, profile.g_normal, profile.config.shd_options);
    const Decision decision = decide(score.shd_attack, score.shd_normal);
    score.predicted = decision.predicted;
    score.score = decision.score;
    return score;
}

Decision decide(double dist_attack, double dist_normal) {
    return {dist_attack < dist_normal ? 1 : 0, dist_normal - dist_attack};
}

DetectionReport score_all(const SegmentedSeries& test, const CausalProfile& profile,
                          DivergenceKind kind, int workers) {
    const auto count = test.segments.size();
    DetectionReport report;
    report.per_segment.resize(count);
    report.labels = test.labels;

    const int thread_count =
        std::max(1, std::min<int>(workers, static_cast<int>(count == 0 ? 1 : count)));
    auto work = [&](int worker_id) {
        for (size_t i = static_cast<size_t>(worker_id); i < count;
             i += static_cast<size_t>(thread_count)) {
            report.per_segment[i] = score_segment(test.segments[i], profile, kind,
                                                  static_cast<Index>(i));
        }
    };
    if (thread_count == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(thread_count));
        for (int w = 0; w < thread_count; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    std::vector<int> predictions;
    std::vector<double> scores;
    predictions.reserve(count);
    scores.reserve(count);
    for (const auto& s : report.per_segment) {
        predictions.push_back(s.predicted);
        scores.push_back(s.score);
        if (s.converged && s.shd_attack == s.shd_normal) ++report.tie_count;
        if (!s.converged) ++report.nonconverged_count;
    }

    if (test.labels && !test.labels->empty()) {
        const auto& labels = *test.labels;
        report.f1_point_adjusted = f1_point_adjusted(labels, predictions);
        const bool any_positive_label = std::count(labels.begin(), labels.end(), 1) > 0;
        const bool any_positive_pred =
            std::count(predictions.begin(), predictions.end(), 1) > 0;
        report.zero_positive_convention = !any_positive_label && !any_positive_pred;
        try {
            report.roc_auc = roc_auc(labels, scores);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateLabels) throw;
        }
        try {
            report.prc_auc = prc_auc(labels, scores);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateLabels) throw;
        }
    }
    return report;
}

} // namespace cgad
