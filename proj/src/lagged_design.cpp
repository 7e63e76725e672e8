#include "cgad/lagged_design.hpp"

#include "cgad/errors.hpp"

#include <string>

namespace cgad {

SegmentedSeries segment(const MultivariateSeries& series, Index segment_len) {
    const Index t = series.steps();
    if (segment_len < 2) {
        throw Error(ErrorCode::SegmentTooShort,
                    "segment_len must be >= 2, got " + std::to_string(segment_len));
    }
    if (t < segment_len) {
        throw Error(ErrorCode::SegmentTooShort,
                    "series has " + std::to_string(t) + " rows, shorter than one segment of " +
                        std::to_string(segment_len));
    }
    const Index n = t / segment_len;
    SegmentedSeries out;
    out.segments.reserve(static_cast<size_t>(n));
    for (Index s = 0; s < n; ++s) {
        out.segments.push_back(series.values.middleRows(s * segment_len, segment_len));
    }
    if (series.point_labels) {
        std::vector<int> labels(static_cast<size_t>(n), 0);
        for (Index s = 0; s < n; ++s) {
            for (Index r = 0; r < segment_len; ++r) {
                if ((*series.point_labels)[static_cast<size_t>(s * segment_len + r)] == 1) {
                    labels[static_cast<size_t>(s)] = 1;
                    break;
                }
            }
        }
        out.labels = std::move(labels);
    }
    return out;
}

LaggedDesign build_design(const std::vector<Matrix>& segments, int lag) {
    if (lag < 0) throw Error(ErrorCode::InvalidConfig, "lag must be >= 0");
    if (segments.empty()) throw Error(ErrorCode::ShapeMismatch, "no segments given");

    const Index m = segments.front().rows();
    const Index k = segments.front().cols();
    for (const auto& s : segments) {
        if (s.rows() != m || s.cols() != k) {
            throw Error(ErrorCode::ShapeMismatch, "segments must share one M x K shape");
        }
    }
    if (lag >= m) {
        throw Error(ErrorCode::LagTooLarge, "lag " + std::to_string(lag) +
                                                " >= segment length " + std::to_string(m));
    }

    const Index rows_per_segment = m - lag;
    const Index total = rows_per_segment * static_cast<Index>(segments.size());
    LaggedDesign design;
    design.lag = lag;
    design.current.resize(total, k);
    design.lagged.resize(total, static_cast<Index>(lag) * k);

    Index row = 0;
    for (const auto& s : segments) {
        design.current.middleRows(row, rows_per_segment) = s.bottomRows(rows_per_segment);
        for (int l = 1; l <= lag; ++l) {
            design.lagged.block(row, (l - 1) * k, rows_per_segment, k) =
                s.middleRows(lag - l, rows_per_segment);
        }
        row += rows_per_segment;
    }
    return design;
}

namespace {

void column_stats(const Matrix& m, Vector& mean, Vector& std_dev) {
    const auto r = static_cast<double>(m.rows());
    mean = m.colwise().mean();
    std_dev.resize(m.cols());
    for (Index c = 0; c < m.cols(); ++c) {
        std_dev(c) = std::sqrt((m.col(c).array() - mean(c)).square().sum() / r);
    }
}

Matrix apply_stats(const Matrix& m, const Vector& mean, const Vector& std_dev) {
    Matrix out(m.rows(), m.cols());
    for (Index c = 0; c < m.cols(); ++c) {
        const double denom = std_dev(c) > 0.0 ? std_dev(c) : 1.0;  // zero-variance: center only
        out.col(c) = (m.col(c).array() - mean(c)) / denom;
    }
    return out;
}

} // namespace

bool ColumnStats::any_zero_variance() const {
    return (std_current.array() == 0.0).any() || (std_lagged.array() == 0.0).any();
}

std::pair<LaggedDesign, ColumnStats> standardize(const LaggedDesign& design) {
    ColumnStats stats;
    column_stats(design.current, stats.mean_current, stats.std_current);
    column_stats(design.lagged, stats.mean_lagged, stats.std_lagged);
    return {standardize(design, stats), std::move(stats)};
}

LaggedDesign standardize(const LaggedDesign& design, const ColumnStats& stats) {
    if (stats.mean_current.size() != design.current.cols() ||
        stats.mean_lagged.size() != design.lagged.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "standardization stats do not match design shape");
    }
    LaggedDesign out;
    out.lag = design.lag;
    out.current = apply_stats(design.current, stats.mean_current, stats.std_current);
    out.lagged = apply_stats(design.lagged, stats.mean_lagged, stats.std_lagged);
    return out;
}

} // namespace cgad
