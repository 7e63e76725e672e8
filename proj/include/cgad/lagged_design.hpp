#pragma once

#include "cgad/types.hpp"

namespace cgad {

/// Design matrices for the SEM X = X*W + Y*A + Z. Row r of lagged holds
/// [x_{t-1}, x_{t-2}, ..., x_{t-p}] for the time index t of current row r;
/// rows never pair observations across segment boundaries.
struct LaggedDesign {
    Matrix current;    // R x K
    Matrix lagged;     // R x (lag*K)
    int lag = 0;

    Index rows() const { return current.rows(); }
    Index sensors() const { return current.cols(); }
};

/// Split a series into floor(T/M) non-overlapping windows of M samples,
/// dropping the trailing remainder. A segment is labeled 1 iff any point
/// label inside it is 1.
SegmentedSeries segment(const MultivariateSeries& series, Index segment_len);

LaggedDesign build_design(const std::vector<Matrix>& segments, int lag);

/// Per-column mean and population (1/R) standard deviation for the current
/// and lagged blocks. A stored std of exactly 0 marks a zero-variance
/// column, which is centered only when applied.
struct ColumnStats {
    Vector mean_current, std_current;    // K
    Vector mean_lagged, std_lagged;      // lag*K

    bool any_zero_variance() const;
};

/// Training mode: compute stats from the design, return both.
std::pair<LaggedDesign, ColumnStats> standardize(const LaggedDesign& design);

/// Apply previously computed stats (test segments reuse training stats).
LaggedDesign standardize(const LaggedDesign& design, const ColumnStats& stats);

} // namespace cgad
