#pragma once

#include <Eigen/Dense>

#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace cgad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raw sensor stream: rows are time steps, columns are sensors.
/// Construct through validate_series so the invariants below hold.
struct MultivariateSeries {
    Matrix values;                                   // T x K
    std::vector<std::string> sensor_names;           // K unique names
    std::optional<std::vector<int>> point_labels;    // length T, 0/1

    Index steps() const { return values.rows(); }
    Index sensors() const { return values.cols(); }
};

/// Validation boundary: shape, finiteness and name uniqueness checks.
/// Throws Error{ShapeMismatch, NonFiniteValue, DuplicateSensorName}.
MultivariateSeries validate_series(Matrix values,
                                   std::vector<std::string> sensor_names,
                                   std::optional<std::vector<int>> point_labels = std::nullopt);

/// Non-overlapping fixed-length windows in temporal order, all M x K.
/// Labels follow the any-anomalous-point rule; absent when the source
/// series carried no point labels.
struct SegmentedSeries {
    std::vector<Matrix> segments;
    std::optional<std::vector<int>> labels;

    Index count() const { return static_cast<Index>(segments.size()); }
    Index segment_len() const { return segments.empty() ? 0 : segments.front().rows(); }
    Index sensors() const { return segments.empty() ? 0 : segments.front().cols(); }
};

/// Weighted dynamic Bayesian network. intra(j, i) is the weight of the
/// instantaneous edge sensor_j -> sensor_i (so X = X*W + Y*A holds with
/// data rows as row vectors); row block l-1 of inter holds lag-l weights.
struct WeightedDbn {
    Matrix intra;                          // K x K, zero diagonal
    Matrix inter;                          // (lag*K) x K
    int lag = 0;
    std::vector<std::string> sensor_names;

    Index node_count() const { return intra.rows(); }
};

using IntraEdge = std::pair<int, int>;          // (j, i): j -> i
using InterEdge = std::tuple<int, int, int>;    // (j, lag, i)

/// Thresholded edge sets; input to the divergence metrics.
struct BinaryDbn {
    std::set<IntraEdge> intra_edges;
    std::set<InterEdge> inter_edges;
    int node_count = 0;
    int lag = 0;
};

/// DFS cycle check over the intra-slice edges.
bool intra_is_acyclic(const BinaryDbn& g);

/// Per-segment scoring outcome. The distance fields hold whatever metric
/// the run used (SHD by default) against each reference graph.
struct SegmentScore {
    Index segment_index = 0;
    double shd_attack = 0.0;
    double shd_normal = 0.0;
    double score = 0.0;          // shd_normal - shd_attack; higher = more attack-like
    int predicted = 0;
    bool converged = true;
};

struct DetectionReport {
    std::vector<SegmentScore> per_segment;
    std::optional<std::vector<int>> labels;      // copied from the test set when present
    std::optional<double> f1_point_adjusted;
    std::optional<double> roc_auc;
    std::optional<double> prc_auc;
    Index tie_count = 0;
    Index nonconverged_count = 0;
    bool zero_positive_convention = false;       // F1 forced to 1: no positives either side
};

} // namespace cgad
