#pragma once

#include <vector>

namespace cgad {

/// Segment-level F1 (the point adjustment already happened at segmentation).
/// Conventions: no positive labels and no positive predictions -> 1;
/// precision + recall == 0 -> 0.
double f1_point_adjusted(const std::vector<int>& labels, const std::vector<int>& predictions);

/// Probability-of-correct-ranking AUC; score ties contribute 1/2.
/// Throws Error{DegenerateLabels} unless both classes are present.
double roc_auc(const std::vector<int>& labels, const std::vector<double>& scores);

/// Average precision over positives in descending score order, ties broken
/// by original index (stable). Throws Error{DegenerateLabels} without positives.
double prc_auc(const std::vector<int>& labels, const std::vector<double>& scores);

} // namespace cgad
