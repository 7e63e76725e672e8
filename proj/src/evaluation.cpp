#include "cgad/evaluation.hpp"

#include "cgad/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace cgad {

namespace {

void check_lengths(size_t a, size_t b, const char* what) {
    if (a != b || a == 0) {
        throw Error(ErrorCode::LengthMismatch,
                    std::string(what) + ": lengths " + std::to_string(a) + " vs " +
                        std::to_string(b));
    }
}

} // namespace

double f1_point_adjusted(const std::vector<int>& labels, const std::vector<int>& predictions) {
    check_lengths(labels.size(), predictions.size(), "f1");
    long tp = 0, fp = 0, fn = 0, pos = 0, pred_pos = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        pos += labels[i];
        pred_pos += predictions[i];
        if (predictions[i] == 1 && labels[i] == 1) ++tp;
        if (predictions[i] == 1 && labels[i] == 0) ++fp;
        if (predictions[i] == 0 && labels[i] == 1) ++fn;
    }
    if (pos == 0 && pred_pos == 0) return 1.0;   // zero-positives convention
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

double roc_auc(const std::vector<int>& labels, const std::vector<double>& scores) {
    check_lengths(labels.size(), scores.size(), "roc_auc");
    const long positives = std::count(labels.begin(), labels.end(), 1);
    const long negatives = static_cast<long>(labels.size()) - positives;
    if (positives == 0 || negatives == 0) {
        throw Error(ErrorCode::DegenerateLabels, "roc_auc needs both classes");
    }

    // rank-sum formulation; ties get the average rank
    std::vector<size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    double positive_rank_sum = 0.0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);   // 1-based
        for (size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1) positive_rank_sum += avg_rank;
        }
        i = j;
    }
    const double u = positive_rank_sum -
                     static_cast<double>(positives) * (static_cast<double>(positives) + 1.0) / 2.0;
    return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double prc_auc(const std::vector<int>& labels, const std::vector<double>& scores) {
    check_lengths(labels.size(), scores.size(), "prc_auc");
    const long positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0) {
        throw Error(ErrorCode::DegenerateLabels, "prc_auc needs at least one positive");
    }

    std::vector<size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    double average_precision = 0.0;
    long seen_positives = 0;
    for (size_t rank = 0; rank < order.size(); ++rank) {
        if (labels[order[rank]] == 1) {
            ++seen_positives;
            average_precision +=
                static_cast<double>(seen_positives) / static_cast<double>(rank + 1);
        }
    }
    return average_precision / static_cast<double>(positives);
}

} // namespace cgad
