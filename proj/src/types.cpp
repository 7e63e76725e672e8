#include "cgad/types.hpp"

#include "cgad/errors.hpp"

#include <cmath>
#include <unordered_set>
#include <vector>

namespace cgad {

MultivariateSeries validate_series(Matrix values,
                                   std::vector<std::string> sensor_names,
                                   std::optional<std::vector<int>> point_labels) {
    const Index t = values.rows();
    const Index k = values.cols();
    if (t < 1 || k < 2) {
        throw Error(ErrorCode::ShapeMismatch,
                    "series needs T >= 1 and K >= 2, got T=" + std::to_string(t) +
                        " K=" + std::to_string(k));
    }
    if (static_cast<Index>(sensor_names.size()) != k) {
        throw Error(ErrorCode::ShapeMismatch,
                    "expected " + std::to_string(k) + " sensor names, got " +
                        std::to_string(sensor_names.size()));
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : sensor_names) {
        if (!seen.insert(name).second) {
            throw Error(ErrorCode::DuplicateSensorName, "duplicate sensor name: " + name);
        }
    }
    for (Index i = 0; i < t; ++i) {
        for (Index j = 0; j < k; ++j) {
            if (!std::isfinite(values(i, j))) {
                throw Error(ErrorCode::NonFiniteValue,
                            "non-finite value at row " + std::to_string(i) + ", column " +
                                std::to_string(j));
            }
        }
    }
    if (point_labels) {
        if (static_cast<Index>(point_labels->size()) != t) {
            throw Error(ErrorCode::ShapeMismatch,
                        "point_labels length " + std::to_string(point_labels->size()) +
                            " != T=" + std::to_string(t));
        }
        for (int label : *point_labels) {
            if (label != 0 && label != 1) {
                throw Error(ErrorCode::ShapeMismatch, "point labels must be 0 or 1");
            }
        }
    }
    return {std::move(values), std::move(sensor_names), std::move(point_labels)};
}

bool intra_is_acyclic(const BinaryDbn& g) {
    const int n = g.node_count;
    std::vector<std::vector<int>> adj(n);
    for (const auto& [j, i] : g.intra_edges) adj[j].push_back(i);

    // 0 unvisited, 1 on stack, 2 done
    std::vector<int> color(n, 0);
    std::vector<std::pair<int, size_t>> stack;
    for (int start = 0; start < n; ++start) {
        if (color[start] != 0) continue;
        stack.emplace_back(start, 0);
        color[start] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < adj[v].size()) {
                int u = adj[v][next++];
                if (color[u] == 1) return false;
                if (color[u] == 0) {
                    color[u] = 1;
                    stack.emplace_back(u, 0);
                }
            } else {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    return true;
}

} // namespace cgad
