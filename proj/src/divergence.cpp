#include "cgad/divergence.hpp"

#include "cgad/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <iterator>

namespace cgad {

const char* to_string(DivergenceKind kind) {
    switch (kind) {
        case DivergenceKind::shd: return "shd";
        case DivergenceKind::jaccard: return "jaccard";
        case DivergenceKind::laplacian_spectral: return "laplacian_spectral";
    }
    return "unknown";
}

DivergenceKind divergence_kind_from_string(const std::string& name) {
    if (name == "shd") return DivergenceKind::shd;
    if (name == "jaccard") return DivergenceKind::jaccard;
    if (name == "laplacian_spectral") return DivergenceKind::laplacian_spectral;
    throw Error(ErrorCode::InvalidConfig, "unknown divergence kind: " + name);
}

namespace {

void check_compatible(const BinaryDbn& g1, const BinaryDbn& g2) {
    if (g1.node_count != g2.node_count || g1.lag != g2.lag) {
        throw Error(ErrorCode::NodeSetMismatch,
                    "graphs must share node count and lag to be compared");
    }
}

template <typename T>
long symmetric_difference_size(const std::set<T>& a, const std::set<T>& b) {
    std::vector<T> diff;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(diff));
    return static_cast<long>(diff.size());
}

} // namespace

long shd(const BinaryDbn& g1, const BinaryDbn& g2, const ShdOptions& options) {
    check_compatible(g1, g2);
    if (options.reversal_cost != 1 && options.reversal_cost != 2) {
        throw Error(ErrorCode::InvalidConfig, "shd reversal cost must be 1 or 2");
    }
    long count = symmetric_difference_size(g1.intra_edges, g2.intra_edges);
    if (options.reversal_cost == 1) {
        // a pair oriented j->i in one graph and i->j in the other, shared by
        // neither, costs one operation instead of two
        for (const auto& [j, i] : g1.intra_edges) {
            if (g2.intra_edges.count({j, i})) continue;
            if (g2.intra_edges.count({i, j}) && !g1.intra_edges.count({i, j})) --count;
        }
    }
    if (options.include_inter) {
        count += symmetric_difference_size(g1.inter_edges, g2.inter_edges);
    }
    return count;
}

double jaccard_similarity(const BinaryDbn& g1, const BinaryDbn& g2, const ShdOptions& options) {
    check_compatible(g1, g2);
    std::vector<IntraEdge> intra_common;
    std::set_intersection(g1.intra_edges.begin(), g1.intra_edges.end(), g2.intra_edges.begin(),
                          g2.intra_edges.end(), std::back_inserter(intra_common));
    size_t common = intra_common.size();
    size_t total = g1.intra_edges.size() + g2.intra_edges.size() - common;
    if (options.include_inter) {
        std::vector<InterEdge> inter_common;
        std::set_intersection(g1.inter_edges.begin(), g1.inter_edges.end(),
                              g2.inter_edges.begin(), g2.inter_edges.end(),
                              std::back_inserter(inter_common));
        common += inter_common.size();
        total += g1.inter_edges.size() + g2.inter_edges.size() - inter_common.size();
    }
    if (total == 0) return 1.0;      // both empty: maximally similar
    return static_cast<double>(common) / static_cast<double>(total);
}

namespace {

Vector laplacian_spectrum(const BinaryDbn& g) {
    const int k = g.node_count;
    Matrix adjacency = Matrix::Zero(k, k);
    auto connect = [&](int a, int b) {
        if (a == b) return;          // flattening yields a simple graph
        adjacency(a, b) = 1.0;
        adjacency(b, a) = 1.0;
    };
    for (const auto& [j, i] : g.intra_edges) connect(j, i);
    for (const auto& [j, l, i] : g.inter_edges) connect(j, i);

    Matrix laplacian = Matrix::Zero(k, k);
    laplacian.diagonal() = adjacency.rowwise().sum();
    laplacian -= adjacency;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();     // ascending
}

} // namespace

double laplacian_spectral_distance(const BinaryDbn& g1, const BinaryDbn& g2) {
    check_compatible(g1, g2);
    return (laplacian_spectrum(g1) - laplacian_spectrum(g2)).norm();
}

double divergence(DivergenceKind kind, const BinaryDbn& g1, const BinaryDbn& g2,
                  const ShdOptions& options) {
    switch (kind) {
        case DivergenceKind::shd:
            return static_cast<double>(shd(g1, g2, options));
        case DivergenceKind::jaccard:
            return 1.0 - jaccard_similarity(g1, g2, options);
        case DivergenceKind::laplacian_spectral:
            return laplacian_spectral_distance(g1, g2);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown divergence kind");
}

} // namespace cgad
