#pragma once

#include "cgad/types.hpp"

namespace cgad {

enum class DivergenceKind { shd, jaccard, laplacian_spectral };

const char* to_string(DivergenceKind kind);
DivergenceKind divergence_kind_from_string(const std::string& name);

struct ShdOptions {
    int reversal_cost = 2;       // 2 = literal symmetric-difference count
    bool include_inter = true;   // false = intra-only comparison
};

/// Structural Hamming distance: |E1 \ E2| + |E2 \ E1| over typed edges
/// (intra pairs and inter triples with the lag part of edge identity).
/// With reversal_cost = 1, an intra pair present in opposite directions
/// counts once instead of twice.
long shd(const BinaryDbn& g1, const BinaryDbn& g2, const ShdOptions& options = {});

/// |E1 n E2| / |E1 u E2| over the same typed-edge universe; 1 when both empty.
double jaccard_similarity(const BinaryDbn& g1, const BinaryDbn& g2,
                          const ShdOptions& options = {});

/// Flattens each DBN to an undirected simple graph on K nodes (edge iff any
/// intra or any-lag inter edge connects the pair in either direction), then
/// returns the Euclidean distance between ascending-sorted eigenvalue
/// vectors of the combinatorial Laplacians L = D - Adj.
double laplacian_spectral_distance(const BinaryDbn& g1, const BinaryDbn& g2);

/// Dispatcher; every kind is oriented so that lower = more similar
/// (jaccard is returned as 1 - similarity).
double divergence(DivergenceKind kind, const BinaryDbn& g1, const BinaryDbn& g2,
                  const ShdOptions& options = {});

} // namespace cgad
