#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dsd/errors.hpp"

namespace dsd {

/// Fixed-dimension real vector with provenance.
struct EmbeddingVector {
    std::vector<double> values;
    std::string provider_id;
    std::string model_id;

    std::size_t dimension() const { return values.size(); }

    bool finite() const {
        return std::all_of(values.begin(), values.end(),
                           [](double v) { return std::isfinite(v); });
    }
};

/// dot(a,b) / (|a||b|), clamped to [-1, 1] against rounding.
inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension())
        throw ConfigError("cosine_similarity: dimension mismatch (" +
                          std::to_string(a.dimension()) + " vs " + std::to_string(b.dimension()) +
                          ")");
    if (a.dimension() == 0) throw ConfigError("cosine_similarity: empty vectors");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) throw ConfigError("cosine_similarity: zero-norm vector");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

/// 1 - cosine similarity, in [0, 2].
inline double dissimilarity_score(const EmbeddingVector& a, const EmbeddingVector& b) {
    return 1.0 - cosine_similarity(a, b);
}

}  // namespace dsd
