#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dsd/embedding.hpp"
#include "dsd/errors.hpp"
#include "dsd/provider.hpp"
#include "dsd/span.hpp"
#include "dsd/text.hpp"

namespace dsd {

/// One n-gram of sentence 1 substituted into sentence 2.
struct Replacement {
    std::size_t begin = 0;  // replaced token range [begin, end) in sentence 2
    std::size_t end = 0;
    std::vector<std::string> source_ngram;  // the sentence-1 tokens inserted
    std::string result_text;
};

struct DsdConfig {
    double threshold = 0.005;
    std::size_t max_ngram_size = 0;  // 0 = unbounded (up to min of both lengths)
};

/// Raw replacement count before deduplication:
/// sum over k of (|s1|-k+1)(|s2|-k+1), k = 1..min(|s1|, |s2|, cap).
inline std::size_t replacement_count(std::size_t len1, std::size_t len2,
                                     std::size_t max_ngram_size = 0) {
    std::size_t limit = std::min(len1, len2);
    if (max_ngram_size > 0) limit = std::min(limit, max_ngram_size);
    std::size_t total = 0;
    for (std::size_t k = 1; k <= limit; ++k) total += (len1 - k + 1) * (len2 - k + 1);
    return total;
}

/// Every k-gram of sentence 1 placed at every valid position of sentence 2,
/// for k from 1 up to the shorter sentence length (optionally capped).
/// Ordered by n-gram size, then n-gram offset, then target position.
inline std::vector<Replacement> generate_replacements(std::span<const std::string> s1_tokens,
                                                      std::span<const std::string> s2_tokens,
                                                      std::size_t max_ngram_size = 0) {
    if (s1_tokens.empty() || s2_tokens.empty())
        throw ConfigError("generate_replacements: empty sentence");

    std::size_t limit = std::min(s1_tokens.size(), s2_tokens.size());
    if (max_ngram_size > 0) limit = std::min(limit, max_ngram_size);

    std::vector<Replacement> out;
    out.reserve(replacement_count(s1_tokens.size(), s2_tokens.size(), max_ngram_size));
    for (std::size_t k = 1; k <= limit; ++k) {
        for (std::size_t g = 0; g + k <= s1_tokens.size(); ++g) {
            for (std::size_t pos = 0; pos + k <= s2_tokens.size(); ++pos) {
                Replacement r;
                r.begin = pos;
                r.end = pos + k;
                r.source_ngram.assign(s1_tokens.begin() + g, s1_tokens.begin() + g + k);

                std::vector<std::string> replaced(s2_tokens.begin(), s2_tokens.end());
                for (std::size_t j = 0; j < k; ++j) replaced[pos + j] = s1_tokens[g + j];
                r.result_text = join_tokens(replaced);
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

/// Per-unigram similarity gains for sentence 2. perUnigram holds, for each
/// token index, one gain per n-gram size (ascending); several replacements of
/// the same size touching the index are reduced to their best gain before
/// aggregation.
struct GainMap {
    double base_similarity = 0.0;
    std::vector<std::vector<double>> per_unigram;
    std::vector<double> aggregated;
};

/// Eq-style weighted mean of an ascending-size gain list: gains from larger
/// n-grams are down-weighted by their position, and the sum is normalized by
/// the list length.
inline double aggregate_gains(std::span<const double> gains) {
    if (gains.empty()) throw ConfigError("aggregate_gains: empty gain list");
    double sum = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i)
        sum += gains[i] / static_cast<double>(i + 1);
    return sum / static_cast<double>(gains.size());
}

inline GainMap compute_gains(const std::string& s1, const std::string& s2,
                             const std::vector<Replacement>& replacements,
                             EmbeddingProvider& provider) {
    std::vector<std::string> s2_tokens = tokenize(s2);
    if (s2_tokens.empty()) throw ConfigError("compute_gains: empty sentence 2");

    std::vector<std::string> texts;
    texts.reserve(replacements.size() + 2);
    texts.push_back(s1);
    texts.push_back(s2);
    for (const Replacement& r : replacements) texts.push_back(r.result_text);

    std::vector<EmbeddingVector> vectors;
    try {
        vectors = provider.embed_batch(texts);
    } catch (const ProviderError& e) {
        throw ProviderError(std::string("compute_gains: ") + e.what(), e.retryable());
    }

    GainMap gm;
    gm.base_similarity = cosine_similarity(vectors[0], vectors[1]);

    constexpr double kUnset = -std::numeric_limits<double>::infinity();
    std::size_t max_size = 0;
    for (const Replacement& r : replacements) max_size = std::max(max_size, r.end - r.begin);
    // best[i][k-1] = best gain among size-k replacements covering token i
    std::vector<std::vector<double>> best(s2_tokens.size(), std::vector<double>(max_size, kUnset));

    for (std::size_t ri = 0; ri < replacements.size(); ++ri) {
        const Replacement& r = replacements[ri];
        double gain = cosine_similarity(vectors[0], vectors[ri + 2]) - gm.base_similarity;
        std::size_t k = r.end - r.begin;
        for (std::size_t i = r.begin; i < r.end; ++i)
            best[i][k - 1] = std::max(best[i][k - 1], gain);
    }

    gm.per_unigram.resize(s2_tokens.size());
    gm.aggregated.resize(s2_tokens.size());
    for (std::size_t i = 0; i < s2_tokens.size(); ++i) {
        for (double g : best[i])
            if (g != kUnset) gm.per_unigram[i].push_back(g);
        if (gm.per_unigram[i].empty())
            throw ConfigError("compute_gains: token " + std::to_string(i) +
                              " received no gains; unigram replacements missing");
        gm.aggregated[i] = aggregate_gains(gm.per_unigram[i]);
    }
    return gm;
}

/// Aggregated per-token dissimilarity gains for sentence 2; the thresholdable
/// surface behind annotate().
inline std::vector<double> embed_dsd_weights(const std::string& s1, const std::string& s2,
                                             const DsdConfig& cfg, EmbeddingProvider& provider) {
    std::vector<std::string> s1_tokens = tokenize(s1);
    std::vector<std::string> s2_tokens = tokenize(s2);
    std::vector<Replacement> repls =
        generate_replacements(s1_tokens, s2_tokens, cfg.max_ngram_size);
    return compute_gains(s1, s2, repls, provider).aggregated;
}

/// Full pipeline: tokens whose aggregated gain exceeds the threshold are
/// grouped into maximal contiguous dissimilar spans on sentence 2.
inline std::vector<SpanAnnotation> annotate(const std::string& s1, const std::string& s2,
                                            const DsdConfig& cfg, EmbeddingProvider& provider) {
    std::vector<double> weights = embed_dsd_weights(s1, s2, cfg, provider);
    return weights_to_spans(weights, cfg.threshold);
}

}  // namespace dsd
