#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsd/embedding.hpp"
#include "dsd/errors.hpp"
#include "dsd/provider.hpp"
#include "dsd/rng.hpp"
#include "dsd/span.hpp"
#include "dsd/text.hpp"

namespace dsd {

enum class AttributionMethod { lime, shap_sampled, shap_exact };

/// Per-token dissimilarity weights for sentence 2. Positive weight means the
/// token's presence lowers the similarity to sentence 1.
struct TokenAttribution {
    std::vector<double> weights;
    AttributionMethod method = AttributionMethod::lime;
    std::size_t sample_budget = 0;
    std::uint64_t seed = 0;
};

/// One perturbation: which tokens were removed and the dissimilarity of the
/// reduced sentence against sentence 1.
struct PerturbationSample {
    std::vector<bool> removed;
    double function_value = 0.0;
};

struct LimeConfig {
    std::size_t budget = 1000;       // number of sampled masks (must be >= token count)
    double drop_probability = 0.5;   // per-token removal probability
    double kernel_sigma = 25.0;      // exp(-d^2 / sigma^2), d = cosine distance to the intact mask
    double ridge = 1e-3;             // L2 strength on the surrogate coefficients
    std::uint64_t seed = 0;
};

namespace detail {

/// Text of the coalition keeping the flagged tokens; the empty coalition
/// falls back to a single space for providers that reject empty input.
inline std::string coalition_text(std::span<const std::string> tokens,
                                  const std::vector<bool>& keep, bool provider_accepts_empty) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!keep[i]) continue;
        if (!out.empty()) out += ' ';
        out += tokens[i];
    }
    if (out.empty() && !provider_accepts_empty) return " ";
    return out;
}

/// Solves (B^T W B + R) beta = B^T W y by Cholesky, where B is the design
/// with a leading intercept column and R penalizes everything but the
/// intercept. Throws when the system is singular.
inline std::vector<double> solve_weighted_ridge(const std::vector<std::vector<double>>& rows,
                                                const std::vector<double>& y,
                                                const std::vector<double>& w, double ridge) {
    std::size_t n = rows.size(), p = rows.front().size() + 1;
    std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
    std::vector<double> rhs(p, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> b(p);
        b[0] = 1.0;
        for (std::size_t j = 1; j < p; ++j) b[j] = rows[s][j - 1];
        for (std::size_t i = 0; i < p; ++i) {
            rhs[i] += w[s] * b[i] * y[s];
            for (std::size_t j = i; j < p; ++j) a[i][j] += w[s] * b[i] * b[j];
        }
    }
    for (std::size_t j = 1; j < p; ++j) a[j][j] += ridge;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < i; ++j) a[i][j] = a[j][i];

    // Cholesky; a non-positive pivot means a degenerate design.
    std::vector<std::vector<double>> l(p, std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i][j];
            for (std::size_t k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
            if (i == j) {
                if (sum <= 1e-12)
                    throw ConfigError("lime: degenerate design matrix; increase the budget or ridge");
                l[i][i] = std::sqrt(sum);
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    std::vector<double> z(p), beta(p);
    for (std::size_t i = 0; i < p; ++i) {
        double sum = rhs[i];
        for (std::size_t k = 0; k < i; ++k) sum -= l[i][k] * z[k];
        z[i] = sum / l[i][i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        double sum = z[ii];
        for (std::size_t k = ii + 1; k < p; ++k) sum -= l[k][ii] * beta[k];
        beta[ii] = sum / l[ii][ii];
    }
    return beta;
}

}  // namespace detail

/// LIME-style surrogate: random keep/drop masks over sentence 2, a weighted
/// ridge fit of the dissimilarity against removal indicators, sign flipped so
/// that positive weight = removing the token lowers the dissimilarity.
inline TokenAttribution lime_token_weights(const std::string& s1, const std::string& s2,
                                           EmbeddingProvider& provider, const LimeConfig& cfg) {
    std::vector<std::string> tokens = tokenize(s2);
    std::size_t m = tokens.size();
    if (m == 0) throw ConfigError("lime: sentence 2 has no tokens");
    if (cfg.budget < m)
        throw ConfigError("lime: budget " + std::to_string(cfg.budget) +
                          " is below the token count " + std::to_string(m));

    Rng rng(cfg.seed);
    std::vector<std::vector<bool>> removed_masks;
    removed_masks.reserve(cfg.budget);
    removed_masks.emplace_back(m, false);  // the intact sentence anchors the fit
    for (std::size_t s = 1; s < cfg.budget; ++s) {
        std::vector<bool> mask(m);
        for (std::size_t j = 0; j < m; ++j) mask[j] = rng.next_bool(cfg.drop_probability);
        removed_masks.push_back(std::move(mask));
    }
    if (std::all_of(removed_masks.begin(), removed_masks.end(),
                    [&](const std::vector<bool>& mk) { return mk == removed_masks.front(); }))
        throw ConfigError("lime: degenerate design matrix; all sampled masks are identical");

    bool allow_empty = provider.accepts_empty_text();
    std::vector<std::string> texts;
    texts.reserve(removed_masks.size() + 1);
    texts.push_back(s1);
    for (const std::vector<bool>& mask : removed_masks) {
        std::vector<bool> keep(m);
        for (std::size_t j = 0; j < m; ++j) keep[j] = !mask[j];
        texts.push_back(detail::coalition_text(tokens, keep, allow_empty));
    }
    std::vector<EmbeddingVector> vectors = provider.embed_batch(texts);

    std::vector<std::vector<double>> rows(removed_masks.size(), std::vector<double>(m));
    std::vector<double> f(removed_masks.size()), kernel(removed_masks.size());
    for (std::size_t s = 0; s < removed_masks.size(); ++s) {
        f[s] = dissimilarity_score(vectors[0], vectors[s + 1]);
        std::size_t kept = 0;
        for (std::size_t j = 0; j < m; ++j) {
            rows[s][j] = removed_masks[s][j] ? 1.0 : 0.0;
            if (!removed_masks[s][j]) ++kept;
        }
        double d = kept == 0 ? 1.0 : 1.0 - std::sqrt(static_cast<double>(kept) / m);
        kernel[s] = std::exp(-(d * d) / (cfg.kernel_sigma * cfg.kernel_sigma));
    }

    std::vector<double> beta = detail::solve_weighted_ridge(rows, f, kernel, cfg.ridge);
    TokenAttribution attr;
    attr.method = AttributionMethod::lime;
    attr.sample_budget = cfg.budget;
    attr.seed = cfg.seed;
    attr.weights.resize(m);
    for (std::size_t j = 0; j < m; ++j) attr.weights[j] = -beta[j + 1];
    return attr;
}

enum class ShapMode { exact, sampled };

namespace detail {

constexpr std::size_t kShapExactLimit = 12;

/// Evaluates the coalition game v(S) = dissimilarity(s1, tokens of s2 in S)
/// for all requested bitmasks in one provider batch.
inline std::unordered_map<std::uint64_t, double> evaluate_game(
    const std::string& s1, std::span<const std::string> tokens,
    const std::vector<std::uint64_t>& masks, EmbeddingProvider& provider) {
    bool allow_empty = provider.accepts_empty_text();
    std::vector<std::string> texts;
    texts.reserve(masks.size() + 1);
    texts.push_back(s1);
    for (std::uint64_t mask : masks) {
        std::vector<bool> keep(tokens.size());
        for (std::size_t j = 0; j < tokens.size(); ++j) keep[j] = (mask >> j) & 1ULL;
        texts.push_back(coalition_text(tokens, keep, allow_empty));
    }
    std::vector<EmbeddingVector> vectors = provider.embed_batch(texts);
    std::unordered_map<std::uint64_t, double> v;
    v.reserve(masks.size());
    for (std::size_t i = 0; i < masks.size(); ++i)
        v[masks[i]] = dissimilarity_score(vectors[0], vectors[i + 1]);
    return v;
}

}  // namespace detail

/// Shapley values of the coalition game over sentence 2's tokens. Exact mode
/// enumerates all subsets (token count <= 12); sampled mode averages marginal
/// contributions over `budget` permutations drawn as antithetic pairs (each
/// sampled order followed by its reverse).
inline TokenAttribution shap_token_values(const std::string& s1, const std::string& s2,
                                          EmbeddingProvider& provider, std::size_t budget,
                                          std::uint64_t seed, ShapMode mode) {
    std::vector<std::string> tokens = tokenize(s2);
    std::size_t n = tokens.size();
    if (n == 0) throw ConfigError("shap: sentence 2 has no tokens");
    if (n > 63) throw ConfigError("shap: too many tokens");

    TokenAttribution attr;
    attr.seed = seed;
    attr.weights.assign(n, 0.0);

    if (mode == ShapMode::exact) {
        if (n > detail::kShapExactLimit)
            throw ConfigError("shap exact mode supports at most " +
                              std::to_string(detail::kShapExactLimit) + " tokens, got " +
                              std::to_string(n));
        attr.method = AttributionMethod::shap_exact;
        attr.sample_budget = std::size_t{1} << n;

        std::vector<std::uint64_t> masks(std::size_t{1} << n);
        std::iota(masks.begin(), masks.end(), 0);
        auto v = detail::evaluate_game(s1, tokens, masks, provider);

        std::vector<double> fact(n + 1, 1.0);
        for (std::size_t i = 1; i <= n; ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
        for (std::uint64_t mask = 0; mask < masks.size(); ++mask) {
            std::size_t c = static_cast<std::size_t>(std::popcount(mask));
            for (std::size_t j = 0; j < n; ++j) {
                if ((mask >> j) & 1ULL) continue;
                double coeff = fact[c] * fact[n - c - 1] / fact[n];
                attr.weights[j] += coeff * (v.at(mask | (1ULL << j)) - v.at(mask));
            }
        }
        return attr;
    }

    if (budget == 0) throw ConfigError("shap sampled mode needs a positive permutation budget");
    attr.method = AttributionMethod::shap_sampled;
    attr.sample_budget = budget;

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> perms;
    perms.reserve(budget);
    while (perms.size() < budget) {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), 0);
        rng.shuffle(p);
        perms.push_back(p);
        if (perms.size() < budget) {
            std::vector<std::size_t> r(p.rbegin(), p.rend());
            perms.push_back(std::move(r));
        }
    }

    std::vector<std::uint64_t> needed;
    needed.push_back(0);
    for (const auto& p : perms) {
        std::uint64_t mask = 0;
        for (std::size_t j : p) {
            mask |= 1ULL << j;
            needed.push_back(mask);
        }
    }
    std::sort(needed.begin(), needed.end());
    needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
    auto v = detail::evaluate_game(s1, tokens, needed, provider);

    for (const auto& p : perms) {
        std::uint64_t mask = 0;
        for (std::size_t j : p) {
            double before = v.at(mask);
            mask |= 1ULL << j;
            attr.weights[j] += v.at(mask) - before;
        }
    }
    for (double& w : attr.weights) w /= static_cast<double>(perms.size());
    return attr;
}

/// Spans from attribution weights; shared thresholding rule with the other
/// methods (strictly above the threshold, maximal contiguous runs).
inline std::vector<SpanAnnotation> attribution_to_spans(const TokenAttribution& attr,
                                                        double threshold) {
    return weights_to_spans(attr.weights, threshold);
}

}  // namespace dsd
