#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dsd/corpus.hpp"
#include "dsd/errors.hpp"
#include "dsd/span.hpp"
#include "dsd/text.hpp"

namespace dsd {

/// |ref.start - ann.start| + |ref.end - ann.end| in token positions.
inline std::size_t span_offset(const SpanAnnotation& ref, const SpanAnnotation& ann) {
    auto dist = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
    return dist(ref.start, ann.start) + dist(ref.end, ann.end);
}

struct SpanAlignment {
    std::vector<std::pair<std::size_t, std::size_t>> matches;  // (ref index, ann index), ascending
    std::vector<std::size_t> unmatched_refs;
    std::vector<std::size_t> unmatched_anns;
    std::size_t total_offset = 0;
};

/// Order-preserving alignment matching all spans of the shorter list so that
/// the total offset is minimal. Ties prefer earlier annotation indices.
inline SpanAlignment align_spans(std::span<const SpanAnnotation> refs,
                                 std::span<const SpanAnnotation> anns) {
    SpanAlignment out;
    const bool swap_sides = refs.size() > anns.size();
    // rows = the smaller list, fully matched; cols = the larger one.
    std::span<const SpanAnnotation> rows = swap_sides ? anns : refs;
    std::span<const SpanAnnotation> cols = swap_sides ? refs : anns;
    std::size_t nr = rows.size(), nc = cols.size();

    if (nr == 0) {
        for (std::size_t i = 0; i < refs.size(); ++i) out.unmatched_refs.push_back(i);
        for (std::size_t i = 0; i < anns.size(); ++i) out.unmatched_anns.push_back(i);
        return out;
    }

    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;
    std::vector<std::vector<std::size_t>> cost(nr + 1, std::vector<std::size_t>(nc + 1, kInf));
    for (std::size_t j = 0; j <= nc; ++j) cost[0][j] = 0;
    for (std::size_t i = 1; i <= nr; ++i) {
        for (std::size_t j = i; j <= nc; ++j) {
            std::size_t match = cost[i - 1][j - 1] + span_offset(rows[i - 1], cols[j - 1]);
            std::size_t skip = j > i ? cost[i][j - 1] : kInf;
            cost[i][j] = std::min(match, skip);
        }
    }
    out.total_offset = cost[nr][nc];

    std::vector<bool> col_used(nc, false);
    std::size_t i = nr, j = nc;
    while (i > 0) {
        if (j > i && cost[i][j] == cost[i][j - 1]) {
            --j;  // tie: leave the later column unmatched
        } else {
            col_used[j - 1] = true;
            out.matches.emplace_back(i - 1, j - 1);
            --i;
            --j;
        }
    }
    std::reverse(out.matches.begin(), out.matches.end());
    if (swap_sides)
        for (auto& m : out.matches) std::swap(m.first, m.second);
    for (std::size_t c = 0; c < nc; ++c)
        if (!col_used[c]) (swap_sides ? out.unmatched_refs : out.unmatched_anns).push_back(c);
    return out;
}

struct MatchConfig {
    /// Lowercase and strip boundary punctuation before unigram matching.
    bool normalize_unigrams = true;
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const Metrics&) const = default;
};

inline double harmonic_f1(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

/// Unigram multiset overlap between an aligned span pair, both taken from the
/// same sentence's token sequence.
inline Metrics span_prf(std::span<const std::string> ref_tokens,
                        std::span<const std::string> ann_tokens,
                        const MatchConfig& mc = {}) {
    auto counted = [&](std::span<const std::string> tokens) {
        std::map<std::string, std::size_t> counts;
        for (const std::string& t : tokens)
            ++counts[mc.normalize_unigrams ? normalize_unigram(t) : t];
        return counts;
    };
    auto ref_counts = counted(ref_tokens);
    auto ann_counts = counted(ann_tokens);
    std::size_t overlap = 0;
    for (const auto& [unigram, count] : ann_counts) {
        auto it = ref_counts.find(unigram);
        if (it != ref_counts.end()) overlap += std::min(count, it->second);
    }
    Metrics m;
    m.precision = ann_tokens.empty() ? 0.0 : static_cast<double>(overlap) / ann_tokens.size();
    m.recall = ref_tokens.empty() ? 0.0 : static_cast<double>(overlap) / ref_tokens.size();
    m.f1 = harmonic_f1(m.precision, m.recall);
    return m;
}

inline Metrics span_prf(const Sentence& sentence, const SpanAnnotation& ref,
                        const SpanAnnotation& ann, const MatchConfig& mc = {}) {
    std::span<const std::string> tokens(sentence.tokens);
    return span_prf(tokens.subspan(ref.start, ref.size()), tokens.subspan(ann.start, ann.size()),
                    mc);
}

/// Scores one annotation direction. A pair without dissimilar reference spans
/// scores 1 when the method stayed silent and 0 otherwise. Otherwise scores
/// are averaged over the aligned spans, with unmatched reference spans
/// entering the recall/F1 means as 0 and unmatched annotated spans entering
/// the precision/F1 means as 0.
inline Metrics score_direction(const Sentence& sentence, std::span<const SpanAnnotation> refs,
                               std::span<const SpanAnnotation> anns, const MatchConfig& mc = {}) {
    Metrics out;
    if (refs.empty()) {
        double value = anns.empty() ? 1.0 : 0.0;
        out.precision = out.recall = out.f1 = value;
        return out;
    }
    SpanAlignment alignment = align_spans(refs, anns);
    double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
    std::size_t p_n = 0, r_n = 0, f_n = 0;
    for (const auto& [ref_idx, ann_idx] : alignment.matches) {
        Metrics m = span_prf(sentence, refs[ref_idx], anns[ann_idx], mc);
        p_sum += m.precision;
        r_sum += m.recall;
        f_sum += m.f1;
        ++p_n;
        ++r_n;
        ++f_n;
    }
    r_n += alignment.unmatched_refs.size();
    f_n += alignment.unmatched_refs.size();
    p_n += alignment.unmatched_anns.size();
    f_n += alignment.unmatched_anns.size();
    out.precision = p_n > 0 ? p_sum / p_n : 0.0;
    out.recall = r_n > 0 ? r_sum / r_n : 0.0;
    out.f1 = f_n > 0 ? f_sum / f_n : 0.0;
    return out;
}

struct PairScore {
    Metrics second_direction;  // method annotated sentence 2
    Metrics first_direction;   // inputs swapped, sentence 1 annotated
    Metrics mean;
    bool has_dissimilar_refs = false;
};

/// An annotation method: given an ordered (premise, hypothesis) input,
/// produce dissimilar spans on the hypothesis.
using Annotator =
    std::function<std::vector<SpanAnnotation>(const Sentence&, const Sentence&)>;

inline PairScore score_pair_with(const AnnotatedPair& pair,
                                 std::span<const SpanAnnotation> anns_on_second,
                                 std::span<const SpanAnnotation> anns_on_first,
                                 const MatchConfig& mc = {}) {
    PairScore score;
    score.has_dissimilar_refs = pair.has_dissimilar_spans();
    std::vector<SpanAnnotation> refs2 = pair.dissimilar_spans_on_second();
    std::vector<SpanAnnotation> refs1 = pair.dissimilar_spans_on_first();
    score.second_direction = score_direction(pair.sentence2, refs2, anns_on_second, mc);
    score.first_direction = score_direction(pair.sentence1, refs1, anns_on_first, mc);
    score.mean.precision = (score.second_direction.precision + score.first_direction.precision) / 2.0;
    score.mean.recall = (score.second_direction.recall + score.first_direction.recall) / 2.0;
    score.mean.f1 = (score.second_direction.f1 + score.first_direction.f1) / 2.0;
    return score;
}

/// Runs the method on (s1, s2) against sentence 2's dissimilar references and
/// on the swapped pair against sentence 1's, then averages the directions.
inline PairScore score_pair(const AnnotatedPair& pair, const Annotator& method,
                            const MatchConfig& mc = {}) {
    std::vector<SpanAnnotation> anns2 = method(pair.sentence1, pair.sentence2);
    std::vector<SpanAnnotation> anns1 = method(pair.sentence2, pair.sentence1);
    return score_pair_with(pair, anns2, anns1, mc);
}

struct Slice {
    Metrics mean;
    std::size_t sample_count = 0;

    bool operator==(const Slice&) const = default;
};

struct FoldSlices {
    Slice global, no_diff, diff;

    bool operator==(const FoldSlices&) const = default;
};

struct EvalReport {
    Slice global, no_diff, diff;            // over all pairs (sample-weighted)
    Metrics se_global, se_no_diff, se_diff; // standard error of the fold means
    std::vector<FoldSlices> per_fold;
    double wall_seconds = 0.0;

    /// Everything except wall time.
    bool same_scores(const EvalReport& other) const {
        return global == other.global && no_diff == other.no_diff && diff == other.diff &&
               se_global == other.se_global && se_no_diff == other.se_no_diff &&
               se_diff == other.se_diff && per_fold == other.per_fold;
    }
};

namespace detail {

struct MeanAccumulator {
    double p = 0.0, r = 0.0, f = 0.0;
    std::size_t n = 0;

    void add(const Metrics& m) {
        p += m.precision;
        r += m.recall;
        f += m.f1;
        ++n;
    }

    Slice finish() const {
        Slice s;
        s.sample_count = n;
        if (n > 0) {
            s.mean.precision = p / n;
            s.mean.recall = r / n;
            s.mean.f1 = f / n;
        }
        return s;
    }
};

inline FoldSlices slice_scores(std::span<const PairScore> scores,
                               std::span<const std::size_t> indices) {
    MeanAccumulator global, no_diff, diff;
    for (std::size_t idx : indices) {
        const PairScore& s = scores[idx];
        global.add(s.mean);
        (s.has_dissimilar_refs ? diff : no_diff).add(s.mean);
    }
    return {global.finish(), no_diff.finish(), diff.finish()};
}

inline Metrics standard_error(const std::vector<Slice>& fold_slices) {
    std::vector<double> ps, rs, fs;
    for (const Slice& s : fold_slices) {
        if (s.sample_count == 0) continue;
        ps.push_back(s.mean.precision);
        rs.push_back(s.mean.recall);
        fs.push_back(s.mean.f1);
    }
    auto se = [](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        return mean_sd(v).sd / std::sqrt(static_cast<double>(v.size()));
    };
    return {se(ps), se(rs), se(fs)};
}

}  // namespace detail

/// Slices the per-pair scores into Diff (pairs with dissimilar reference
/// spans) and NoDiff, per fold and overall, with cross-fold standard errors.
inline EvalReport aggregate_report(std::span<const PairScore> scores,
                                   const std::vector<std::vector<std::size_t>>& folds) {
    if (scores.empty()) throw ConfigError("aggregate_report: no scores");
    EvalReport report;

    std::vector<std::size_t> all(scores.size());
    std::iota(all.begin(), all.end(), 0);
    FoldSlices overall = detail::slice_scores(scores, all);
    report.global = overall.global;
    report.no_diff = overall.no_diff;
    report.diff = overall.diff;

    std::vector<Slice> g, nd, d;
    for (const auto& fold : folds) {
        for (std::size_t idx : fold)
            if (idx >= scores.size()) throw ConfigError("aggregate_report: fold index out of range");
        FoldSlices fs = detail::slice_scores(scores, fold);
        report.per_fold.push_back(fs);
        g.push_back(fs.global);
        nd.push_back(fs.no_diff);
        d.push_back(fs.diff);
    }
    report.se_global = detail::standard_error(g);
    report.se_no_diff = detail::standard_error(nd);
    report.se_diff = detail::standard_error(d);
    return report;
}

/// Scores every pair with the method (optionally across worker threads, output
/// order fixed by pair index) and aggregates under the k-fold protocol.
inline EvalReport evaluate_dataset(const Dataset& ds, const Annotator& method, std::size_t folds,
                                   std::uint64_t seed, const MatchConfig& mc = {},
                                   std::size_t workers = 1) {
    if (ds.pairs.empty()) throw ConfigError("evaluate_dataset: empty dataset");
    auto started = std::chrono::steady_clock::now();

    std::vector<PairScore> scores(ds.size());
    auto score_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                scores[i] = score_pair(ds.pairs[i], method, mc);
            } catch (const Error& e) {
                throw Error("pair " + std::to_string(i + 1) + ": " + e.what());
            }
        }
    };
    if (workers <= 1) {
        score_range(0, ds.size());
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        std::size_t chunk = (ds.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            std::size_t begin = w * chunk, end = std::min(ds.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, w, begin, end] {
                try {
                    score_range(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (std::thread& t : pool) t.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    }

    EvalReport report = aggregate_report(scores, split_folds(ds, folds, seed));
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

/// Produces per-token weights for the hypothesis of an ordered input; the
/// thresholdable surface shared by the embedding and explainer methods.
using WeightFn = std::function<std::vector<double>(const Sentence&, const Sentence&)>;

/// Computes weights once per pair and direction, then re-thresholds per grid
/// point. No embedding work happens after the precomputation pass.
inline std::vector<std::pair<double, EvalReport>> sweep_thresholds(
    const Dataset& ds, const WeightFn& weights, const std::vector<double>& grid,
    std::size_t folds, std::uint64_t seed, const MatchConfig& mc = {}, std::size_t workers = 1) {
    if (grid.empty()) throw ConfigError("sweep_thresholds: empty threshold grid");
    if (ds.pairs.empty()) throw ConfigError("sweep_thresholds: empty dataset");

    struct PairWeights {
        std::vector<double> second_direction, first_direction;
    };
    std::vector<PairWeights> all(ds.size());
    auto compute_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const AnnotatedPair& p = ds.pairs[i];
            all[i].second_direction = weights(p.sentence1, p.sentence2);
            all[i].first_direction = weights(p.sentence2, p.sentence1);
        }
    };
    if (workers <= 1) {
        compute_range(0, ds.size());
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        std::size_t chunk = (ds.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            std::size_t begin = w * chunk, end = std::min(ds.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, w, begin, end] {
                try {
                    compute_range(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (std::thread& t : pool) t.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    }

    auto fold_partition = split_folds(ds, folds, seed);
    std::vector<std::pair<double, EvalReport>> out;
    out.reserve(grid.size());
    for (double t : grid) {
        auto started = std::chrono::steady_clock::now();
        std::vector<PairScore> scores(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) {
            scores[i] = score_pair_with(ds.pairs[i],
                                        weights_to_spans(all[i].second_direction, t),
                                        weights_to_spans(all[i].first_direction, t), mc);
        }
        EvalReport report = aggregate_report(scores, fold_partition);
        report.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        out.emplace_back(t, report);
    }
    return out;
}

}  // namespace dsd
