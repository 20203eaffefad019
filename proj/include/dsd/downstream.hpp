#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include "dsd/corpus.hpp"
#include "dsd/embed_dsd.hpp"
#include "dsd/errors.hpp"
#include "dsd/provider.hpp"

namespace dsd {

/// A sentence pair with a paraphrase/not-paraphrase gold label.
struct LabeledPair {
    std::string sentence1;
    std::string sentence2;
    bool is_paraphrase = false;
};

struct ParaphraseConfig {
    double sts_threshold = 0.65;  // paraphrase requires cosine >= this
    DsdConfig dsd;                // gate spans use dsd.threshold (strictly above)
    bool bidirectional_gate = true;
};

enum class ParaphraseMode { sts, sts_dsd };

/// Column layout of a labeled-pair TSV; defaults match the PAWS files
/// (id, sentence1, sentence2, label) with a header row.
struct PairTsvColumns {
    std::size_t sentence1 = 1;
    std::size_t sentence2 = 2;
    std::size_t label = 3;
    bool has_header = true;
};

inline std::vector<LabeledPair> load_labeled_pairs(std::istream& in, const PairTsvColumns& cols,
                                                   const std::string& source_name) {
    std::vector<LabeledPair> out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t needed = std::max({cols.sentence1, cols.sentence2, cols.label}) + 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && cols.has_header) continue;
        if (line.empty()) continue;
        std::vector<std::string> fields = detail::split_fields(line, '\t');
        if (fields.size() < needed)
            throw ParseError("expected at least " + std::to_string(needed) + " fields", line_no);
        const std::string& label = fields[cols.label];
        if (label != "0" && label != "1")
            throw ParseError("pair label must be 0 or 1, got '" + label + "'", line_no);
        out.push_back({fields[cols.sentence1], fields[cols.sentence2], label == "1"});
    }
    if (out.empty()) throw ParseError("empty labeled-pair file: " + source_name);
    return out;
}

inline std::vector<LabeledPair> load_labeled_pairs(const std::string& path,
                                                   const PairTsvColumns& cols = {}) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open labeled-pair file: " + path);
    return load_labeled_pairs(in, cols, path);
}

inline bool classify_sts(const LabeledPair& pair, const ParaphraseConfig& cfg,
                         EmbeddingProvider& provider) {
    std::vector<EmbeddingVector> e = provider.embed_batch({pair.sentence1, pair.sentence2});
    return cosine_similarity(e[0], e[1]) >= cfg.sts_threshold;
}

/// Paraphrase iff the similarity clears the STS threshold AND the span
/// detector finds nothing (in both directions by default).
inline bool classify_sts_dsd(const LabeledPair& pair, const ParaphraseConfig& cfg,
                             EmbeddingProvider& provider) {
    if (!classify_sts(pair, cfg, provider)) return false;
    if (!annotate(pair.sentence1, pair.sentence2, cfg.dsd, provider).empty()) return false;
    if (cfg.bidirectional_gate &&
        !annotate(pair.sentence2, pair.sentence1, cfg.dsd, provider).empty())
        return false;
    return true;
}

inline bool classify(const LabeledPair& pair, const ParaphraseConfig& cfg,
                     EmbeddingProvider& provider, ParaphraseMode mode) {
    return mode == ParaphraseMode::sts ? classify_sts(pair, cfg, provider)
                                       : classify_sts_dsd(pair, cfg, provider);
}

/// Fraction of correctly classified pairs.
inline double paraphrase_accuracy(const std::vector<LabeledPair>& pairs,
                                  const ParaphraseConfig& cfg, EmbeddingProvider& provider,
                                  ParaphraseMode mode) {
    if (pairs.empty()) throw ConfigError("paraphrase_accuracy: empty pair set");
    std::size_t correct = 0;
    for (const LabeledPair& p : pairs)
        if (classify(p, cfg, provider, mode) == p.is_paraphrase) ++correct;
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

/// Grid search maximizing validation accuracy; ties break toward the larger
/// STS threshold, then the larger span threshold.
inline ParaphraseConfig tune_thresholds(const std::vector<LabeledPair>& validation,
                                        const std::vector<double>& sts_grid,
                                        const std::vector<double>& dsd_grid,
                                        const ParaphraseConfig& base, EmbeddingProvider& provider,
                                        ParaphraseMode mode = ParaphraseMode::sts_dsd) {
    if (validation.empty()) throw ConfigError("tune_thresholds: empty validation set");
    if (sts_grid.empty()) throw ConfigError("tune_thresholds: empty STS grid");
    std::vector<double> gate_grid = dsd_grid;
    if (mode == ParaphraseMode::sts || gate_grid.empty())
        gate_grid = {base.dsd.threshold};

    ParaphraseConfig best = base;
    double best_accuracy = -1.0;
    for (double sts : sts_grid) {
        for (double gate : gate_grid) {
            ParaphraseConfig cfg = base;
            cfg.sts_threshold = sts;
            cfg.dsd.threshold = gate;
            double accuracy = paraphrase_accuracy(validation, cfg, provider, mode);
            bool better = accuracy > best_accuracy ||
                          (accuracy == best_accuracy &&
                           (sts > best.sts_threshold ||
                            (sts == best.sts_threshold && gate > best.dsd.threshold)));
            if (better) {
                best = cfg;
                best_accuracy = accuracy;
            }
        }
    }
    return best;
}

}  // namespace dsd
