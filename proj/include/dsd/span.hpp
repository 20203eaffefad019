#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dsd/errors.hpp"

namespace dsd {

/// Span-pair label: 0 = differs in meaning, 1 = equivalent in meaning.
enum class SpanLabel { dissimilar = 0, equivalent = 1 };

/// Contiguous token range [start, end) on one sentence plus its label.
struct SpanAnnotation {
    std::size_t start = 0;
    std::size_t end = 0;
    SpanLabel label = SpanLabel::dissimilar;

    std::size_t size() const { return end - start; }
    bool operator==(const SpanAnnotation&) const = default;
};

/// Checks 0 <= start < end <= token_count, sortedness and non-overlap.
inline void validate_spans(std::span<const SpanAnnotation> spans, std::size_t token_count) {
    std::size_t prev_end = 0;
    for (const SpanAnnotation& s : spans) {
        if (s.start >= s.end) throw ConfigError("span is empty or inverted");
        if (s.end > token_count) throw ConfigError("span exceeds sentence length");
        if (s.start < prev_end) throw ConfigError("spans overlap or are unsorted");
        prev_end = s.end;
    }
}

/// Groups maximal runs of marked tokens into spans.
inline std::vector<SpanAnnotation> marks_to_spans(const std::vector<bool>& marked,
                                                  SpanLabel label = SpanLabel::dissimilar) {
    std::vector<SpanAnnotation> spans;
    std::size_t i = 0;
    while (i < marked.size()) {
        if (!marked[i]) { ++i; continue; }
        std::size_t begin = i;
        while (i < marked.size() && marked[i]) ++i;
        spans.push_back({begin, i, label});
    }
    return spans;
}

/// Tokens with weight strictly above the threshold become dissimilar spans;
/// contiguous marked tokens are grouped into one span.
inline std::vector<SpanAnnotation> weights_to_spans(std::span<const double> weights,
                                                    double threshold) {
    std::vector<bool> marked(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) marked[i] = weights[i] > threshold;
    return marks_to_spans(marked, SpanLabel::dissimilar);
}

}  // namespace dsd
