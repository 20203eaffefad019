#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "dsd/corpus.hpp"
#include "dsd/span.hpp"

namespace dsd {

/// Annotates nothing.
inline std::vector<SpanAnnotation> no_dsd(const Sentence&, const Sentence&) {
    return {};
}

/// Every second-sentence token whose exact surface form does not occur in the
/// first sentence is marked; maximal contiguous runs become dissimilar spans.
/// Matching is case-sensitive on whitespace tokens with punctuation attached.
inline std::vector<SpanAnnotation> naive_dsd(const Sentence& first, const Sentence& second) {
    std::unordered_set<std::string> vocabulary(first.tokens.begin(), first.tokens.end());
    std::vector<bool> marked(second.size());
    for (std::size_t i = 0; i < second.size(); ++i)
        marked[i] = vocabulary.find(second.tokens[i]) == vocabulary.end();
    return marks_to_spans(marked, SpanLabel::dissimilar);
}

}  // namespace dsd
