#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsd/errors.hpp"
#include "dsd/rng.hpp"
#include "dsd/span.hpp"
#include "dsd/text.hpp"

namespace dsd {

/// Whether the two sentences of a pair are equivalent in meaning as a whole.
enum class PairLabel { dissimilar = 0, equivalent = 1 };

struct Sentence {
    std::string text;                 // raw text, annotation markers stripped
    std::vector<std::string> tokens;  // whitespace tokens
    std::vector<TokenSpan> offsets;   // byte offsets of the tokens in text

    static Sentence from_text(std::string text) {
        Sentence s;
        s.offsets = token_spans(text);
        s.tokens.reserve(s.offsets.size());
        for (const TokenSpan& t : s.offsets)
            s.tokens.emplace_back(text.substr(t.begin, t.end - t.begin));
        s.text = std::move(text);
        return s;
    }

    std::size_t size() const { return tokens.size(); }

    std::size_t word_count() const {
        std::size_t n = 0;
        for (const std::string& t : tokens)
            if (is_word_token(t)) ++n;
        return n;
    }

    bool operator==(const Sentence&) const = default;
};

/// Corresponding spans in sentence 1 and sentence 2, sharing one label.
struct SpanPair {
    SpanAnnotation on_first;
    SpanAnnotation on_second;
    SpanLabel label = SpanLabel::dissimilar;

    bool operator==(const SpanPair&) const = default;
};

struct AnnotatedPair {
    Sentence sentence1;
    Sentence sentence2;
    std::vector<SpanPair> span_pairs;  // same relative order in both sentences
    PairLabel pair_label = PairLabel::equivalent;

    bool has_dissimilar_spans() const {
        return std::any_of(span_pairs.begin(), span_pairs.end(),
                           [](const SpanPair& p) { return p.label == SpanLabel::dissimilar; });
    }

    std::vector<SpanAnnotation> dissimilar_spans_on_first() const {
        std::vector<SpanAnnotation> out;
        for (const SpanPair& p : span_pairs)
            if (p.label == SpanLabel::dissimilar) out.push_back(p.on_first);
        return out;
    }

    std::vector<SpanAnnotation> dissimilar_spans_on_second() const {
        std::vector<SpanAnnotation> out;
        for (const SpanPair& p : span_pairs)
            if (p.label == SpanLabel::dissimilar) out.push_back(p.on_second);
        return out;
    }

    bool operator==(const AnnotatedPair&) const = default;
};

struct Dataset {
    std::vector<AnnotatedPair> pairs;
    std::string source_name;

    std::size_t size() const { return pairs.size(); }
};

namespace detail {

struct MarkedSentence {
    Sentence sentence;
    std::vector<SpanAnnotation> spans;  // labels not yet assigned
};

/// Strips "{{"/"}}" markers, records each marked byte region, and maps the
/// regions onto whitespace tokens. A region that clips a token (the common
/// "{{1980s}}." layout, where the period stays outside the markers) claims
/// the whole token.
inline MarkedSentence parse_annotated_sentence(std::string_view annotated) {
    std::string raw;
    raw.reserve(annotated.size());
    std::vector<std::pair<std::size_t, std::size_t>> regions;
    bool open = false;
    std::size_t region_begin = 0;

    for (std::size_t i = 0; i < annotated.size();) {
        if (annotated.compare(i, 2, "{{") == 0) {
            if (open) throw ParseError("nested span markers");
            open = true;
            region_begin = raw.size();
            i += 2;
        } else if (annotated.compare(i, 2, "}}") == 0) {
            if (!open) throw ParseError("unbalanced span markers: '}}' without '{{'");
            open = false;
            if (raw.size() == region_begin) throw ParseError("empty span between markers");
            regions.emplace_back(region_begin, raw.size());
            i += 2;
        } else {
            raw += annotated[i];
            ++i;
        }
    }
    if (open) throw ParseError("unbalanced span markers: '{{' without '}}'");

    MarkedSentence out;
    out.sentence = Sentence::from_text(std::move(raw));

    std::size_t prev_end_token = 0;
    for (const auto& [begin, end] : regions) {
        std::size_t first = out.sentence.size(), last = 0;
        bool any = false;
        for (std::size_t t = 0; t < out.sentence.offsets.size(); ++t) {
            const TokenSpan& ts = out.sentence.offsets[t];
            if (ts.begin < end && ts.end > begin) {
                if (!any) first = t;
                last = t;
                any = true;
            }
        }
        if (!any) throw ParseError("span markers enclose no tokens");
        if (first < prev_end_token) throw ParseError("spans overlap");
        out.spans.push_back({first, last + 1, SpanLabel::dissimilar});
        prev_end_token = last + 1;
    }
    return out;
}

/// Re-inserts markers around token spans. The closing marker is placed before
/// a trailing punctuation run of the last token when something remains of it,
/// matching the usual "{{1980s}}." annotation layout.
inline std::string render_annotated_sentence(const Sentence& sentence,
                                             std::span<const SpanAnnotation> spans) {
    validate_spans(spans, sentence.size());
    std::string out;
    std::size_t cursor = 0;
    for (const SpanAnnotation& s : spans) {
        std::size_t open_at = sentence.offsets[s.start].begin;
        const TokenSpan& last = sentence.offsets[s.end - 1];
        std::size_t trimmed = last.end;
        while (trimmed > last.begin && is_punct_byte(sentence.text[trimmed - 1])) --trimmed;
        // pure punctuation tokens stay inside the markers
        std::size_t close_at = trimmed > last.begin ? trimmed : last.end;
        out += sentence.text.substr(cursor, open_at - cursor);
        out += "{{";
        out += sentence.text.substr(open_at, close_at - open_at);
        out += "}}";
        cursor = close_at;
    }
    out += sentence.text.substr(cursor);
    return out;
}

inline std::vector<std::string> split_fields(std::string_view line, char sep) {
    std::vector<std::string> fields;
    std::size_t begin = 0;
    while (true) {
        std::size_t pos = line.find(sep, begin);
        if (pos == std::string_view::npos) {
            fields.emplace_back(line.substr(begin));
            break;
        }
        fields.emplace_back(line.substr(begin, pos - begin));
        begin = pos + 1;
    }
    return fields;
}

}  // namespace detail

/// Parses one tab-separated record: annotated sentence 1, annotated
/// sentence 2, comma-separated span labels (empty when no spans), pair label.
inline AnnotatedPair parse_pair(std::string_view line) {
    std::vector<std::string> fields = detail::split_fields(line, '\t');
    if (fields.size() != 4)
        throw ParseError("expected 4 tab-separated fields, got " + std::to_string(fields.size()));

    detail::MarkedSentence s1 = detail::parse_annotated_sentence(fields[0]);
    detail::MarkedSentence s2 = detail::parse_annotated_sentence(fields[1]);
    if (s1.spans.size() != s2.spans.size())
        throw ParseError("span count mismatch: sentence 1 has " + std::to_string(s1.spans.size()) +
                         ", sentence 2 has " + std::to_string(s2.spans.size()));

    std::vector<SpanLabel> labels;
    if (!fields[2].empty()) {
        for (const std::string& item : detail::split_fields(fields[2], ',')) {
            if (item == "0")
                labels.push_back(SpanLabel::dissimilar);
            else if (item == "1")
                labels.push_back(SpanLabel::equivalent);
            else
                throw ParseError("span label must be 0 or 1, got '" + item + "'");
        }
    }
    if (labels.size() != s1.spans.size())
        throw ParseError("label count mismatch: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(s1.spans.size()) + " span pairs");

    PairLabel pair_label;
    if (fields[3] == "0")
        pair_label = PairLabel::dissimilar;
    else if (fields[3] == "1")
        pair_label = PairLabel::equivalent;
    else
        throw ParseError("pair label must be 0 or 1, got '" + fields[3] + "'");

    AnnotatedPair pair;
    pair.sentence1 = std::move(s1.sentence);
    pair.sentence2 = std::move(s2.sentence);
    pair.pair_label = pair_label;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        SpanPair sp;
        sp.on_first = s1.spans[i];
        sp.on_second = s2.spans[i];
        sp.on_first.label = sp.on_second.label = sp.label = labels[i];
        pair.span_pairs.push_back(sp);
    }
    return pair;
}

/// Inverse of parse_pair; parse_pair(serialize_pair(p)) is structurally
/// identical to p.
inline std::string serialize_pair(const AnnotatedPair& pair) {
    std::vector<SpanAnnotation> spans1, spans2;
    std::string labels;
    for (std::size_t i = 0; i < pair.span_pairs.size(); ++i) {
        const SpanPair& sp = pair.span_pairs[i];
        spans1.push_back(sp.on_first);
        spans2.push_back(sp.on_second);
        if (i > 0) labels += ',';
        labels += sp.label == SpanLabel::equivalent ? '1' : '0';
    }
    std::string out = detail::render_annotated_sentence(pair.sentence1, spans1);
    out += '\t';
    out += detail::render_annotated_sentence(pair.sentence2, spans2);
    out += '\t';
    out += labels;
    out += '\t';
    out += pair.pair_label == PairLabel::equivalent ? '1' : '0';
    return out;
}

inline Dataset load_dataset(std::istream& in, std::string source_name) {
    Dataset ds;
    ds.source_name = std::move(source_name);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        try {
            ds.pairs.push_back(parse_pair(line));
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()), line_no);
        }
    }
    if (ds.pairs.empty()) throw ParseError("empty dataset: " + ds.source_name);
    return ds;
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path);
    return load_dataset(in, path);
}

inline void save_dataset(std::ostream& out, const Dataset& ds) {
    for (const AnnotatedPair& p : ds.pairs) out << serialize_pair(p) << '\n';
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation

    bool operator==(const MeanSd&) const = default;
};

inline MeanSd mean_sd(const std::vector<double>& values) {
    if (values.empty()) return {};
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (values.size() - 1))};
}

struct DatasetStats {
    std::size_t pair_count = 0;
    std::size_t span_pair_count = 0;
    std::size_t dissimilar_span_count = 0;
    std::size_t equivalent_span_count = 0;
    std::size_t dissimilar_pair_count = 0;
    std::size_t equivalent_pair_count = 0;
    MeanSd sentence_word_length;  // words per sentence, punctuation-only tokens excluded
    MeanSd span_word_length;      // words per annotated span, both sentences
    MeanSd spans_per_sentence;
};

inline DatasetStats dataset_stats(const Dataset& ds) {
    if (ds.pairs.empty()) throw ConfigError("dataset_stats: empty dataset");
    DatasetStats st;
    st.pair_count = ds.size();

    std::vector<double> sentence_words, span_words, span_counts;
    auto span_word_count = [](const Sentence& s, const SpanAnnotation& span) {
        std::size_t n = 0;
        for (std::size_t t = span.start; t < span.end; ++t)
            if (is_word_token(s.tokens[t])) ++n;
        return static_cast<double>(n);
    };

    for (const AnnotatedPair& p : ds.pairs) {
        st.span_pair_count += p.span_pairs.size();
        for (const SpanPair& sp : p.span_pairs) {
            if (sp.label == SpanLabel::dissimilar)
                ++st.dissimilar_span_count;
            else
                ++st.equivalent_span_count;
            span_words.push_back(span_word_count(p.sentence1, sp.on_first));
            span_words.push_back(span_word_count(p.sentence2, sp.on_second));
        }
        if (p.pair_label == PairLabel::dissimilar)
            ++st.dissimilar_pair_count;
        else
            ++st.equivalent_pair_count;
        sentence_words.push_back(static_cast<double>(p.sentence1.word_count()));
        sentence_words.push_back(static_cast<double>(p.sentence2.word_count()));
        span_counts.push_back(static_cast<double>(p.span_pairs.size()));
    }

    st.sentence_word_length = mean_sd(sentence_words);
    st.span_word_length = mean_sd(span_words);
    st.spans_per_sentence = mean_sd(span_counts);
    return st;
}

struct BioToken {
    std::string token;
    char tag = 'O';  // B, I or O

    bool operator==(const BioToken&) const = default;
};

/// BIO tagging of sentence 2, dissimilar spans only: first span token B,
/// remaining span tokens I, everything else (including equivalent spans) O.
inline std::vector<std::vector<BioToken>> export_bio(const Dataset& ds) {
    std::vector<std::vector<BioToken>> out;
    out.reserve(ds.size());
    for (const AnnotatedPair& p : ds.pairs) {
        std::vector<BioToken> tagged;
        tagged.reserve(p.sentence2.size());
        for (const std::string& tok : p.sentence2.tokens) tagged.push_back({tok, 'O'});
        for (const SpanAnnotation& s : p.dissimilar_spans_on_second()) {
            tagged[s.start].tag = 'B';
            for (std::size_t t = s.start + 1; t < s.end; ++t) tagged[t].tag = 'I';
        }
        out.push_back(std::move(tagged));
    }
    return out;
}

/// token<TAB>tag lines, blank line between sentences.
inline void write_bio(std::ostream& out, const std::vector<std::vector<BioToken>>& sentences) {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i > 0) out << '\n';
        for (const BioToken& t : sentences[i]) out << t.token << '\t' << t.tag << '\n';
    }
}

/// Partitions pair indices into k folds by seeded uniform shuffle; fold sizes
/// differ by at most one. Deterministic for a fixed seed.
inline std::vector<std::vector<std::size_t>> split_folds(std::size_t pair_count, std::size_t k,
                                                         std::uint64_t seed) {
    if (k < 1 || k > pair_count)
        throw ConfigError("fold count must be in [1, pair count], got " + std::to_string(k));
    std::vector<std::size_t> indices(pair_count);
    std::iota(indices.begin(), indices.end(), 0);
    Rng rng(seed);
    rng.shuffle(indices);

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t base = pair_count / k, extra = pair_count % k, cursor = 0;
    for (std::size_t f = 0; f < k; ++f) {
        std::size_t size = base + (f < extra ? 1 : 0);
        folds[f].assign(indices.begin() + cursor, indices.begin() + cursor + size);
        std::sort(folds[f].begin(), folds[f].end());
        cursor += size;
    }
    return folds;
}

inline std::vector<std::vector<std::size_t>> split_folds(const Dataset& ds, std::size_t k,
                                                         std::uint64_t seed) {
    return split_folds(ds.size(), k, seed);
}

}  // namespace dsd
