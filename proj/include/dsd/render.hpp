#pragma once

#include <span>
#include <string>
#include <vector>

#include "dsd/corpus.hpp"
#include "dsd/errors.hpp"
#include "dsd/records.hpp"
#include "dsd/span.hpp"
#include "dsd/text.hpp"

namespace dsd {

namespace detail {

/// Drops control bytes so user text cannot smuggle terminal escape sequences.
inline std::string sanitize_for_terminal(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u >= 0x20 || c == '\t') out += c;
    }
    return out;
}

inline std::string escape_html(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Splices decorated span text back into the raw sentence by token offsets.
template <typename Decorate, typename Escape>
std::string highlight_sentence(const Sentence& sentence, std::span<const SpanAnnotation> spans,
                               Decorate&& decorate, Escape&& escape) {
    validate_spans(spans, sentence.size());
    std::string out;
    std::size_t cursor = 0;
    for (const SpanAnnotation& s : spans) {
        std::size_t begin = sentence.offsets[s.start].begin;
        std::size_t end = sentence.offsets[s.end - 1].end;
        out += escape(std::string_view(sentence.text).substr(cursor, begin - cursor));
        out += decorate(escape(std::string_view(sentence.text).substr(begin, end - begin)));
        cursor = end;
    }
    out += escape(std::string_view(sentence.text).substr(cursor));
    return out;
}

}  // namespace detail

/// Dissimilar spans in red, one line per sentence.
inline std::string render_ansi(const AnnotatedRecord& rec) {
    if (!rec.error.empty())
        return "error: " + detail::sanitize_for_terminal(rec.error) + "\n";
    auto decorate = [](const std::string& s) { return "\x1b[1;31m" + s + "\x1b[0m"; };
    auto escape = [](std::string_view s) { return detail::sanitize_for_terminal(s); };
    Sentence s1 = Sentence::from_text(rec.sentence1);
    Sentence s2 = Sentence::from_text(rec.sentence2);
    std::string out;
    out += detail::highlight_sentence(s1, rec.spans_on_first, decorate, escape);
    out += '\n';
    out += detail::highlight_sentence(s2, rec.spans_on_second, decorate, escape);
    out += '\n';
    return out;
}

/// Standalone document with <mark> highlighting; all user text is escaped.
inline std::string render_html(std::span<const AnnotatedRecord> records) {
    auto decorate = [](const std::string& s) { return "<mark>" + s + "</mark>"; };
    auto escape = [](std::string_view s) { return detail::escape_html(s); };
    std::string out =
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
        "<title>Dissimilar spans</title>\n<style>\n"
        "body { font-family: sans-serif; max-width: 60em; margin: 2em auto; }\n"
        "mark { background: #ffb3b3; }\n"
        ".pair { border-bottom: 1px solid #ddd; padding: 0.6em 0; }\n"
        ".err { color: #a00; }\n"
        "</style>\n</head>\n<body>\n";
    for (const AnnotatedRecord& rec : records) {
        out += "<div class=\"pair\">\n";
        if (!rec.error.empty()) {
            out += "<p class=\"err\">" + detail::escape_html(rec.error) + "</p>\n";
        } else {
            Sentence s1 = Sentence::from_text(rec.sentence1);
            Sentence s2 = Sentence::from_text(rec.sentence2);
            out += "<p>" + detail::highlight_sentence(s1, rec.spans_on_first, decorate, escape) +
                   "</p>\n";
            out += "<p>" + detail::highlight_sentence(s2, rec.spans_on_second, decorate, escape) +
                   "</p>\n";
        }
        out += "</div>\n";
    }
    out += "</body>\n</html>\n";
    return out;
}

}  // namespace dsd
