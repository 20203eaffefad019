#pragma once

#include <cctype>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dsd {

/// Byte range [begin, end) of a token inside its sentence.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const TokenSpan&) const = default;
};

inline bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_punct_byte(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

inline bool is_alnum_byte(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

/// Whitespace tokenization, byte offsets into the input. Punctuation stays
/// attached to its word ("1980s." is one token).
inline std::vector<TokenSpan> token_spans(std::string_view text) {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space_byte(text[i])) ++i;
        if (i >= text.size()) break;
        std::size_t begin = i;
        while (i < text.size() && !is_space_byte(text[i])) ++i;
        spans.push_back({begin, i});
    }
    return spans;
}

inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    for (const TokenSpan& s : token_spans(text))
        tokens.emplace_back(text.substr(s.begin, s.end - s.begin));
    return tokens;
}

/// A token counts as a word if it contains at least one alphanumeric byte;
/// standalone punctuation like "--" does not.
inline bool is_word_token(std::string_view token) {
    for (char c : token)
        if (is_alnum_byte(c)) return true;
    return false;
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// Unigram form used for overlap matching: lowercased, leading/trailing
/// punctuation stripped. Tokens that are pure punctuation are only lowercased
/// so they can still match each other.
inline std::string normalize_unigram(std::string_view token) {
    std::size_t b = 0, e = token.size();
    while (b < e && is_punct_byte(token[b])) ++b;
    while (e > b && is_punct_byte(token[e - 1])) --e;
    if (b == e) return to_lower_ascii(token);
    return to_lower_ascii(token.substr(b, e - b));
}

inline std::string join_tokens(std::span<const std::string> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i];
    }
    return out;
}

/// Collapses runs of whitespace to single spaces and trims the ends.
inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char c : s) {
        if (is_space_byte(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out += ' ';
            pending_space = false;
            out += c;
        }
    }
    return out;
}

}  // namespace dsd
