#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dsd/corpus.hpp"
#include "dsd/errors.hpp"
#include "dsd/span.hpp"
#include "dsd/text.hpp"

namespace dsd {

enum class LlmParseErrorKind { no_code_block, unbalanced_markers, hypothesis_mismatch };

class LlmParseError : public Error {
public:
    LlmParseError(LlmParseErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}

    LlmParseErrorKind kind() const { return kind_; }

private:
    LlmParseErrorKind kind_;
};

/// Fixed 4-shot instruction: two correct annotation examples and two
/// incorrect ones (extraneous words; annotation appended after the sentence).
inline const std::string& llm_system_prompt() {
    static const std::string prompt = R"PROMPT(You are an NLP model able to detect differences in meaning in textual pairs. More concretely, given a premise and a hypothesis, you are able to compare them and annotate in the hypothesis the spans that are differing in meaning to the information included in the premise.

Here is an example of an input and the expected output:

# INPUT 1

```json
{
  "premise": "There was international outrage for the decision.",
  "hypothesis": "There was no reaction to the decision."
}
```

# OUTPUT 1

```
There was {{no reaction}} to the decision.
```

As you can see, the inputs are formatted as a JSON blob containing the premise and hypothesis. The response is a code block containing the hypothesis with the differing spans enclosed within the markers "{{" and "}}". Note that without these markers, both the input hypothesis and the annotated hypothesis are identical.

Here is another example:

# INPUT 2

```json
{
  "premise": "Microorganisms are too small to be seen by the naked eye.",
  "hypothesis": "Microorganisms have considerable size and can be seen with your eyes."
}
```

# OUTPUT 2

```
Microorganisms {{have considerable size}} and {{can be seen with your eyes}}.
```

On the other hand, here goes an example with an incorrect output, since the annotated hypothesis includes words not present in the input hypothesis:

# INPUT 3

```json
{
  "premise": "It is much warmer here than it used to be.",
  "hypothesis": "It is way colder here than it used to be."
}
```

# (INCORRECT) OUTPUT 3

```
I believe it is {{way colder}} here than it used to be.
```

Let me show you one last example of an erroneous output, in this case because the annotation appears at the end and not within the hypothesis:

# INPUT 4

```json
{
  "premise": "The deputy was urged to provide an immediate apology for his controversial comments.",
  "hypothesis": "The deputy was urged to resign for his controversial comments."
}
```

# (INCORRECT) OUTPUT 4

```
The deputy was urged to resign for his controversial comments. {{resign}}
```)PROMPT";
    return prompt;
}

struct PromptPair {
    std::string system_prompt;
    std::string user_prompt;
};

/// Pure function of the inputs; the premise/hypothesis blob is JSON-escaped.
inline PromptPair build_prompt(const std::string& premise, const std::string& hypothesis) {
    nlohmann::ordered_json blob;
    blob["premise"] = premise;
    blob["hypothesis"] = hypothesis;

    std::string user = "You are now given the following JSON input:\n\n```json\n";
    user += blob.dump(2);
    user +=
        "\n```\n\nPlease, provide the annotated hypothesis using the start marker \"{{\" and "
        "the end marker \"}}\". Enclose the annotated hypothesis within a code block using "
        "\"```\" so I can easily identify it. Please, reason your answer.";
    return {llm_system_prompt(), std::move(user)};
}

namespace detail {

/// Content of the last complete ``` fenced block, language tags skipped.
inline std::string last_code_block(std::string_view raw) {
    std::vector<std::size_t> fences;
    for (std::size_t pos = raw.find("```"); pos != std::string_view::npos;
         pos = raw.find("```", pos + 3))
        fences.push_back(pos);
    if (fences.size() < 2)
        throw LlmParseError(LlmParseErrorKind::no_code_block, "no fenced code block in response");
    std::size_t last_pair = (fences.size() / 2) * 2;  // drop an unmatched trailing fence
    std::size_t open = fences[last_pair - 2], close = fences[last_pair - 1];
    std::size_t content = open + 3;
    std::size_t eol = raw.find('\n', content);
    if (eol != std::string_view::npos && eol < close) content = eol + 1;  // skip ```lang line
    std::string_view body = raw.substr(content, close - content);
    while (!body.empty() && is_space_byte(body.front())) body.remove_prefix(1);
    while (!body.empty() && is_space_byte(body.back())) body.remove_suffix(1);
    return std::string(body);
}

}  // namespace detail

/// Validates and converts a model response: the last code block must contain
/// the hypothesis with markers; stripping the markers must reproduce the
/// hypothesis (whitespace-normalized). Marked regions become token spans.
inline std::vector<SpanAnnotation> parse_llm_annotation(const std::string& raw,
                                                        const std::string& hypothesis) {
    std::string annotated = detail::last_code_block(raw);
    detail::MarkedSentence marked;
    try {
        marked = detail::parse_annotated_sentence(annotated);
    } catch (const ParseError& e) {
        throw LlmParseError(LlmParseErrorKind::unbalanced_markers, e.what());
    }
    if (collapse_whitespace(marked.sentence.text) != collapse_whitespace(hypothesis))
        throw LlmParseError(LlmParseErrorKind::hypothesis_mismatch,
                            "annotated text does not reproduce the hypothesis: '" +
                                marked.sentence.text + "'");
    std::vector<SpanAnnotation> spans = std::move(marked.spans);
    for (SpanAnnotation& s : spans) s.label = SpanLabel::dissimilar;
    return spans;
}

}  // namespace dsd
