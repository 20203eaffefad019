#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsd/corpus.hpp"
#include "dsd/errors.hpp"
#include "dsd/eval.hpp"
#include "dsd/span.hpp"

namespace dsd {

/// One annotated pair as emitted by the annotate command: predicted spans on
/// sentence 2 (and sentence 1 when run bidirectionally), or a per-record
/// error.
struct AnnotatedRecord {
    std::string sentence1;
    std::string sentence2;
    std::vector<SpanAnnotation> spans_on_second;
    std::vector<SpanAnnotation> spans_on_first;
    std::optional<PairLabel> pair_label;
    std::string method;
    std::string error;  // non-empty when this record failed

    bool operator==(const AnnotatedRecord&) const = default;
};

namespace detail {

inline nlohmann::json spans_to_json(const std::vector<SpanAnnotation>& spans) {
    nlohmann::json arr = nlohmann::json::array();
    for (const SpanAnnotation& s : spans) arr.push_back({s.start, s.end});
    return arr;
}

inline std::vector<SpanAnnotation> spans_from_json(const nlohmann::json& arr) {
    std::vector<SpanAnnotation> out;
    for (const auto& item : arr)
        out.push_back({item.at(0).get<std::size_t>(), item.at(1).get<std::size_t>(),
                       SpanLabel::dissimilar});
    return out;
}

}  // namespace detail

inline nlohmann::json to_json(const AnnotatedRecord& rec) {
    nlohmann::json j;
    j["sentence1"] = rec.sentence1;
    j["sentence2"] = rec.sentence2;
    j["spans2"] = detail::spans_to_json(rec.spans_on_second);
    if (!rec.spans_on_first.empty()) j["spans1"] = detail::spans_to_json(rec.spans_on_first);
    if (rec.pair_label)
        j["pairLabel"] = *rec.pair_label == PairLabel::equivalent ? 1 : 0;
    if (!rec.method.empty()) j["method"] = rec.method;
    if (!rec.error.empty()) j["error"] = rec.error;
    return j;
}

inline AnnotatedRecord record_from_json(const nlohmann::json& j) {
    AnnotatedRecord rec;
    rec.sentence1 = j.value("sentence1", "");
    rec.sentence2 = j.value("sentence2", "");
    if (j.contains("spans2")) rec.spans_on_second = detail::spans_from_json(j["spans2"]);
    if (j.contains("spans1")) rec.spans_on_first = detail::spans_from_json(j["spans1"]);
    if (j.contains("pairLabel"))
        rec.pair_label = j["pairLabel"].get<int>() == 1 ? PairLabel::equivalent
                                                        : PairLabel::dissimilar;
    rec.method = j.value("method", "");
    rec.error = j.value("error", "");
    return rec;
}

inline AnnotatedRecord record_from_json_line(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON record: " + line.substr(0, 120));
    return record_from_json(j);
}

inline nlohmann::json to_json(const Metrics& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline Metrics metrics_from_json(const nlohmann::json& j) {
    return {j.value("precision", 0.0), j.value("recall", 0.0), j.value("f1", 0.0)};
}

inline nlohmann::json to_json(const Slice& s) {
    nlohmann::json j = to_json(s.mean);
    j["samples"] = s.sample_count;
    return j;
}

inline Slice slice_from_json(const nlohmann::json& j) {
    return {metrics_from_json(j), j.value("samples", std::size_t{0})};
}

inline nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json j;
    j["global"] = to_json(r.global);
    j["noDiff"] = to_json(r.no_diff);
    j["diff"] = to_json(r.diff);
    j["seGlobal"] = to_json(r.se_global);
    j["seNoDiff"] = to_json(r.se_no_diff);
    j["seDiff"] = to_json(r.se_diff);
    j["folds"] = nlohmann::json::array();
    for (const FoldSlices& f : r.per_fold)
        j["folds"].push_back({{"global", to_json(f.global)},
                              {"noDiff", to_json(f.no_diff)},
                              {"diff", to_json(f.diff)}});
    j["wallSeconds"] = r.wall_seconds;
    return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    r.global = slice_from_json(j.at("global"));
    r.no_diff = slice_from_json(j.at("noDiff"));
    r.diff = slice_from_json(j.at("diff"));
    r.se_global = metrics_from_json(j.at("seGlobal"));
    r.se_no_diff = metrics_from_json(j.at("seNoDiff"));
    r.se_diff = metrics_from_json(j.at("seDiff"));
    for (const auto& f : j.value("folds", nlohmann::json::array()))
        r.per_fold.push_back({slice_from_json(f.at("global")), slice_from_json(f.at("noDiff")),
                              slice_from_json(f.at("diff"))});
    r.wall_seconds = j.value("wallSeconds", 0.0);
    return r;
}

}  // namespace dsd
