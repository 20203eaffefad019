// dsd: span-level semantic dissimilarity toolkit.
//
// Subcommands: annotate, evaluate, sweep, paraphrase, stats, export-bio,
// render. See README.md for the file formats.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsd/dsd.hpp"
#include "dsd/http_provider.hpp"
#include "dsd/llm_client.hpp"

namespace {

using namespace dsd;

struct Options {
    std::string input;
    std::string output;

    std::string method = "embedding";
    double threshold = std::numeric_limits<double>::quiet_NaN();
    std::size_t max_ngram = 0;

    std::string provider = "mock";
    std::string provider_endpoint;
    std::string model = "hash-16";
    std::string api_key_env = "DSD_API_KEY";
    std::string cache_dir;
    std::size_t max_batch_size = 64;
    std::size_t max_in_flight = 4;

    std::string llm_endpoint;
    std::size_t llm_max_retries = 3;

    std::size_t lime_budget = 1000;
    std::size_t shap_budget = 0;  // 0 = twice the token count
    bool shap_exact = false;

    std::size_t folds = 5;
    std::uint64_t seed = 42;
    std::size_t workers = 1;
    std::string format = "table";
    bool bidirectional = false;
    bool raw_unigrams = false;

    std::vector<double> grid;  // sweep thresholds

    std::string validation_file;  // paraphrase
    std::vector<double> sts_grid;
    std::vector<double> dsd_grid;
    double sts_threshold = 0.65;
    bool single_direction_gate = false;
    std::string mode = "both";
};

/// Thresholds reported for the models the method family was calibrated on.
const std::map<std::string, double>& model_threshold_table() {
    static const std::map<std::string, double> table{
        {"all-MiniLM-L6-v2", 0.010},
        {"all-mpnet-base-v2", 0.006},
        {"text-embedding-3-large", 0.005},
        {"text-embedding-004", 0.005},
    };
    return table;
}

double resolve_threshold(const Options& opt) {
    if (!std::isnan(opt.threshold)) return opt.threshold;
    for (const auto& [model, value] : model_threshold_table())
        if (opt.model.find(model) != std::string::npos) return value;
    std::cerr << "warning: no calibrated threshold for model '" << opt.model
              << "'; using 0.005 (run `dsd sweep` to pick one)\n";
    return 0.005;
}

ProviderConfig provider_config(const Options& opt) {
    ProviderConfig cfg;
    if (opt.provider == "mock")
        cfg.kind = ProviderKind::deterministic_mock;
    else if (opt.provider == "http")
        cfg.kind = ProviderKind::http_embedding;
    else if (opt.provider == "cached")
        cfg.kind = ProviderKind::cached_file;
    else
        throw ConfigError("unknown provider kind: " + opt.provider);
    cfg.endpoint = opt.provider_endpoint;
    cfg.model_id = opt.model;
    cfg.api_key_env = opt.api_key_env;
    cfg.max_batch_size = opt.max_batch_size;
    cfg.max_in_flight = opt.max_in_flight;
    if (!opt.cache_dir.empty()) {
        std::filesystem::create_directories(opt.cache_dir);
        cfg.cache_path = (std::filesystem::path(opt.cache_dir) / "embeddings.jsonl").string();
    } else if (cfg.kind == ProviderKind::cached_file) {
        throw ConfigError("cached provider requires --cache-dir");
    }
    return cfg;
}

LlmConfig llm_config(const Options& opt) {
    LlmConfig cfg;
    cfg.endpoint = opt.llm_endpoint;
    cfg.model_id = opt.model;
    cfg.max_retries = opt.llm_max_retries;
    cfg.api_key_env = opt.api_key_env;
    return cfg;
}

Annotator make_annotator(const Options& opt, std::shared_ptr<EmbeddingProvider> provider) {
    if (opt.method == "none") return no_dsd;
    if (opt.method == "naive") return naive_dsd;
    double threshold = resolve_threshold(opt);
    if (opt.method == "embedding") {
        DsdConfig cfg{threshold, opt.max_ngram};
        return [provider, cfg](const Sentence& a, const Sentence& b) {
            return annotate(a.text, b.text, cfg, *provider);
        };
    }
    if (opt.method == "lime") {
        LimeConfig cfg;
        cfg.budget = opt.lime_budget;
        cfg.seed = opt.seed;
        return [provider, cfg, threshold](const Sentence& a, const Sentence& b) {
            return attribution_to_spans(lime_token_weights(a.text, b.text, *provider, cfg),
                                        threshold);
        };
    }
    if (opt.method == "shap") {
        const Options o = opt;
        return [provider, o, threshold](const Sentence& a, const Sentence& b) {
            std::size_t budget = o.shap_budget > 0 ? o.shap_budget : 2 * b.size();
            auto attr = shap_token_values(a.text, b.text, *provider, budget, o.seed,
                                          o.shap_exact ? ShapMode::exact : ShapMode::sampled);
            return attribution_to_spans(attr, threshold);
        };
    }
    if (opt.method == "llm") {
        LlmConfig cfg = llm_config(opt);
        if (cfg.endpoint.empty()) throw ConfigError("llm method requires --llm-endpoint");
        return [cfg](const Sentence& a, const Sentence& b) {
            LlmAnnotation result = annotate_with_llm(a.text, b.text, cfg);
            if (!result.ok)
                throw Error("llm annotation failed after " +
                            std::to_string(result.attempt_count()) + " attempts: " +
                            (result.attempts.empty() ? std::string("no attempts")
                                                     : result.attempts.back().parse_error));
            return result.spans;
        };
    }
    throw ConfigError("unknown method: " + opt.method);
}

WeightFn make_weight_fn(const Options& opt, std::shared_ptr<EmbeddingProvider> provider) {
    if (opt.method == "embedding") {
        DsdConfig cfg{0.0, opt.max_ngram};
        return [provider, cfg](const Sentence& a, const Sentence& b) {
            return embed_dsd_weights(a.text, b.text, cfg, *provider);
        };
    }
    if (opt.method == "lime") {
        LimeConfig cfg;
        cfg.budget = opt.lime_budget;
        cfg.seed = opt.seed;
        return [provider, cfg](const Sentence& a, const Sentence& b) {
            return lime_token_weights(a.text, b.text, *provider, cfg).weights;
        };
    }
    if (opt.method == "shap") {
        const Options o = opt;
        return [provider, o](const Sentence& a, const Sentence& b) {
            std::size_t budget = o.shap_budget > 0 ? o.shap_budget : 2 * b.size();
            return shap_token_values(a.text, b.text, *provider, budget, o.seed,
                                     o.shap_exact ? ShapMode::exact : ShapMode::sampled)
                .weights;
        };
    }
    throw ConfigError("method '" + opt.method + "' has no threshold to sweep");
}

std::ofstream open_output_file(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    return out;
}

/// Sink that is either stdout or a file.
struct Output {
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file = open_output_file(path);
            stream = &file;
        }
    }
    std::ofstream file;
    std::ostream* stream = &std::cout;
    std::ostream& out() { return *stream; }
};

struct InputRecord {
    AnnotatedPair pair;       // reference spans may be empty for bare pairs
    bool has_pair_label = false;
    std::string error;        // parse failure for this line
    std::size_t line = 0;
};

/// Accepts the annotated 4-column layout or bare "sentence1<TAB>sentence2"
/// lines; per-record errors are collected, not thrown.
std::vector<InputRecord> read_pair_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open input file: " + path);
    std::vector<InputRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        InputRecord rec;
        rec.line = line_no;
        try {
            std::size_t tabs = static_cast<std::size_t>(std::count(line.begin(), line.end(), '\t'));
            if (tabs == 1) {
                auto fields = detail::split_fields(line, '\t');
                rec.pair.sentence1 = Sentence::from_text(fields[0]);
                rec.pair.sentence2 = Sentence::from_text(fields[1]);
                rec.has_pair_label = false;
            } else {
                rec.pair = parse_pair(line);
                rec.has_pair_label = true;
            }
        } catch (const Error& e) {
            rec.error = e.what();
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw Error("empty input file: " + path);
    return records;
}

AnnotatedRecord make_record(const InputRecord& in, const Options& opt,
                            std::vector<SpanAnnotation> spans2,
                            std::vector<SpanAnnotation> spans1) {
    AnnotatedRecord rec;
    rec.sentence1 = in.pair.sentence1.text;
    rec.sentence2 = in.pair.sentence2.text;
    rec.spans_on_second = std::move(spans2);
    rec.spans_on_first = std::move(spans1);
    if (in.has_pair_label) rec.pair_label = in.pair.pair_label;
    rec.method = opt.method;
    return rec;
}

std::string record_to_tsv(const AnnotatedRecord& rec) {
    Sentence s1 = Sentence::from_text(rec.sentence1);
    Sentence s2 = Sentence::from_text(rec.sentence2);
    std::string labels;
    for (std::size_t i = 0; i < rec.spans_on_second.size(); ++i) {
        if (i > 0) labels += ',';
        labels += '0';
    }
    std::string out = detail::render_annotated_sentence(s1, rec.spans_on_first);
    out += '\t';
    out += detail::render_annotated_sentence(s2, rec.spans_on_second);
    out += '\t';
    out += labels;
    out += '\t';
    if (rec.pair_label) out += *rec.pair_label == PairLabel::equivalent ? "1" : "0";
    return out;
}

int cmd_annotate(const Options& opt) {
    if (opt.bidirectional && opt.format != "jsonLines")
        std::cerr << "warning: --bidirectional output needs --format jsonLines; "
                     "sentence-1 spans will be dropped\n";
    auto provider = make_embedding_provider(provider_config(opt));
    Annotator annotator = make_annotator(opt, provider);
    std::vector<InputRecord> inputs = read_pair_records(opt.input);

    std::vector<AnnotatedRecord> results(inputs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};
    auto run = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= inputs.size()) return;
            const InputRecord& in = inputs[i];
            if (!in.error.empty()) {
                results[i].error = "line " + std::to_string(in.line) + ": " + in.error;
                ++failures;
                continue;
            }
            try {
                std::vector<SpanAnnotation> spans2 =
                    annotator(in.pair.sentence1, in.pair.sentence2);
                std::vector<SpanAnnotation> spans1;
                if (opt.bidirectional && opt.format == "jsonLines")
                    spans1 = annotator(in.pair.sentence2, in.pair.sentence1);
                results[i] = make_record(in, opt, std::move(spans2), std::move(spans1));
            } catch (const std::exception& e) {
                results[i] = make_record(in, opt, {}, {});
                results[i].error = "line " + std::to_string(in.line) + ": " + e.what();
                ++failures;
            }
        }
    };
    if (opt.workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < opt.workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }

    Output sink(opt.output);
    if (opt.format == "html") {
        std::vector<AnnotatedRecord> ok;
        for (const auto& r : results) ok.push_back(r);
        sink.out() << render_html(ok);
    } else {
        for (const AnnotatedRecord& rec : results) {
            if (opt.format == "jsonLines") {
                sink.out() << to_json(rec).dump() << '\n';
            } else if (!rec.error.empty()) {
                std::cerr << "error: " << rec.error << '\n';
            } else if (opt.format == "ansi") {
                sink.out() << render_ansi(rec) << '\n';
            } else if (opt.format == "table") {
                sink.out() << record_to_tsv(rec) << '\n';
            } else {
                throw ConfigError("unknown format: " + opt.format);
            }
        }
    }
    return failures > 0 ? 1 : 0;
}

void print_report_table(std::ostream& out, const EvalReport& report) {
    auto row = [&](const char* name, const Slice& s, const Metrics& se) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%-8s %8.3f (%.3f) %8.3f (%.3f) %8.3f (%.3f) %8zu\n", name,
                      s.mean.precision, se.precision, s.mean.recall, se.recall, s.mean.f1, se.f1,
                      s.sample_count);
        out << buf;
    };
    out << "slice    precision (se)    recall (se)        f1 (se)      samples\n";
    row("Global", report.global, report.se_global);
    row("NoDiff", report.no_diff, report.se_no_diff);
    row("Diff", report.diff, report.se_diff);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "folds: %zu   wall: %.2fs\n", report.per_fold.size(),
                  report.wall_seconds);
    out << buf;
}

int cmd_evaluate(const Options& opt) {
    Dataset ds = load_dataset(opt.input);
    auto provider = make_embedding_provider(provider_config(opt));
    Annotator annotator = make_annotator(opt, provider);
    MatchConfig mc{!opt.raw_unigrams};
    EvalReport report = evaluate_dataset(ds, annotator, opt.folds, opt.seed, mc, opt.workers);

    Output sink(opt.output);
    if (opt.format == "jsonLines")
        sink.out() << to_json(report).dump() << '\n';
    else
        print_report_table(sink.out(), report);
    return 0;
}

int cmd_sweep(const Options& opt) {
    if (opt.grid.empty()) throw ConfigError("sweep requires --thresholds");
    Dataset ds = load_dataset(opt.input);
    auto provider = make_embedding_provider(provider_config(opt));
    WeightFn weights = make_weight_fn(opt, provider);
    MatchConfig mc{!opt.raw_unigrams};
    auto sweep = sweep_thresholds(ds, weights, opt.grid, opt.folds, opt.seed, mc, opt.workers);

    Output sink(opt.output);
    if (opt.format == "jsonLines") {
        for (const auto& [threshold, report] : sweep) {
            nlohmann::json j{{"threshold", threshold}, {"report", to_json(report)}};
            sink.out() << j.dump() << '\n';
        }
    } else {
        sink.out() << "threshold   global-f1   nodiff-f1   diff-f1\n";
        for (const auto& [threshold, report] : sweep) {
            char buf[120];
            std::snprintf(buf, sizeof(buf), "%9.4g %11.3f %11.3f %9.3f\n", threshold,
                          report.global.mean.f1, report.no_diff.mean.f1, report.diff.mean.f1);
            sink.out() << buf;
        }
    }
    return 0;
}

int cmd_stats(const Options& opt) {
    Dataset ds = load_dataset(opt.input);
    DatasetStats st = dataset_stats(ds);
    Output sink(opt.output);
    if (opt.format == "jsonLines") {
        nlohmann::json j{
            {"pairs", st.pair_count},
            {"spanPairs", st.span_pair_count},
            {"dissimilarSpans", st.dissimilar_span_count},
            {"equivalentSpans", st.equivalent_span_count},
            {"dissimilarPairs", st.dissimilar_pair_count},
            {"equivalentPairs", st.equivalent_pair_count},
            {"sentenceWordLength", {{"mean", st.sentence_word_length.mean}, {"sd", st.sentence_word_length.sd}}},
            {"spanWordLength", {{"mean", st.span_word_length.mean}, {"sd", st.span_word_length.sd}}},
            {"spansPerSentence", {{"mean", st.spans_per_sentence.mean}, {"sd", st.spans_per_sentence.sd}}},
        };
        sink.out() << j.dump() << '\n';
        return 0;
    }
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "sentence pairs        %zu\n"
                  "span pairs            %zu\n"
                  "dissimilar span pairs %zu\n"
                  "equivalent span pairs %zu\n"
                  "dissimilar pairs      %zu\n"
                  "equivalent pairs      %zu\n"
                  "sentence word length  %.2f (%.2f)\n"
                  "span word length      %.2f (%.2f)\n"
                  "spans per sentence    %.2f (%.2f)\n",
                  st.pair_count, st.span_pair_count, st.dissimilar_span_count,
                  st.equivalent_span_count, st.dissimilar_pair_count, st.equivalent_pair_count,
                  st.sentence_word_length.mean, st.sentence_word_length.sd,
                  st.span_word_length.mean, st.span_word_length.sd, st.spans_per_sentence.mean,
                  st.spans_per_sentence.sd);
    Output(opt.output).out() << buf;
    return 0;
}

int cmd_export_bio(const Options& opt) {
    Dataset ds = load_dataset(opt.input);
    Output sink(opt.output);
    write_bio(sink.out(), export_bio(ds));
    return 0;
}

int cmd_render(const Options& opt) {
    std::ifstream in(opt.input);
    if (!in) throw Error("cannot open input file: " + opt.input);
    std::vector<AnnotatedRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(record_from_json_line(line));
    }
    Output sink(opt.output);
    if (opt.format == "html") {
        sink.out() << render_html(records);
    } else if (opt.format == "ansi") {
        for (const AnnotatedRecord& rec : records) sink.out() << render_ansi(rec) << '\n';
    } else {
        throw ConfigError("render supports --format ansi or html");
    }
    return 0;
}

int cmd_paraphrase(const Options& opt) {
    auto provider = make_embedding_provider(provider_config(opt));
    std::vector<LabeledPair> test_set = load_labeled_pairs(opt.input);

    ParaphraseConfig cfg;
    cfg.sts_threshold = opt.sts_threshold;
    cfg.dsd.threshold = resolve_threshold(opt);
    cfg.dsd.max_ngram_size = opt.max_ngram;
    cfg.bidirectional_gate = !opt.single_direction_gate;

    if (!opt.validation_file.empty() && (!opt.sts_grid.empty() || !opt.dsd_grid.empty())) {
        std::vector<LabeledPair> validation = load_labeled_pairs(opt.validation_file);
        std::vector<double> sts_grid = opt.sts_grid.empty()
                                           ? std::vector<double>{cfg.sts_threshold}
                                           : opt.sts_grid;
        ParaphraseMode tune_mode =
            opt.mode == "sts" ? ParaphraseMode::sts : ParaphraseMode::sts_dsd;
        cfg = tune_thresholds(validation, sts_grid, opt.dsd_grid, cfg, *provider, tune_mode);
    }

    Output sink(opt.output);
    nlohmann::json j{{"stsThreshold", cfg.sts_threshold}, {"dsdThreshold", cfg.dsd.threshold}};
    if (opt.mode == "sts" || opt.mode == "both")
        j["stsAccuracy"] = paraphrase_accuracy(test_set, cfg, *provider, ParaphraseMode::sts);
    if (opt.mode == "sts-dsd" || opt.mode == "both")
        j["stsDsdAccuracy"] =
            paraphrase_accuracy(test_set, cfg, *provider, ParaphraseMode::sts_dsd);
    if (opt.format == "jsonLines") {
        sink.out() << j.dump() << '\n';
    } else {
        sink.out() << "sts threshold: " << cfg.sts_threshold
                   << "\nspan threshold: " << cfg.dsd.threshold << '\n';
        if (j.contains("stsAccuracy"))
            sink.out() << "accuracy (sts):      " << j["stsAccuracy"].get<double>() << '\n';
        if (j.contains("stsDsdAccuracy"))
            sink.out() << "accuracy (sts+dsd):  " << j["stsDsdAccuracy"].get<double>() << '\n';
    }
    return 0;
}

void add_common_options(CLI::App* cmd, Options& opt, bool with_method = true) {
    cmd->fallthrough();  // lets --config (a top-level option) follow the subcommand
    cmd->add_option("-i,--input", opt.input, "input file")->required();
    cmd->add_option("-o,--output", opt.output, "output file (default: stdout)");
    cmd->add_option("--format", opt.format, "table | jsonLines | ansi | html");
    if (with_method) {
        cmd->add_option("--method", opt.method, "embedding | lime | shap | llm | naive | none");
        cmd->add_option("--threshold", opt.threshold, "dissimilarity threshold");
        cmd->add_option("--max-ngram", opt.max_ngram, "cap on replacement n-gram size (0 = none)");
        cmd->add_option("--provider", opt.provider, "mock | http | cached");
        cmd->add_option("--provider-endpoint", opt.provider_endpoint, "embedding endpoint URL");
        cmd->add_option("--model", opt.model, "embedding / chat model id");
        cmd->add_option("--api-key-env", opt.api_key_env,
                        "environment variable holding the bearer token");
        cmd->add_option("--cache-dir", opt.cache_dir, "directory for the embedding cache");
        cmd->add_option("--max-batch", opt.max_batch_size, "texts per embedding request");
        cmd->add_option("--max-in-flight", opt.max_in_flight, "concurrent embedding requests");
        cmd->add_option("--llm-endpoint", opt.llm_endpoint, "chat-completions endpoint URL");
        cmd->add_option("--llm-max-retries", opt.llm_max_retries,
                        "retries after a malformed llm response");
        cmd->add_option("--lime-budget", opt.lime_budget, "lime perturbation samples");
        cmd->add_option("--shap-budget", opt.shap_budget,
                        "shap permutations (0 = twice the token count)");
        cmd->add_flag("--shap-exact", opt.shap_exact, "exact shap enumeration (<= 12 tokens)");
        cmd->add_flag("--raw-unigrams", opt.raw_unigrams,
                      "match unigrams without case/punctuation normalization");
    }
    cmd->add_option("--folds", opt.folds, "cross-validation folds");
    cmd->add_option("--seed", opt.seed, "fold shuffle / sampler seed");
    cmd->add_option("--workers", opt.workers, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"span-level semantic dissimilarity toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an ini file ([subcommand] sections)");

    Options opt;

    CLI::App* annotate = app.add_subcommand("annotate", "annotate pairs with dissimilar spans");
    add_common_options(annotate, opt);
    annotate->add_flag("--bidirectional", opt.bidirectional,
                       "also annotate sentence 1 (jsonLines output)");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a method against a dataset");
    add_common_options(evaluate, opt);

    CLI::App* sweep = app.add_subcommand("sweep", "evaluate across a threshold grid");
    add_common_options(sweep, opt);
    sweep->add_option("--thresholds", opt.grid, "comma-separated threshold grid")
        ->delimiter(',')
        ->required();

    CLI::App* paraphrase =
        app.add_subcommand("paraphrase", "STS / STS+DSD paraphrase classification");
    add_common_options(paraphrase, opt);
    paraphrase->add_option("--validation", opt.validation_file, "labeled validation split");
    paraphrase->add_option("--sts-threshold", opt.sts_threshold, "similarity cutoff");
    paraphrase->add_option("--sts-grid", opt.sts_grid, "STS tuning grid")->delimiter(',');
    paraphrase->add_option("--dsd-grid", opt.dsd_grid, "span-threshold tuning grid")
        ->delimiter(',');
    paraphrase->add_flag("--single-direction-gate", opt.single_direction_gate,
                         "only gate on sentence-2 spans");
    paraphrase->add_option("--mode", opt.mode, "sts | sts-dsd | both");

    CLI::App* stats = app.add_subcommand("stats", "dataset statistics");
    add_common_options(stats, opt, false);

    CLI::App* export_bio = app.add_subcommand("export-bio", "emit BIO token tags");
    add_common_options(export_bio, opt, false);

    CLI::App* render = app.add_subcommand("render", "render annotated jsonLines records");
    add_common_options(render, opt, false);

    CLI11_PARSE(app, argc, argv);

    // precedence: flags > config file > environment > defaults; CLI11 counts
    // config-file values, so an untouched option falls back to its variable
    auto env_fallback = [&](const char* option, std::string& target, const char* var) {
        for (CLI::App* sub : app.get_subcommands()) {
            if (CLI::Option* o = sub->get_option_no_throw(option); o && o->count() > 0) return;
        }
        if (const char* value = std::getenv(var); value && *value) target = value;
    };
    env_fallback("--provider-endpoint", opt.provider_endpoint, "DSD_PROVIDER_ENDPOINT");
    env_fallback("--llm-endpoint", opt.llm_endpoint, "DSD_LLM_ENDPOINT");
    env_fallback("--model", opt.model, "DSD_MODEL");
    env_fallback("--cache-dir", opt.cache_dir, "DSD_CACHE_DIR");

    try {
        if (annotate->parsed()) return cmd_annotate(opt);
        if (evaluate->parsed()) return cmd_evaluate(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (paraphrase->parsed()) return cmd_paraphrase(opt);
        if (stats->parsed()) return cmd_stats(opt);
        if (export_bio->parsed()) return cmd_export_bio(opt);
        if (render->parsed()) return cmd_render(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
