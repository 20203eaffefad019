#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "dsd/records.hpp"
#include "dsd/text.hpp"

using namespace dsd;

namespace {

namespace fs = std::filesystem;

struct CliRun {
    int exit_code = -1;
    std::string stdout_text;
};

fs::path temp_dir() {
    fs::path dir = fs::temp_directory_path() / "dsd_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliRun run_cli(const std::string& args) {
    fs::path out = temp_dir() / "stdout.txt";
    std::string cmd = std::string(DSD_CLI_BIN) + " " + args + " > " + out.string() + " 2> " +
                      (temp_dir() / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    CliRun run;
    run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    run.stdout_text = read_file(out);
    return run;
}

fs::path write_input(const std::string& name, const std::string& content) {
    fs::path p = temp_dir() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

const char* kToyCorpus =
    "It was {{restored}} in the {{1980s}}.\tIt was {{destroyed}} in the {{eighties}}.\t0,1\t0\n"
    "Same sentence both times.\tSame sentence both times.\t\t1\n"
    "There are depots at {{Quilpie}}.\tThere are depots at {{Brisbane}}.\t0\t0\n";

}  // namespace

TEST_CASE("annotate with method none echoes pairs without spans") {
    fs::path input = write_input("toy.tsv", kToyCorpus);
    CliRun run = run_cli("annotate -i " + input.string() + " --method none");
    CHECK(run.exit_code == 0);
    CHECK(run.stdout_text ==
          "It was restored in the 1980s.\tIt was destroyed in the eighties.\t\t0\n"
          "Same sentence both times.\tSame sentence both times.\t\t1\n"
          "There are depots at Quilpie.\tThere are depots at Brisbane.\t\t0\n");
}

TEST_CASE("annotate with the naive method marks unseen words") {
    fs::path input = write_input(
        "china.tsv",
        "China stock index futures close higher -- Dec. 4\t"
        "China stock index futures close lower -- Jan. 24\t\t0\n");
    CliRun run = run_cli("annotate -i " + input.string() + " --method naive");
    CHECK(run.exit_code == 0);
    CHECK(run.stdout_text ==
          "China stock index futures close higher -- Dec. 4\t"
          "China stock index futures close {{lower}} -- {{Jan. 24}}\t0,0\t0\n");
}

TEST_CASE("annotate isolates malformed lines as record errors") {
    fs::path input = write_input("broken.tsv",
                                 "good one\tgood one\t\t1\n"
                                 "broken {{\tline\t\t1\n"
                                 "also fine\talso fine\t\t1\n");
    CliRun run = run_cli("annotate -i " + input.string() + " --method none --format jsonLines");
    CHECK(run.exit_code == 1);  // at least one record failed

    std::istringstream lines(run.stdout_text);
    std::string line;
    std::vector<AnnotatedRecord> records;
    while (std::getline(lines, line)) records.push_back(record_from_json_line(line));
    REQUIRE(records.size() == 3);
    CHECK(records[0].error.empty());
    CHECK_THAT(records[1].error, Catch::Matchers::ContainsSubstring("line 2"));
    CHECK(records[2].error.empty());
}

TEST_CASE("annotate jsonLines round-trips and feeds render") {
    fs::path input = write_input("toy2.tsv", kToyCorpus);
    fs::path records = temp_dir() / "records.jsonl";
    CliRun annotate = run_cli("annotate -i " + input.string() +
                              " --method naive --format jsonLines -o " + records.string());
    CHECK(annotate.exit_code == 0);

    std::ifstream in(records);
    std::string line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        AnnotatedRecord rec = record_from_json_line(line);
        AnnotatedRecord back = record_from_json_line(to_json(rec).dump());
        CHECK(back == rec);
        ++count;
    }
    CHECK(count == 3);

    CliRun html = run_cli("render -i " + records.string() + " --format html");
    CHECK(html.exit_code == 0);
    CHECK_THAT(html.stdout_text, Catch::Matchers::StartsWith("<!DOCTYPE html>"));
    CHECK_THAT(html.stdout_text, Catch::Matchers::ContainsSubstring("<mark>destroyed</mark>"));

    CliRun ansi = run_cli("render -i " + records.string() + " --format ansi");
    CHECK(ansi.exit_code == 0);
    CHECK_THAT(ansi.stdout_text, Catch::Matchers::ContainsSubstring("\x1b[1;31m"));
}

TEST_CASE("evaluate prints a report table and jsonLines") {
    fs::path input = write_input("toy3.tsv", kToyCorpus);
    CliRun table = run_cli("evaluate -i " + input.string() + " --method none --folds 3");
    CHECK(table.exit_code == 0);
    CHECK_THAT(table.stdout_text, Catch::Matchers::ContainsSubstring("Global"));
    CHECK_THAT(table.stdout_text, Catch::Matchers::ContainsSubstring("NoDiff"));

    CliRun json = run_cli("evaluate -i " + input.string() +
                          " --method none --folds 3 --format jsonLines");
    CHECK(json.exit_code == 0);
    EvalReport report = report_from_json(nlohmann::json::parse(json.stdout_text));
    CHECK(report.no_diff.mean.f1 == 1.0);
    CHECK(report.diff.mean.f1 == 0.0);
    CHECK(report.global.sample_count == 3);
}

TEST_CASE("stats and export-bio run on the toy corpus") {
    fs::path input = write_input("toy4.tsv", kToyCorpus);
    CliRun stats = run_cli("stats -i " + input.string() + " --format jsonLines");
    CHECK(stats.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(stats.stdout_text);
    CHECK(j["pairs"] == 3);
    CHECK(j["spanPairs"] == 3);
    CHECK(j["dissimilarSpans"] == 2);

    CliRun bio = run_cli("export-bio -i " + input.string());
    CHECK(bio.exit_code == 0);
    CHECK_THAT(bio.stdout_text, Catch::Matchers::ContainsSubstring("destroyed\tB"));
    CHECK_THAT(bio.stdout_text, Catch::Matchers::ContainsSubstring("eighties.\tO"));
    CHECK_THAT(bio.stdout_text, Catch::Matchers::ContainsSubstring("Brisbane.\tB"));
}

TEST_CASE("sweep over a grid reports one row per threshold") {
    fs::path input = write_input("toy5.tsv", kToyCorpus);
    CliRun run = run_cli("sweep -i " + input.string() +
                         " --method embedding --thresholds 0.0,0.01,inf --folds 3");
    CHECK(run.exit_code == 0);
    std::size_t rows = 0;
    std::istringstream lines(run.stdout_text);
    std::string line;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 4);  // header + three grid points
}

TEST_CASE("paraphrase command classifies a labeled TSV") {
    fs::path test_set = write_input("paws.tsv",
                                    "id\tsentence1\tsentence2\tlabel\n"
                                    "1\tsame sentence\tsame sentence\t1\n"
                                    "2\tone thing\tquite another\t0\n");
    CliRun run = run_cli("paraphrase -i " + test_set.string() +
                         " --sts-threshold 0.99 --threshold 0.01 --format jsonLines");
    CHECK(run.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(run.stdout_text);
    CHECK(j["stsAccuracy"].get<double>() == 1.0);
    CHECK(j["stsDsdAccuracy"].get<double>() == 1.0);
}

TEST_CASE("fatal errors exit with code 2") {
    CliRun run = run_cli("evaluate -i /nonexistent/path.tsv --method none");
    CHECK(run.exit_code == 2);
}

TEST_CASE("annotate drives the llm method against a scripted endpoint") {
    httplib::Server server;
    server.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        std::string user = body["messages"][1]["content"].get<std::string>();
        // echo the hypothesis from the JSON blob with one marked span
        auto blob_start = user.find("{\n");
        auto blob_end = user.find("\n}");
        nlohmann::json blob = nlohmann::json::parse(user.substr(blob_start, blob_end + 2 - blob_start));
        std::string hyp = blob["hypothesis"].get<std::string>();
        auto tokens = dsd::tokenize(hyp);
        tokens[1] = "{{" + tokens[1] + "}}";
        std::string content = "Reasoning first.\n```\n" + dsd::join_tokens(tokens) + "\n```";
        nlohmann::json reply{
            {"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    fs::path input = write_input("llm.tsv", "it was restored\tit was destroyed\n");
    CliRun run = run_cli("annotate -i " + input.string() +
                         " --method llm --llm-endpoint http://127.0.0.1:" + std::to_string(port) +
                         "/v1/chat/completions --format jsonLines");
    server.stop();
    thread.join();

    CHECK(run.exit_code == 0);
    AnnotatedRecord rec = record_from_json_line(run.stdout_text);
    CHECK(rec.error.empty());
    REQUIRE(rec.spans_on_second.size() == 1);
    CHECK(rec.spans_on_second[0] == SpanAnnotation{1, 2, SpanLabel::dissimilar});
}

TEST_CASE("option precedence is flags, then config file, then environment") {
    fs::path input = write_input("prec.tsv", "x\ty\n");
    fs::path conf = write_input("prec.ini", "[annotate]\nmodel=confmodel\n");
    fs::path err = temp_dir() / "prec_err.txt";
    auto warned_model = [&](const std::string& extra_args) {
        std::string cmd = "DSD_MODEL=envmodel " + std::string(DSD_CLI_BIN) + " annotate -i " +
                          input.string() + " --method embedding " + extra_args +
                          " > /dev/null 2> " + err.string();
        REQUIRE(std::system(cmd.c_str()) == 0);
        std::string text = read_file(err);
        auto from = text.find('\'');
        auto to = text.find('\'', from + 1);
        REQUIRE(from != std::string::npos);
        return text.substr(from + 1, to - from - 1);
    };
    CHECK(warned_model("") == "envmodel");
    CHECK(warned_model("--config " + conf.string()) == "confmodel");
    CHECK(warned_model("--config " + conf.string() + " --model flagmodel") == "flagmodel");
}
