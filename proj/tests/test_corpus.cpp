#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "dsd/corpus.hpp"
#include "dsd/rng.hpp"

using namespace dsd;

namespace {

const char* kTable1Row =
    "It was {{restored}} in the {{1980s}}.\tIt was {{destroyed}} in the {{eighties}}.\t0,1\t0";

}  // namespace

TEST_CASE("parse_pair reads a two-span record") {
    AnnotatedPair pair = parse_pair(kTable1Row);
    CHECK(pair.sentence1.text == "It was restored in the 1980s.");
    CHECK(pair.sentence2.text == "It was destroyed in the eighties.");
    CHECK(pair.pair_label == PairLabel::dissimilar);
    REQUIRE(pair.span_pairs.size() == 2);

    CHECK(pair.span_pairs[0].on_first == SpanAnnotation{2, 3, SpanLabel::dissimilar});
    CHECK(pair.span_pairs[0].on_second == SpanAnnotation{2, 3, SpanLabel::dissimilar});
    CHECK(pair.span_pairs[0].label == SpanLabel::dissimilar);
    // "{{1980s}}." leaves the period outside the markers but the span owns
    // the whole token
    CHECK(pair.span_pairs[1].on_first == SpanAnnotation{5, 6, SpanLabel::equivalent});
    CHECK(pair.span_pairs[1].on_second == SpanAnnotation{5, 6, SpanLabel::equivalent});
    CHECK(pair.sentence1.tokens[5] == "1980s.");
}

TEST_CASE("parse_pair accepts a pair without annotations") {
    AnnotatedPair pair = parse_pair("Same text here.\tSame text here.\t\t1");
    CHECK(pair.span_pairs.empty());
    CHECK(pair.pair_label == PairLabel::equivalent);
}

TEST_CASE("parse_pair rejects malformed records") {
    CHECK_THROWS_AS(parse_pair("a {{b\ta c\t0\t0"), ParseError);              // unbalanced
    CHECK_THROWS_AS(parse_pair("a {{b {{c}} d}}\ta {{x}}\t0\t0"), ParseError);  // nested
    CHECK_THROWS_AS(parse_pair("a {{b}}\ta x\t0\t0"), ParseError);            // span count
    CHECK_THROWS_AS(parse_pair("a {{b}}\ta {{x}}\t0,1\t0"), ParseError);      // label count
    CHECK_THROWS_AS(parse_pair("a {{b}}\ta {{x}}\t2\t0"), ParseError);        // bad span label
    CHECK_THROWS_AS(parse_pair("a {{b}}\ta {{x}}\t0\t3"), ParseError);        // bad pair label
    CHECK_THROWS_AS(parse_pair("a b\ta b\t\t1\textra"), ParseError);          // field count
    CHECK_THROWS_AS(parse_pair("a {{}} b\ta {{x}} b\t0\t0"), ParseError);     // empty span
}

TEST_CASE("serialize_pair reproduces the annotated record byte for byte") {
    AnnotatedPair pair = parse_pair(kTable1Row);
    CHECK(serialize_pair(pair) == kTable1Row);
}

TEST_CASE("serialize_pair emits an empty label field for span-free pairs") {
    AnnotatedPair pair = parse_pair("Same text.\tSame text.\t\t1");
    CHECK(serialize_pair(pair) == "Same text.\tSame text.\t\t1");
}

namespace {

AnnotatedPair random_valid_pair(Rng& rng) {
    auto make_side = [&](std::vector<SpanAnnotation>& spans, std::size_t n_spans) {
        std::vector<std::string> tokens;
        spans.clear();
        for (std::size_t s = 0; s < n_spans; ++s) {
            // gap, then a span of 1..3 tokens
            std::size_t gap = rng.next_index(3) + (s == 0 ? 0 : 1);
            for (std::size_t g = 0; g < gap; ++g)
                tokens.push_back("w" + std::to_string(rng.next_index(50)));
            std::size_t len = 1 + rng.next_index(3);
            SpanAnnotation span{tokens.size(), tokens.size() + len, SpanLabel::dissimilar};
            for (std::size_t t = 0; t < len; ++t)
                tokens.push_back("s" + std::to_string(rng.next_index(50)));
            spans.push_back(span);
        }
        std::size_t tail = 1 + rng.next_index(3);
        for (std::size_t g = 0; g < tail; ++g)
            tokens.push_back("w" + std::to_string(rng.next_index(50)));
        tokens.back() += rng.next_bool(0.5) ? "." : "";
        return Sentence::from_text(join_tokens(tokens));
    };

    AnnotatedPair pair;
    std::size_t n_spans = rng.next_index(4);
    std::vector<SpanAnnotation> spans1, spans2;
    pair.sentence1 = make_side(spans1, n_spans);
    pair.sentence2 = make_side(spans2, n_spans);
    for (std::size_t i = 0; i < n_spans; ++i) {
        SpanLabel label = rng.next_bool(0.5) ? SpanLabel::dissimilar : SpanLabel::equivalent;
        spans1[i].label = spans2[i].label = label;
        pair.span_pairs.push_back({spans1[i], spans2[i], label});
    }
    pair.pair_label = pair.has_dissimilar_spans() ? PairLabel::dissimilar : PairLabel::equivalent;
    return pair;
}

}  // namespace

TEST_CASE("1000 random pairs round-trip through serialize/parse") {
    Rng rng(20240517);
    for (int i = 0; i < 1000; ++i) {
        AnnotatedPair pair = random_valid_pair(rng);
        AnnotatedPair back = parse_pair(serialize_pair(pair));
        REQUIRE(back == pair);
    }
}

TEST_CASE("span token ranges map back to contiguous substrings") {
    Rng rng(77);
    for (int i = 0; i < 200; ++i) {
        AnnotatedPair pair = random_valid_pair(rng);
        for (const SpanPair& sp : pair.span_pairs) {
            const Sentence& s = pair.sentence2;
            std::size_t begin = s.offsets[sp.on_second.start].begin;
            std::size_t end = s.offsets[sp.on_second.end - 1].end;
            std::string slice = s.text.substr(begin, end - begin);
            CHECK(tokenize(slice) ==
                  std::vector<std::string>(s.tokens.begin() + sp.on_second.start,
                                           s.tokens.begin() + sp.on_second.end));
        }
    }
}

TEST_CASE("load_dataset attaches line numbers to parse errors") {
    std::istringstream good("a\ta\t\t1\nb {{x}}\tb {{y}}\t0\t0\n");
    Dataset ds = load_dataset(good, "mem");
    CHECK(ds.size() == 2);

    std::istringstream empty("");
    CHECK_THROWS_WITH(load_dataset(empty, "mem"), Catch::Matchers::ContainsSubstring("empty"));

    std::string text;
    for (int i = 0; i < 6; ++i) text += "a\ta\t\t1\n";
    text += "broken {{\tline\t\t1\n";
    std::istringstream bad(text);
    try {
        load_dataset(bad, "mem");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("line 7"));
    }
}

TEST_CASE("dataset_stats on a hand-computed toy set") {
    std::istringstream in(
        "The {{old barn}} fell down.\tThe {{new house}} fell down.\t0\t0\n"
        "We saw {{a}} light -- {{yesterday}}\tWe saw {{the}} light -- {{last night}}\t1,1\t1\n");
    Dataset ds = load_dataset(in, "toy");
    DatasetStats st = dataset_stats(ds);

    CHECK(st.pair_count == 2);
    CHECK(st.span_pair_count == 3);
    CHECK(st.dissimilar_span_count == 1);
    CHECK(st.equivalent_span_count == 2);
    CHECK(st.dissimilar_pair_count == 1);
    CHECK(st.equivalent_pair_count == 1);

    // word counts: 5, 5, 5, 6 ("--" is not a word)
    CHECK(st.sentence_word_length.mean == Catch::Approx(5.25));
    CHECK(st.sentence_word_length.sd == Catch::Approx(0.5));
    // span word counts: 2, 2, 1, 1, 1, 2
    CHECK(st.span_word_length.mean == Catch::Approx(1.5));
    // spans per pair: 1, 2
    CHECK(st.spans_per_sentence.mean == Catch::Approx(1.5));
}

TEST_CASE("dataset_stats handles a single span-free pair") {
    std::istringstream in("a b\ta b\t\t1\n");
    DatasetStats st = dataset_stats(load_dataset(in, "toy"));
    CHECK(st.span_pair_count == 0);
    CHECK(st.spans_per_sentence.mean == 0.0);
    CHECK(st.spans_per_sentence.sd == 0.0);
}

TEST_CASE("export_bio tags dissimilar spans only") {
    std::istringstream in(
        "It was {{restored}} in the {{1980s}}.\tIt was {{destroyed}} in the {{eighties}}.\t0,1\t0\n"
        "same here\tsame here\t\t1\n"
        "x {{a b}} y\tx {{c d}} y\t0\t0\n");
    Dataset ds = load_dataset(in, "toy");
    auto bio = export_bio(ds);
    REQUIRE(bio.size() == 3);

    auto tags = [](const std::vector<BioToken>& sent) {
        std::string out;
        for (const BioToken& t : sent) out += t.tag;
        return out;
    };
    CHECK(tags(bio[0]) == "OOBOOO");  // punctuation attached to the final token
    CHECK(tags(bio[1]) == "OO");
    CHECK(tags(bio[2]) == "OBIO");

    // exactly one tag per token; B count equals dissimilar span count
    std::size_t b_count = 0;
    for (std::size_t i = 0; i < bio.size(); ++i) {
        CHECK(bio[i].size() == ds.pairs[i].sentence2.size());
        for (const BioToken& t : bio[i]) b_count += t.tag == 'B' ? 1 : 0;
    }
    CHECK(b_count == 2);

    std::ostringstream out;
    write_bio(out, bio);
    CHECK_THAT(out.str(), Catch::Matchers::StartsWith("It\tO\nwas\tO\ndestroyed\tB\n"));
    CHECK_THAT(out.str(), Catch::Matchers::ContainsSubstring("\n\nsame\tO\n"));
}

TEST_CASE("split_folds partitions deterministically") {
    auto folds = split_folds(1000, 5, 42);
    REQUIRE(folds.size() == 5);
    std::vector<bool> seen(1000, false);
    for (const auto& fold : folds) {
        CHECK(fold.size() == 200);
        for (std::size_t idx : fold) {
            REQUIRE(idx < 1000);
            REQUIRE_FALSE(seen[idx]);
            seen[idx] = true;
        }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));

    CHECK(split_folds(1000, 5, 42) == folds);
    CHECK(split_folds(1000, 5, 43) != folds);

    // leave-one-out
    auto loo = split_folds(10, 10, 1);
    for (const auto& fold : loo) CHECK(fold.size() == 1);

    // uneven sizes differ by at most one
    auto uneven = split_folds(10, 3, 7);
    std::vector<std::size_t> sizes{uneven[0].size(), uneven[1].size(), uneven[2].size()};
    CHECK(*std::max_element(sizes.begin(), sizes.end()) -
              *std::min_element(sizes.begin(), sizes.end()) <=
          1);

    CHECK_THROWS_AS(split_folds(10, 11, 0), ConfigError);
    CHECK_THROWS_AS(split_folds(10, 0, 0), ConfigError);
}

TEST_CASE("bundled corpus matches the published global statistics") {
    Dataset ds = load_dataset(std::string(DSD_DATA_DIR) + "/ssd_synth.tsv");
    REQUIRE(ds.size() == 1000);

    DatasetStats st = dataset_stats(ds);
    CHECK(st.span_pair_count == 1296);
    CHECK(st.dissimilar_span_count == 648);
    CHECK(st.equivalent_span_count == 648);
    CHECK(st.dissimilar_pair_count == 571);
    CHECK(st.equivalent_pair_count == 429);

    CHECK(st.sentence_word_length.mean == Catch::Approx(10.75).margin(0.005));
    CHECK(st.sentence_word_length.sd == Catch::Approx(4.18).margin(0.005));
    CHECK(st.span_word_length.mean == Catch::Approx(3.91).margin(0.005));
    CHECK(st.span_word_length.sd == Catch::Approx(2.71).margin(0.005));
    CHECK(st.spans_per_sentence.mean == Catch::Approx(1.30).margin(0.005));
    CHECK(st.spans_per_sentence.sd == Catch::Approx(0.51).margin(0.005));

    // the pair-level label coincides with span-level dissimilarity
    for (const AnnotatedPair& p : ds.pairs)
        CHECK((p.pair_label == PairLabel::dissimilar) == p.has_dissimilar_spans());
}

TEST_CASE("parse_pair survives arbitrary bytes") {
    Rng rng(314159);
    for (int iter = 0; iter < 2000; ++iter) {
        std::size_t len = rng.next_index(80);
        std::string line;
        for (std::size_t i = 0; i < len; ++i) {
            switch (rng.next_index(8)) {
                case 0: line += '{'; break;
                case 1: line += '}'; break;
                case 2: line += '\t'; break;
                case 3: line += ','; break;
                default: line += static_cast<char>(32 + rng.next_index(95)); break;
            }
        }
        try {
            parse_pair(line);
        } catch (const ParseError&) {
            // typed rejection is the only acceptable failure
        }
    }
    SUCCEED("no crashes");
}

TEST_CASE("BIO export of the bundled corpus tags every dissimilar span once") {
    Dataset ds = load_dataset(std::string(DSD_DATA_DIR) + "/ssd_synth.tsv");
    auto bio = export_bio(ds);
    std::size_t b_tags = 0;
    for (std::size_t i = 0; i < bio.size(); ++i) {
        REQUIRE(bio[i].size() == ds.pairs[i].sentence2.size());
        for (const BioToken& t : bio[i]) b_tags += t.tag == 'B' ? 1 : 0;
    }
    CHECK(b_tags == 648);
}
