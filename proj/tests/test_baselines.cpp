#include <catch2/catch_amalgamated.hpp>

#include "dsd/baselines.hpp"

using namespace dsd;

TEST_CASE("no_dsd always returns nothing") {
    auto s1 = Sentence::from_text("a b c");
    auto s2 = Sentence::from_text("x y z");
    CHECK(no_dsd(s1, s2).empty());
    CHECK(no_dsd(s2, s1).empty());
    CHECK(no_dsd(Sentence::from_text("q"), Sentence::from_text("q")).empty());
}

TEST_CASE("naive_dsd marks words absent from the first sentence") {
    auto s1 = Sentence::from_text("China stock index futures close higher -- Dec. 4");
    auto s2 = Sentence::from_text("China stock index futures close lower -- Jan. 24");
    auto spans = naive_dsd(s1, s2);
    REQUIRE(spans.size() == 2);
    CHECK(spans[0] == SpanAnnotation{5, 6, SpanLabel::dissimilar});  // "lower"
    CHECK(spans[1] == SpanAnnotation{7, 9, SpanLabel::dissimilar});  // "Jan. 24"
}

TEST_CASE("naive_dsd is silent on identical sentences") {
    auto s = Sentence::from_text("nothing changed at all.");
    CHECK(naive_dsd(s, s).empty());
}

TEST_CASE("naive_dsd marks everything for disjoint vocabularies") {
    auto s1 = Sentence::from_text("alpha beta gamma");
    auto s2 = Sentence::from_text("delta epsilon zeta eta");
    auto spans = naive_dsd(s1, s2);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0] == SpanAnnotation{0, 4, SpanLabel::dissimilar});
}

TEST_CASE("naive_dsd matching is exact on surface forms") {
    // case matters, and punctuation stays attached
    auto s1 = Sentence::from_text("The report came Monday.");
    auto s2 = Sentence::from_text("the report came Monday");
    auto spans = naive_dsd(s1, s2);
    REQUIRE(spans.size() == 2);
    CHECK(spans[0] == SpanAnnotation{0, 1, SpanLabel::dissimilar});  // "the" != "The"
    CHECK(spans[1] == SpanAnnotation{3, 4, SpanLabel::dissimilar});  // "Monday" != "Monday."

    // idempotent and deterministic
    CHECK(naive_dsd(s1, s2) == spans);
}
