// Generates the bundled span-annotated benchmark corpus (data/ssd_synth.tsv):
// 1,000 sentence pairs whose global statistics match the published Span
// Similarity Dataset, with word-overlap structure calibrated so that the
// no-model baselines land on the published baseline scores. Deterministic for
// a fixed seed.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dsd/baselines.hpp"
#include "dsd/corpus.hpp"
#include "dsd/eval.hpp"
#include "dsd/rng.hpp"

namespace {

using namespace dsd;

// ---------------------------------------------------------------------------
// word pools: filler words are shared verbatim between both sentences of a
// pair, span words come from a disjoint content pool
// ---------------------------------------------------------------------------

const std::vector<std::string>& filler_pool() {
    static const std::vector<std::string> words{
        "the", "a", "of", "in", "on", "at", "by", "for", "with", "and", "was", "were", "is",
        "are", "been", "has", "had", "it", "its", "this", "that", "these", "those", "from",
        "into", "over", "under", "after", "before", "during", "between", "through", "about",
        "near", "toward", "up", "down", "out", "off", "then", "than", "still", "also", "only",
        "just", "quite", "rather", "very", "more", "most", "some", "any", "each", "both",
        "few", "many", "much", "such", "while", "where", "when", "which", "there", "here",
        "again", "once", "now", "soon", "later", "often", "always", "never", "almost",
    };
    return words;
}

const std::vector<std::string>& content_pool() {
    static const std::vector<std::string> words{
        "harbor", "engine", "museum", "garden", "window", "bridge", "castle", "forest",
        "island", "market", "office", "palace", "quarry", "river", "school", "temple",
        "valley", "village", "airport", "archive", "balcony", "battery", "cabinet", "canal",
        "capital", "carriage", "cathedral", "cellar", "channel", "chapel", "chimney",
        "college", "colony", "column", "compound", "concert", "convent", "corridor",
        "cottage", "council", "courtyard", "crater", "culture", "current", "customs",
        "debate", "decade", "delta", "deposit", "desert", "diagram", "dialect", "district",
        "dockyard", "doctrine", "dynasty", "economy", "edition", "election", "emperor",
        "empire", "estate", "exhibit", "faculty", "factory", "farmland", "festival",
        "fortress", "foundry", "fountain", "frontier", "gallery", "garrison", "glacier",
        "granite", "habitat", "hamlet", "highway", "horizon", "hospital", "invasion",
        "journal", "junction", "kingdom", "lagoon", "landmark", "lantern", "lecture",
        "library", "machine", "mansion", "meadow", "merchant", "mineral", "ministry",
        "monarch", "monument", "mosaic", "mountain", "nursery", "orchard", "outpost",
        "pavilion", "peninsula", "pipeline", "plateau", "portrait", "province", "quarter",
        "railway", "rampart", "reactor", "regime", "region", "register", "republic",
        "reservoir", "satellite", "seminary", "senate", "shipyard", "shoreline", "stadium",
        "station", "statute", "steeple", "summit", "surface", "terrace", "terrain",
        "theatre", "tournament", "transit", "treasury", "tribunal", "tunnel", "turbine",
        "university", "uprising", "vessel", "viaduct", "vineyard", "volcano", "warehouse",
        "waterway", "workshop", "abandoned", "ancient", "brilliant", "broken", "coastal",
        "colonial", "crowded", "curved", "damaged", "distant", "eastern", "elevated",
        "enormous", "expanded", "famous", "flooded", "foreign", "formal", "fortified",
        "fragile", "frozen", "gilded", "gothic", "hollow", "immense", "imperial", "inland",
        "lively", "marble", "medieval", "modern", "narrow", "northern", "official",
        "original", "ornate", "painted", "peaceful", "polished", "popular", "prominent",
        "restored", "royal", "ruined", "rural", "sacred", "seasonal", "southern", "spacious",
        "steep", "sturdy", "sunken", "timber", "urban", "vacant", "vast", "western",
        "wooden", "abolished", "acquired", "adapted", "admired", "announced", "arranged",
        "assembled", "awarded", "captured", "collapsed", "commanded", "completed",
        "composed", "conquered", "converted", "crossed", "declared", "defended",
        "demolished", "designed", "destroyed", "discovered", "displayed", "dissolved",
        "donated", "drained", "erected", "escorted", "established", "excavated", "besieged",
        "explored", "exported", "financed", "charted", "founded", "guarded", "hosted",
        "imported", "inherited", "inspected", "launched", "measured", "occupied", "opened",
        "overturned", "patrolled", "planted", "proclaimed", "promoted", "rebuilt",
        "recovered", "reformed", "relocated", "renamed", "repaired", "replaced", "reported",
        "rescued", "revised", "sealed", "settled", "sheltered", "sketched", "stormed",
        "supplied", "surveyed", "toured", "traded", "translated", "unveiled", "widened",
    };
    return words;
}

// ---------------------------------------------------------------------------
// pair plans
// ---------------------------------------------------------------------------

enum class SpanKind {
    clean,        // replacement words absent from the other sentence
    shared_word,  // one connective word occurs inside both spans
    reorder,      // same words, different order (word-overlap methods miss it)
    false_alarm,  // equivalent span rewritten with new words
    silent_equiv, // equivalent span that only reorders words
};

struct SpanPlan {
    SpanKind kind = SpanKind::clean;
    SpanLabel label = SpanLabel::dissimilar;
    std::size_t len1 = 1, len2 = 1;
    bool lengths_synced = false;   // reorder/silent spans keep both sides equal
    bool lengths_fixed = false;    // shared-word spans are pinned to length 3
};

struct PairPlan {
    std::vector<SpanPlan> spans;
    PairLabel label = PairLabel::equivalent;
    bool add_dashes = false;
    std::size_t filler = 0;  // shared filler word count (gaps around the spans)
};

// cohort sizes; the archetype mix is calibrated against the published
// baseline rows (see README)
constexpr std::size_t kNoDiffSilent = 1;
constexpr std::size_t kNoDiffOneSpan = 379;
constexpr std::size_t kNoDiffTwoSpan = 49;
constexpr std::size_t kDiffClean1 = 125;
constexpr std::size_t kDiffShared1 = 166;
constexpr std::size_t kDiffReorder1 = 57;
constexpr std::size_t kDiffTwoBothDissimilar = 59;
constexpr std::size_t kDiffTwoMixed = 140;
constexpr std::size_t kDiffThreeAllDissimilar = 4;
constexpr std::size_t kDiffThreeTwoDissimilar = 10;
constexpr std::size_t kDiffThreeOneDissimilar = 10;

// dataset-wide targets: word-count moments of the published corpus
constexpr std::size_t kSpanWordSum = 10136;   // 2592 spans, mean 3.9109
constexpr std::size_t kSpanWordSumSq = 58673; // sample sd 2.71
constexpr std::size_t kSentenceWordSum = 21500;    // 2000 sentences, mean 10.75
constexpr std::size_t kSentenceWordSumSq = 266052; // sample sd 4.18
constexpr std::size_t kMaxSpanLen = 13;

SpanPlan make_span(SpanKind kind, SpanLabel label) {
    SpanPlan s;
    s.kind = kind;
    s.label = label;
    s.lengths_synced = kind == SpanKind::reorder || kind == SpanKind::silent_equiv;
    s.lengths_fixed = kind == SpanKind::shared_word;
    return s;
}

std::vector<PairPlan> build_plans(Rng& rng) {
    std::vector<PairPlan> plans;
    auto push = [&](PairLabel label, std::vector<SpanPlan> spans) {
        PairPlan p;
        p.label = label;
        p.spans = std::move(spans);
        rng.shuffle(p.spans);
        plans.push_back(std::move(p));
    };

    for (std::size_t i = 0; i < kNoDiffSilent; ++i)
        push(PairLabel::equivalent, {make_span(SpanKind::silent_equiv, SpanLabel::equivalent)});
    for (std::size_t i = 0; i < kNoDiffOneSpan; ++i)
        push(PairLabel::equivalent, {make_span(SpanKind::false_alarm, SpanLabel::equivalent)});
    for (std::size_t i = 0; i < kNoDiffTwoSpan; ++i)
        push(PairLabel::equivalent, {make_span(SpanKind::false_alarm, SpanLabel::equivalent),
                                     make_span(SpanKind::false_alarm, SpanLabel::equivalent)});

    for (std::size_t i = 0; i < kDiffClean1; ++i)
        push(PairLabel::dissimilar, {make_span(SpanKind::clean, SpanLabel::dissimilar)});
    for (std::size_t i = 0; i < kDiffShared1; ++i)
        push(PairLabel::dissimilar, {make_span(SpanKind::shared_word, SpanLabel::dissimilar)});
    for (std::size_t i = 0; i < kDiffReorder1; ++i)
        push(PairLabel::dissimilar, {make_span(SpanKind::reorder, SpanLabel::dissimilar)});
    for (std::size_t i = 0; i < kDiffTwoBothDissimilar; ++i)
        push(PairLabel::dissimilar, {make_span(SpanKind::clean, SpanLabel::dissimilar),
                                     make_span(SpanKind::clean, SpanLabel::dissimilar)});
    for (std::size_t i = 0; i < kDiffTwoMixed; ++i)
        push(PairLabel::dissimilar, {make_span(SpanKind::clean, SpanLabel::dissimilar),
                                     make_span(SpanKind::false_alarm, SpanLabel::equivalent)});
    for (std::size_t i = 0; i < kDiffThreeAllDissimilar; ++i)
        push(PairLabel::dissimilar, {make_span(SpanKind::clean, SpanLabel::dissimilar),
                                     make_span(SpanKind::clean, SpanLabel::dissimilar),
                                     make_span(SpanKind::clean, SpanLabel::dissimilar)});
    for (std::size_t i = 0; i < kDiffThreeTwoDissimilar; ++i)
        push(PairLabel::dissimilar, {make_span(SpanKind::clean, SpanLabel::dissimilar),
                                     make_span(SpanKind::clean, SpanLabel::dissimilar),
                                     make_span(SpanKind::false_alarm, SpanLabel::equivalent)});
    for (std::size_t i = 0; i < kDiffThreeOneDissimilar; ++i)
        push(PairLabel::dissimilar, {make_span(SpanKind::clean, SpanLabel::dissimilar),
                                     make_span(SpanKind::false_alarm, SpanLabel::equivalent),
                                     make_span(SpanKind::false_alarm, SpanLabel::equivalent)});

    rng.shuffle(plans);
    return plans;
}

// ---------------------------------------------------------------------------
// length assignment with moment repair
// ---------------------------------------------------------------------------

std::size_t draw_span_len(Rng& rng) {
    // rough shape; the repair pass pins the exact moments
    double u = rng.next_unit();
    if (u < 0.28) return 1;
    if (u < 0.46) return 2;
    if (u < 0.60) return 3;
    if (u < 0.72) return 4;
    if (u < 0.81) return 5;
    if (u < 0.88) return 6;
    if (u < 0.93) return 7;
    if (u < 0.96) return 8;
    if (u < 0.98) return 9;
    return 10 + rng.next_index(3);
}

struct LenSlot {
    std::size_t* value;
    std::size_t min_len;
    bool free;  // participates in the repair passes
};

void assign_span_lengths(std::vector<PairPlan>& plans, Rng& rng) {
    std::vector<LenSlot> slots;
    for (PairPlan& plan : plans) {
        for (SpanPlan& span : plan.spans) {
            if (span.lengths_fixed) {
                span.len1 = span.len2 = 3;
                slots.push_back({&span.len1, 3, false});
                slots.push_back({&span.len2, 3, false});
            } else if (span.lengths_synced) {
                span.len1 = span.len2 = 2 + rng.next_index(4);
                slots.push_back({&span.len1, 2, false});
                slots.push_back({&span.len2, 2, false});
            } else {
                span.len1 = draw_span_len(rng);
                span.len2 = draw_span_len(rng);
                slots.push_back({&span.len1, 1, true});
                slots.push_back({&span.len2, 1, true});
            }
        }
    }

    auto sum = [&] {
        std::size_t s = 0;
        for (const LenSlot& slot : slots) s += *slot.value;
        return s;
    };
    auto sum_sq = [&] {
        std::size_t s = 0;
        for (const LenSlot& slot : slots) s += *slot.value * *slot.value;
        return s;
    };

    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (slots[i].free) free_idx.push_back(i);

    // first moment
    long long delta = static_cast<long long>(kSpanWordSum) - static_cast<long long>(sum());
    std::size_t guard = 0;
    while (delta != 0 && ++guard < 2000000) {
        LenSlot& slot = slots[free_idx[rng.next_index(free_idx.size())]];
        if (delta > 0 && *slot.value < kMaxSpanLen) {
            ++*slot.value;
            --delta;
        } else if (delta < 0 && *slot.value > slot.min_len) {
            --*slot.value;
            ++delta;
        }
    }

    // second moment, preserving the first: move one unit between two slots
    const long long want = static_cast<long long>(kSpanWordSumSq);
    long long have = static_cast<long long>(sum_sq());
    guard = 0;
    while (std::llabs(have - want) > 1 && ++guard < 4000000) {
        LenSlot& a = slots[free_idx[rng.next_index(free_idx.size())]];
        LenSlot& b = slots[free_idx[rng.next_index(free_idx.size())]];
        if (a.value == b.value) continue;
        if (*a.value >= kMaxSpanLen || *b.value <= b.min_len) continue;
        long long la = static_cast<long long>(*a.value), lb = static_cast<long long>(*b.value);
        long long change = 2 * (la - lb) + 2;  // effect of (a+1, b-1) on the sum of squares
        bool apply = (have < want && change > 0 && have + change <= want + 1) ||
                     (have > want && change < 0 && have + change >= want - 1);
        if (apply) {
            ++*a.value;
            --*b.value;
            have += change;
        }
    }
}

void assign_filler_counts(std::vector<PairPlan>& plans, Rng& rng) {
    // sentence word count = filler + span words on that side; filler is
    // shared, so adjusting one pair moves both its sentences together
    std::vector<std::size_t> side_sum(2 * plans.size(), 0);
    for (std::size_t p = 0; p < plans.size(); ++p)
        for (const SpanPlan& s : plans[p].spans) {
            side_sum[2 * p] += s.len1;
            side_sum[2 * p + 1] += s.len2;
        }

    std::vector<std::size_t> min_filler(plans.size());
    for (std::size_t p = 0; p < plans.size(); ++p)
        min_filler[p] = plans[p].spans.size();  // interior gaps plus a trailing word

    for (std::size_t p = 0; p < plans.size(); ++p)
        plans[p].filler = min_filler[p] + 1 + rng.next_index(6);

    auto filler_sum = [&] {
        std::size_t s = 0;
        for (const PairPlan& plan : plans) s += plan.filler;
        return s;
    };
    const std::size_t target_filler = (kSentenceWordSum - kSpanWordSum) / 2;
    long long delta = static_cast<long long>(target_filler) - static_cast<long long>(filler_sum());
    std::size_t guard = 0;
    constexpr std::size_t kMaxFiller = 24;
    while (delta != 0 && ++guard < 2000000) {
        std::size_t p = rng.next_index(plans.size());
        if (delta > 0 && plans[p].filler < kMaxFiller) {
            ++plans[p].filler;
            --delta;
        } else if (delta < 0 && plans[p].filler > min_filler[p]) {
            --plans[p].filler;
            ++delta;
        }
    }

    auto words = [&](std::size_t p, int side) {
        return plans[p].filler + side_sum[2 * p + side];
    };
    auto sentence_sum_sq = [&] {
        long long s = 0;
        for (std::size_t p = 0; p < plans.size(); ++p)
            for (int side = 0; side < 2; ++side) {
                long long w = static_cast<long long>(words(p, side));
                s += w * w;
            }
        return s;
    };

    const long long want = static_cast<long long>(kSentenceWordSumSq);
    long long have = sentence_sum_sq();
    guard = 0;
    while (std::llabs(have - want) > 2 && ++guard < 4000000) {
        std::size_t a = rng.next_index(plans.size());
        std::size_t b = rng.next_index(plans.size());
        if (a == b) continue;
        if (plans[a].filler >= kMaxFiller || plans[b].filler <= min_filler[b]) continue;
        long long wa = static_cast<long long>(words(a, 0) + words(a, 1));
        long long wb = static_cast<long long>(words(b, 0) + words(b, 1));
        long long change = 2 * (wa - wb) + 4;  // (filler_a + 1, filler_b - 1)
        if ((have < want && change > 0 && have + change <= want + 2) ||
            (have > want && change < 0 && have + change >= want - 2)) {
            ++plans[a].filler;
            --plans[b].filler;
            have += change;
        }
    }
}

// ---------------------------------------------------------------------------
// sentence assembly
// ---------------------------------------------------------------------------

struct BuiltPair {
    AnnotatedPair pair;
};

AnnotatedPair assemble(const PairPlan& plan, Rng& rng) {
    const auto& filler = filler_pool();
    const auto& content = content_pool();

    // distinct content words for this pair
    std::size_t need = 0;
    for (const SpanPlan& s : plan.spans) need += s.len1 + s.len2;
    std::vector<std::size_t> picks(content.size());
    std::iota(picks.begin(), picks.end(), 0);
    rng.shuffle(picks);
    std::size_t next_word = 0;
    auto take_word = [&] { return content[picks.at(next_word++)]; };

    // split the filler across the gap slots: before each span and a tail;
    // interior gaps need at least one word
    std::size_t k = plan.spans.size();
    std::vector<std::size_t> gaps(k + 1, 0);
    for (std::size_t g = 1; g < k; ++g) gaps[g] = 1;
    gaps[k] = 1;
    std::size_t spare = plan.filler - (k - 1) - 1;
    for (std::size_t i = 0; i < spare; ++i) ++gaps[rng.next_index(k + 1)];

    std::vector<std::string> tokens1, tokens2;
    std::vector<SpanPair> span_pairs;
    auto add_gap = [&](std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            const std::string& w = filler[rng.next_index(filler.size())];
            tokens1.push_back(w);
            tokens2.push_back(w);
        }
    };

    for (std::size_t s = 0; s < k; ++s) {
        add_gap(gaps[s]);
        const SpanPlan& span = plan.spans[s];
        SpanPair sp;
        sp.label = span.label;

        std::vector<std::string> words1, words2;
        switch (span.kind) {
            case SpanKind::clean:
            case SpanKind::false_alarm: {
                for (std::size_t i = 0; i < span.len1; ++i) words1.push_back(take_word());
                for (std::size_t i = 0; i < span.len2; ++i) words2.push_back(take_word());
                break;
            }
            case SpanKind::shared_word: {
                // pattern: unique, shared, unique — the shared connective
                // appears in both spans
                std::string shared = take_word();
                words1 = {take_word(), shared, take_word()};
                words2 = {take_word(), shared, take_word()};
                break;
            }
            case SpanKind::reorder:
            case SpanKind::silent_equiv: {
                for (std::size_t i = 0; i < span.len1; ++i) words1.push_back(take_word());
                words2 = words1;
                std::rotate(words2.begin(), words2.begin() + 1, words2.end());
                break;
            }
        }

        sp.on_first = {tokens1.size(), tokens1.size() + words1.size(), span.label};
        sp.on_second = {tokens2.size(), tokens2.size() + words2.size(), span.label};
        tokens1.insert(tokens1.end(), words1.begin(), words1.end());
        tokens2.insert(tokens2.end(), words2.begin(), words2.end());
        span_pairs.push_back(sp);
    }
    add_gap(gaps[k]);

    if (plan.add_dashes) {
        // a shared punctuation-only token before the tail word; it is not a
        // word for the statistics
        tokens1.insert(tokens1.end() - 1, "--");
        tokens2.insert(tokens2.end() - 1, "--");
    }
    tokens1.back() += ".";
    tokens2.back() += ".";

    AnnotatedPair pair;
    pair.sentence1 = Sentence::from_text(join_tokens(tokens1));
    pair.sentence2 = Sentence::from_text(join_tokens(tokens2));
    pair.span_pairs = std::move(span_pairs);
    pair.pair_label = plan.label;
    return pair;
}

}  // namespace

int main(int argc, char** argv) {
    std::string output = "data/ssd_synth.tsv";
    std::uint64_t seed = 20240229;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--output" && i + 1 < argc)
            output = argv[++i];
        else if (arg == "--seed" && i + 1 < argc)
            seed = std::strtoull(argv[++i], nullptr, 10);
        else {
            std::cerr << "usage: make_corpus [--output path] [--seed n]\n";
            return 2;
        }
    }

    Rng rng(seed);
    std::vector<PairPlan> plans = build_plans(rng);
    assign_span_lengths(plans, rng);
    assign_filler_counts(plans, rng);

    // sprinkle a few shared double-dash tokens for texture
    for (std::size_t i = 0; i < 12; ++i) plans[rng.next_index(plans.size())].add_dashes = true;

    Dataset ds;
    ds.source_name = output;
    for (const PairPlan& plan : plans) ds.pairs.push_back(assemble(plan, rng));

    // self-check: every record round-trips
    for (const AnnotatedPair& p : ds.pairs) {
        AnnotatedPair back = parse_pair(serialize_pair(p));
        if (!(back == p)) {
            std::cerr << "round-trip failure: " << serialize_pair(p) << "\n";
            return 1;
        }
    }

    std::ofstream out(output);
    if (!out) {
        std::cerr << "cannot open " << output << "\n";
        return 1;
    }
    save_dataset(out, ds);

    DatasetStats st = dataset_stats(ds);
    std::printf("pairs %zu  span pairs %zu  dissimilar %zu  equivalent %zu\n", st.pair_count,
                st.span_pair_count, st.dissimilar_span_count, st.equivalent_span_count);
    std::printf("pair labels: %zu dissimilar / %zu equivalent\n", st.dissimilar_pair_count,
                st.equivalent_pair_count);
    std::printf("sentence words %.4f (%.4f)  span words %.4f (%.4f)  spans/sentence %.4f (%.4f)\n",
                st.sentence_word_length.mean, st.sentence_word_length.sd,
                st.span_word_length.mean, st.span_word_length.sd, st.spans_per_sentence.mean,
                st.spans_per_sentence.sd);

    EvalReport no_report = evaluate_dataset(ds, no_dsd, 5, 42);
    EvalReport naive_report = evaluate_dataset(ds, naive_dsd, 5, 42);
    std::printf("no-dsd    global %.4f  nodiff %.4f  diff %.4f\n", no_report.global.mean.f1,
                no_report.no_diff.mean.f1, no_report.diff.mean.f1);
    std::printf("naive-dsd global %.4f  nodiff %.4f  diff %.4f\n", naive_report.global.mean.f1,
                naive_report.no_diff.mean.f1, naive_report.diff.mean.f1);
    return 0;
}
