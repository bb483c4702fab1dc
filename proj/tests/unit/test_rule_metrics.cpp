#include <doctest.h>

#include <cmath>
#include <random>

#include "coaeval/metrics/rule_metrics.hpp"

using namespace coaeval;

namespace {

TokenSequence toks(const std::string& text) { return tokenize(text); }

std::string upper(std::string text) {
    for (char& c : text) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return text;
}

// Test-local unigram recall, for the monotonicity law.
double rouge1_recall(const TokenSequence& hyp, const TokenSequence& ref) {
    std::map<std::string, int> ref_counts;
    for (const auto& t : ref.tokens) ++ref_counts[t];
    std::map<std::string, int> hyp_counts;
    for (const auto& t : hyp.tokens) ++hyp_counts[t];
    int overlap = 0;
    for (const auto& [t, c] : hyp_counts) {
        auto it = ref_counts.find(t);
        if (it != ref_counts.end()) overlap += std::min(c, it->second);
    }
    return ref.empty() ? 0.0 : static_cast<double>(overlap) / static_cast<double>(ref.size());
}

std::string random_sentence(std::mt19937& rng, std::size_t length) {
    static const std::vector<std::string> words = {"the",  "cat",  "sat",   "on",   "a",
                                                   "mat",  "dog",  "ran",   "fast", "home",
                                                   "bird", "sang", "softly"};
    std::string out;
    for (std::size_t i = 0; i < length; ++i) {
        if (i > 0) out += ' ';
        out += words[rng() % words.size()];
    }
    return out;
}

}  // namespace

TEST_CASE("tokenizer lowercases and strips edge punctuation") {
    const TokenSequence seq = toks("  Hello, World!  It's 5/5. ");
    CHECK(seq.tokens == std::vector<std::string>{"hello", "world", "it's", "5/5"});
    CHECK(toks("!!! ...").empty());
    CHECK(toks("").empty());
}

TEST_CASE("bleu self-match and disjoint cases") {
    const TokenSequence hyp = toks("the cat sat on the mat");
    CHECK(bleu(hyp, {hyp}) == doctest::Approx(1.0));
    CHECK(bleu(toks("dog ran home"), {toks("bird sang softly")}) == 0.0);
    CHECK(bleu(TokenSequence{}, {toks("a b")}) == 0.0);
    CHECK_THROWS_AS(bleu(hyp, {}), InvalidInputError);
    CHECK_THROWS_AS(bleu(hyp, {TokenSequence{}}), InvalidInputError);
}

TEST_CASE("bleu matches the hand n-gram oracle") {
    // h="the cat sat", r="the cat sat down": every clipped precision is 1
    // (1-gram 3/3; smoothed higher orders (2+1)/(2+1), (1+1)/(1+1), (0+1)/(0+1)),
    // so the score is just the brevity penalty exp(1 - 4/3).
    const double expected_short = std::exp(1.0 - 4.0 / 3.0);
    CHECK(bleu(toks("the cat sat"), {toks("the cat sat down")}) ==
          doctest::Approx(expected_short).epsilon(1e-9));

    // h="the the the cat", r="the cat": hand-counted clipped precisions
    // 2/4, (1+1)/(3+1), (0+1)/(2+1), (0+1)/(1+1); c=4 >= r=2 so no penalty.
    const double expected_clip =
        std::exp((std::log(0.5) + std::log(0.5) + std::log(1.0 / 3.0) + std::log(0.5)) / 4.0);
    CHECK(bleu(toks("the the the cat"), {toks("the cat")}) ==
          doctest::Approx(expected_clip).epsilon(1e-9));
}

TEST_CASE("bleu multi-reference clipping and closest-length penalty") {
    const TokenSequence hyp = toks("the cat sat");
    // Second reference is longer; closest length is 3, so no penalty applies.
    const double value = bleu(hyp, {toks("the cat sat"), toks("the cat sat down and slept")});
    CHECK(value == doctest::Approx(1.0));
}

TEST_CASE("rouge variants match hand oracles") {
    CHECK(rouge(toks("the cat sat"), toks("the cat sat"), RougeVariant::kRouge1) ==
          doctest::Approx(1.0));
    CHECK(rouge(toks("the cat sat"), toks("the cat sat"), RougeVariant::kRouge2) ==
          doctest::Approx(1.0));
    CHECK(rouge(toks("the cat sat"), toks("the cat sat"), RougeVariant::kRougeL) ==
          doctest::Approx(1.0));

    CHECK(rouge(toks("dog ran"), toks("bird sang"), RougeVariant::kRouge1) == 0.0);

    // LCS("the cat sat", "the cat ate") = 2, P = R = 2/3, F1 = 2/3.
    CHECK(rouge(toks("the cat sat"), toks("the cat ate"), RougeVariant::kRougeL) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-9));

    // rouge1: overlap 3, P = 1, R = 3/4 -> F1 = 6/7.
    CHECK(rouge(toks("the cat sat"), toks("the cat sat down"), RougeVariant::kRouge1) ==
          doctest::Approx(6.0 / 7.0));

    CHECK_THROWS_AS(rouge(toks("a"), TokenSequence{}, RougeVariant::kRouge1),
                    InvalidInputError);
    CHECK(rouge(TokenSequence{}, toks("a"), RougeVariant::kRougeL) == 0.0);
}

TEST_CASE("meteor_lite hand-formula cases") {
    // Single identical token: Fmean 1, one chunk over one match, penalty 0.5.
    CHECK(meteor_lite(toks("cat"), toks("cat")) == doctest::Approx(0.5).epsilon(1e-9));

    // Identical 4-token sentence: 1 - 0.5 * (1/4)^3.
    CHECK(meteor_lite(toks("the cat sat down"), toks("the cat sat down")) ==
          doctest::Approx(0.9921875).epsilon(1e-9));

    CHECK(meteor_lite(toks("dog ran"), toks("bird sang")) == 0.0);
    CHECK_THROWS_AS(meteor_lite(toks("a"), TokenSequence{}), InvalidInputError);
}

TEST_CASE("meteor_lite stem stage aligns inflected forms") {
    CHECK(stem_token("jumping") == "jump");
    CHECK(stem_token("jumps") == "jump");
    CHECK(stem_token("matches") == "match");
    CHECK(stem_token("cat") == "cat");

    // "jumps" only aligns with "jumping" through the stem stage: 3 matches in
    // one chunk, so the score equals the identical-3-token case.
    const double stemmed = meteor_lite(toks("the dog jumps"), toks("the dog jumping"));
    CHECK(stemmed == doctest::Approx(1.0 - 0.5 / 27.0).epsilon(1e-9));

    // Reordering splits the alignment into two chunks.
    const double reordered = meteor_lite(toks("mat the"), toks("the mat"));
    CHECK(reordered == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("rule metrics are invariant under case changes") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::string h = random_sentence(rng, 1 + rng() % 8);
        const std::string r = random_sentence(rng, 1 + rng() % 8);
        CHECK(bleu(toks(h), {toks(r)}) == doctest::Approx(bleu(toks(upper(h)), {toks(upper(r))})));
        CHECK(rouge(toks(h), toks(r), RougeVariant::kRougeL) ==
              doctest::Approx(rouge(toks(upper(h)), toks(upper(r)), RougeVariant::kRougeL)));
        CHECK(meteor_lite(toks(h), toks(r)) ==
              doctest::Approx(meteor_lite(toks(upper(h)), toks(upper(r)))));
    }
}

TEST_CASE("rule metric outputs stay within [0, 1]") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const TokenSequence h = toks(random_sentence(rng, 1 + rng() % 10));
        const TokenSequence r = toks(random_sentence(rng, 1 + rng() % 10));
        for (double value :
             {bleu(h, {r}), rouge(h, r, RougeVariant::kRouge1),
              rouge(h, r, RougeVariant::kRouge2), rouge(h, r, RougeVariant::kRougeL),
              meteor_lite(h, r)}) {
            CHECK(value >= 0.0);
            CHECK(value <= 1.0);
        }
    }
}

TEST_CASE("rouge1 recall never decreases when appending a reference token") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const TokenSequence ref = toks(random_sentence(rng, 2 + rng() % 8));
        TokenSequence hyp = toks(random_sentence(rng, 1 + rng() % 8));
        const double before = rouge1_recall(hyp, ref);
        hyp.tokens.push_back(ref.tokens[rng() % ref.tokens.size()]);
        CHECK(rouge1_recall(hyp, ref) >= before);
    }
}
