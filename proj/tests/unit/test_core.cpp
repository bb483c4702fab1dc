#include <doctest.h>

#include <random>

#include "coaeval/core/types.hpp"

using namespace coaeval;

TEST_CASE("normalize_aspect_name trims, lowercases and collapses whitespace") {
    CHECK(normalize_aspect_name("  Relevance ") == "relevance");
    CHECK(normalize_aspect_name("Logical Flow") == "logical flow");
    CHECK(normalize_aspect_name("relevance") == "relevance");
    CHECK(normalize_aspect_name("Maintains\t  Context") == "maintains context");
    CHECK_THROWS_AS(normalize_aspect_name("   "), InvalidInputError);
}

TEST_CASE("normalize_aspect_name is idempotent on random inputs") {
    std::mt19937 rng(7);
    const std::string alphabet = "aA bB\tcC  dD\n!?";
    for (int trial = 0; trial < 200; ++trial) {
        std::string raw;
        const std::size_t length = 1 + rng() % 24;
        for (std::size_t i = 0; i < length; ++i) {
            raw.push_back(alphabet[rng() % alphabet.size()]);
        }
        try {
            const std::string once = normalize_aspect_name(raw);
            CHECK(normalize_aspect_name(once) == once);
        } catch (const InvalidInputError&) {
            // whitespace-only draw; nothing to re-normalize
        }
    }
}

TEST_CASE("display_aspect_name title-cases normalized names") {
    CHECK(display_aspect_name("overall quality") == "Overall Quality");
    CHECK(display_aspect_name("relevance") == "Relevance");
    CHECK(display_aspect_name("logical flow") == "Logical Flow");
}

TEST_CASE("AspectSpec::make validates the scale") {
    const AspectSpec spec = AspectSpec::make(" Overall  Quality ", "How good is it?");
    CHECK(spec.name == "overall quality");
    CHECK(spec.scale_min == 1.0);
    CHECK(spec.scale_max == 5.0);
    CHECK_THROWS_AS(AspectSpec::make("x", "c", 5.0, 5.0), InvalidInputError);
    CHECK_THROWS_AS(AspectSpec::make("  ", "c"), InvalidInputError);
}

TEST_CASE("EvaluationInstance validation") {
    EvaluationInstance instance;
    instance.id = "a";
    instance.hypothesis = "hi";
    instance.human_scores["overall quality"] = {4.0, 5.0};
    CHECK_NOTHROW(instance.validate());

    instance.human_scores["fluency"] = {};
    CHECK_THROWS_AS(instance.validate(), InvalidInputError);

    instance.human_scores.erase("fluency");
    instance.hypothesis.clear();
    CHECK_THROWS_AS(instance.validate(), InvalidInputError);
}

TEST_CASE("AspectChain rejects duplicate names") {
    const AspectSpec target = AspectSpec::make("overall quality", "q?");
    std::vector<Aspect> aspects = {Aspect::make("Relevance", "d1"),
                                   Aspect::make(" relevance ", "d2")};
    CHECK_THROWS_AS(AspectChain::make(target, aspects), InvalidInputError);
}

TEST_CASE("AspectScoreSet invariants against its chain") {
    const AspectSpec target = AspectSpec::make("overall quality", "q?");
    const AspectChain chain = AspectChain::make(
        target, {Aspect::make("relevance", "d"), Aspect::make("coherence", "d")});

    AspectScoreSet scores;
    scores.scores["relevance"] = 5.0;
    scores.missing = {"coherence"};
    CHECK_NOTHROW(scores.validate_against(chain));

    scores.missing = {"relevance"};
    CHECK_THROWS_AS(scores.validate_against(chain), InvalidInputError);

    scores.missing.clear();
    scores.scores["sparkle"] = 3.0;
    CHECK_THROWS_AS(scores.validate_against(chain), InvalidInputError);
}

TEST_CASE("enum round trips") {
    for (TaskKind kind : {TaskKind::kDialog, TaskKind::kSummarization, TaskKind::kStory,
                          TaskKind::kData2Text, TaskKind::kTranslation}) {
        CHECK(task_kind_from_string(to_string(kind)) == kind);
    }
    for (Provenance provenance :
         {Provenance::kLlm, Provenance::kRule, Provenance::kIngested}) {
        CHECK(provenance_from_string(to_string(provenance)) == provenance);
    }
    for (PromptStage stage : {PromptStage::kLlmScore, PromptStage::kLlmScoreCot,
                              PromptStage::kAspectGen, PromptStage::kAspectScore,
                              PromptStage::kCoaScore}) {
        CHECK(prompt_stage_from_string(to_string(stage)) == stage);
    }
    CHECK_THROWS_AS(task_kind_from_string("poetry"), InvalidInputError);
}
