#pragma once

#include <string>

#include "coaeval/core/types.hpp"
#include "coaeval/llm/client.hpp"
#include "coaeval/prompt/render.hpp"
#include "coaeval/prompt/templates.hpp"

namespace coaeval {

/// Stage tags stamped on requests so scripted backends and call counters can
/// route and attribute them.
namespace stage_tags {
inline constexpr const char* kLlmScore = "llmscore";
inline constexpr const char* kCotThink = "cot_think";
inline constexpr const char* kCotScore = "cot_score";
inline constexpr const char* kAspectGen = "aspect_gen";
inline constexpr const char* kAspectScore = "aspect_score";
inline constexpr const char* kCoaScore = "coa_score";
}  // namespace stage_tags

CompletionRequest make_judge_request(const CompletionClient& client, const RenderedPrompt& prompt,
                                     const std::string& stage_tag,
                                     const std::string& instance_hint);

struct ScalarCall {
    double value = 0.0;
    CompletionResult completion;
    bool requeried = false;
};

/// Calls the judge and parses a scalar score. A parse failure triggers one
/// cache-bypassing re-query with the identical prompt, then the error
/// propagates so the caller can record the exclusion.
ScalarCall complete_scalar_score(CompletionClient& client, const RenderedPrompt& prompt,
                                 const AspectSpec& aspect, const std::string& stage_tag,
                                 const std::string& instance_hint);

/// Single-prompt LLM baseline: one judge call rating the target aspect.
MetricScore llmscore(const EvaluationInstance& instance, const AspectSpec& aspect,
                     CompletionClient& client, const TemplateSet& templates);

/// Two-call chain-of-thought baseline: elicit reasoning, then the score.
MetricScore llmscore_cot(const EvaluationInstance& instance, const AspectSpec& aspect,
                         CompletionClient& client, const TemplateSet& templates);

}  // namespace coaeval
