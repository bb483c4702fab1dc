#pragma once

#include <map>
#include <string>

#include "coaeval/core/types.hpp"
#include "coaeval/prompt/templates.hpp"

namespace coaeval {

/// A fully substituted prompt. Bindings record a short digest per placeholder
/// value for diagnostics; the text carries no unresolved markers.
struct RenderedPrompt {
    PromptStage stage = PromptStage::kLlmScore;
    std::string text;
    std::map<std::string, std::string> placeholder_bindings;
};

/// Single-prompt target-aspect rating (the LLMScore prompt).
RenderedPrompt render_llmscore_prompt(const PromptTemplate& tmpl, const AspectSpec& aspect,
                                      const EvaluationInstance& instance);

/// First CoT turn: same framing, closing with the step-by-step trigger line.
RenderedPrompt render_cot_prompt(const PromptTemplate& tmpl, const AspectSpec& aspect,
                                 const EvaluationInstance& instance);

/// Second CoT turn: the first turn plus the judge's reasoning, closing with
/// the score elicitation. Empty reasoning is an error.
RenderedPrompt render_cot_score_prompt(const RenderedPrompt& first_turn,
                                       const std::string& reasoning, const AspectSpec& aspect);

/// Asks for m aspects relevant to the target aspect for the given task kind.
RenderedPrompt render_aspect_generation_prompt(const PromptTemplate& tmpl,
                                               const AspectSpec& aspect, TaskKind task_kind,
                                               int m);

/// Rates every chain aspect at once, eliciting a name -> score object.
RenderedPrompt render_aspect_scoring_prompt(const PromptTemplate& tmpl, const AspectChain& chain,
                                            const EvaluationInstance& instance);

/// Final chain-of-aspects rating. include_scores=false renders the same
/// prompt without the per-aspect score lines (ablation variant).
RenderedPrompt render_coa_prompt(const PromptTemplate& tmpl, const AspectSpec& aspect,
                                 const EvaluationInstance& instance,
                                 const ChainKnowledge& knowledge, bool include_scores = true);

/// Formats a judge score the way prompts print them ("5.0", "4.5").
std::string format_prompt_score(double score);

}  // namespace coaeval
