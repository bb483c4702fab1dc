#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coaeval/core/types.hpp"
#include "coaeval/data/dataset.hpp"
#include "coaeval/llm/client.hpp"
#include "coaeval/pipeline/score_table.hpp"
#include "coaeval/prompt/templates.hpp"

namespace coaeval {

enum class CoaVariant {
    kFull,
    kAverage,
    kWithoutScores,
    kRandom,
    kInter,
};

std::string to_string(CoaVariant variant);
CoaVariant coa_variant_from_string(const std::string& text);

struct PipelineConfig {
    CoaVariant variant = CoaVariant::kFull;
    int m = 5;
    std::optional<std::uint64_t> seed;  // required by the random variant
    AspectSpec aspect;
    bool reuse_chain_per_dataset = true;

    void validate() const;

    /// Display name, e.g. "CoAScore_(n=5)" or "CoAScore_random_(n=10)".
    std::string metric_name() const;
};

/// Stage 1: ask the judge for m aspects relevant to the target aspect. The
/// prompt is instance-independent. When fewer than m parse, one re-query asks
/// for the full list again and the richer answer wins; degradation below m is
/// recorded as a warning. Both attempts parsing to nothing aborts the run.
AspectChain generate_relevant_aspects(const AspectSpec& aspect, TaskKind task_kind, int m,
                                      CompletionClient& client, const TemplateSet& templates,
                                      std::vector<std::string>* warnings = nullptr);

/// Stage 2: one judge call scores every chain aspect at once. Names the judge
/// omitted trigger one targeted re-query over the missing subset; whatever is
/// still absent stays in `missing`.
AspectScoreSet score_relevant_aspects(const AspectChain& chain,
                                      const EvaluationInstance& instance,
                                      CompletionClient& client, const TemplateSet& templates);

/// Chain order restricted to the aspects the score set actually covers.
ChainKnowledge assemble_knowledge(const AspectChain& chain, const AspectScoreSet& scores);

/// Seeded uniform integer draws over the target scale, one per chain aspect.
/// The same (chain names in order, seed) always yields the same scores.
AspectScoreSet randomize_scores(const AspectChain& chain, std::uint64_t seed);

/// Knowledge for the inter variant: the instance's other human-annotated
/// aspects, mean annotator score rescaled to the judge scale.
ChainKnowledge inter_aspect_knowledge(const EvaluationInstance& instance, const Dataset& dataset,
                                      const AspectSpec& target);

/// Stage 3: rate the target aspect with chain knowledge in the prompt.
/// Variant average skips the judge and returns the mean of knowledge scores;
/// random re-randomizes knowledge scores from the seed first; without_scores
/// renders descriptions only; inter behaves like full on prebuilt knowledge.
MetricScore coascore(const EvaluationInstance& instance, const AspectSpec& aspect,
                     const ChainKnowledge& knowledge, CompletionClient& client,
                     const TemplateSet& templates, CoaVariant variant,
                     std::optional<std::uint64_t> seed = std::nullopt,
                     const std::string& metric_name = "CoAScore");

/// Runs the configured variant over a whole dataset: stage 1 once per run
/// (when chains are reused), stages 2-3 per instance under bounded
/// parallelism. Per-instance failures become exclusions, never aborts.
/// chain_out, when given, receives the shared chain for run manifests.
ScoreTable evaluate_dataset(const Dataset& dataset, const PipelineConfig& config,
                            CompletionClient& client, const TemplateSet& templates,
                            AspectChain* chain_out = nullptr);

/// Fans any per-instance scorer out over the dataset with bounded
/// parallelism. A scorer that throws records an exclusion for its instance;
/// results are merged in dataset order so output never depends on scheduling.
ScoreTable map_dataset(
    const Dataset& dataset, const std::string& metric_name, const std::string& aspect_name,
    int max_concurrency,
    const std::function<MetricScore(const EvaluationInstance&, std::size_t)>& scorer);

/// Serialized "Name: description" lines of a chain, as recorded in manifests.
std::string chain_to_text(const AspectChain& chain);

/// Hex digest identifying a chain across manifests.
std::string chain_digest(const AspectChain& chain);

}  // namespace coaeval
