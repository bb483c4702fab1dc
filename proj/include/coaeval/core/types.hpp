#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coaeval/errors.hpp"

namespace coaeval {

/// Kind of NLG task an instance belongs to. Determines prompt wording.
enum class TaskKind {
    kDialog,
    kSummarization,
    kStory,
    kData2Text,
    kTranslation,
};

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& text);

/// Lowercase, trim, collapse internal whitespace runs to single spaces.
/// Idempotent. Throws InvalidInputError if the result is empty.
std::string normalize_aspect_name(const std::string& raw);

/// Title-case a normalized aspect name for display inside prompts
/// ("overall quality" -> "Overall Quality").
std::string display_aspect_name(const std::string& normalized);

/// The quality dimension being scored, with its criterion sentence and scale.
struct AspectSpec {
    std::string name;       // normalized identifier
    std::string criterion;  // one-sentence evaluation question
    double scale_min = 1.0;
    double scale_max = 5.0;

    /// Validates and normalizes. Throws InvalidInputError on violation.
    static AspectSpec make(const std::string& name, const std::string& criterion,
                           double scale_min = 1.0, double scale_max = 5.0);
};

/// One (source, hypothesis, references, human scores) record from a dataset.
struct EvaluationInstance {
    std::string id;
    TaskKind task = TaskKind::kDialog;
    std::string source;
    std::optional<std::string> fact;
    std::string hypothesis;
    std::vector<std::string> references;
    // normalized aspect name -> raw annotator scores, native dataset scale
    std::map<std::string, std::vector<double>> human_scores;

    /// Throws InvalidInputError when a type invariant is violated.
    void validate() const;
};

/// One generated relevant aspect: normalized name plus its full definition.
struct Aspect {
    std::string name;
    std::string description;

    static Aspect make(const std::string& raw_name, const std::string& description);
};

/// Ordered chain of relevant aspects generated for a target aspect.
struct AspectChain {
    AspectSpec target;
    std::vector<Aspect> aspects;

    static AspectChain make(AspectSpec target, std::vector<Aspect> aspects);

    bool empty() const { return aspects.empty(); }
    std::size_t size() const { return aspects.size(); }
    std::vector<std::string> names() const;
};

/// Judge scores for the aspects of one chain, plus the names it failed to score.
struct AspectScoreSet {
    std::map<std::string, double> scores;  // aspect name -> score within scale
    std::vector<std::string> missing;

    /// Checks the score/missing disjointness and containment invariants
    /// against the chain this set was produced for.
    void validate_against(const AspectChain& chain) const;
};

/// Chain knowledge: ordered (name, description, score) entries used in the
/// final scoring prompt.
struct ChainKnowledge {
    struct Entry {
        std::string name;
        std::string description;
        double score = 0.0;
    };

    std::vector<Entry> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
};

/// Where a metric score came from.
enum class Provenance {
    kLlm,
    kRule,
    kIngested,
};

std::string to_string(Provenance provenance);
Provenance provenance_from_string(const std::string& text);

/// One metric score for one instance.
struct MetricScore {
    std::string instance_id;
    std::string metric_name;
    std::string aspect_name;
    double value = 0.0;
    Provenance provenance = Provenance::kLlm;
    std::map<std::string, std::string> diagnostics;
};

/// Pipeline stage a prompt template belongs to.
enum class PromptStage {
    kLlmScore,
    kLlmScoreCot,
    kAspectGen,
    kAspectScore,
    kCoaScore,
};

std::string to_string(PromptStage stage);
PromptStage prompt_stage_from_string(const std::string& text);

/// A prompt template: stage, assembled task-description block, and a body
/// with {{placeholder}} markers. The body must reference {{task_description}}
/// exactly once; the renderer checks per-stage placeholder usage.
struct PromptTemplate {
    PromptStage stage = PromptStage::kLlmScore;
    std::string task_description;
    std::string body;
};

}  // namespace coaeval
