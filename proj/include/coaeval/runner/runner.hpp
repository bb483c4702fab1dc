#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coaeval/data/dataset.hpp"
#include "coaeval/llm/client.hpp"
#include "coaeval/pipeline/pipeline.hpp"
#include "coaeval/stats/correlation.hpp"

namespace coaeval {

/// One metric to run. Flag syntax: "llmscore", "bleu",
/// "coascore:variant=full,m=5,seed=7", "ingest:path=x.csv,label=BERTScore".
struct MetricSpec {
    std::string name;  // llmscore | llmscore_cot | coascore | bleu | rouge1 |
                       // rouge2 | rougel | meteor_lite | ingest
    CoaVariant variant = CoaVariant::kFull;
    int m = 5;
    std::optional<std::uint64_t> seed;
    std::string path;   // ingest source file
    std::string label;  // ingest display name

    static MetricSpec parse(const std::string& text);

    std::string file_tag() const;
    std::string display_name() const;
};

struct RunConfig {
    std::string dataset_manifest;
    std::string aspect;
    std::vector<MetricSpec> metrics;
    BackendConfig backend;
    std::string out_dir;
    std::vector<std::string> formats = {"csv", "markdown"};
    std::string record_path;
    std::string templates_dir;

    static RunConfig load(const std::string& config_path);
    void validate() const;
};

/// Judge target for the configured aspect: criterion from the manifest
/// declaration, 1-5 judge scale.
AspectSpec resolve_aspect(const Dataset& dataset, const std::string& aspect_name);

/// Rule-based baseline over the dataset's references. Instances without
/// references are excluded with a reason.
ScoreTable rule_metric_table(const Dataset& dataset, const std::string& metric,
                             const std::string& aspect_name);

struct EvaluateOutcome {
    std::vector<ScoreTable> tables;
    std::vector<std::string> score_files;
    std::vector<std::string> manifest_files;
};

/// Runs every configured metric and persists one score file and one run
/// manifest per metric under out_dir. Testable core taking an injected
/// client; the CLI builds the client from the config first.
EvaluateOutcome run_evaluate(const RunConfig& config, const Dataset& dataset,
                             CompletionClient& client);

/// Runs the five pipeline variants at fixed m, sharing one stage-1 chain and
/// one stage-2 score set so only stage 3 differs.
EvaluateOutcome run_ablate(const RunConfig& config, const Dataset& dataset,
                           CompletionClient& client, int m, std::optional<std::uint64_t> seed);

struct CorrelateOutcome {
    CorrelationReport report;
    std::vector<std::string> report_files;
};

/// Pairs persisted score files with the dataset and writes the correlation
/// report in every requested format.
CorrelateOutcome run_correlate(const std::vector<std::string>& score_files,
                               const Dataset& dataset, const std::string& fallback_aspect,
                               const std::string& out_dir,
                               const std::vector<std::string>& formats);

}  // namespace coaeval
