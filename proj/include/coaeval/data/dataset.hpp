#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "coaeval/core/types.hpp"

namespace coaeval {

/// One aspect annotated in a dataset, with its native human score scale.
struct AspectDeclaration {
    std::string name;       // normalized
    std::string criterion;  // evaluation question; required to judge this aspect
    double scale_min = 1.0;
    double scale_max = 5.0;
    int annotator_count = 0;  // 0 when the corpus does not fix it
};

/// Describes where a normalized dataset lives and what it must contain.
struct DatasetManifest {
    std::string id;
    TaskKind task = TaskKind::kDialog;
    std::string data_path;  // resolved relative to the manifest file
    std::vector<AspectDeclaration> aspects;
    std::size_t expected_size = 0;

    static DatasetManifest load(const std::string& manifest_path);
    void save(const std::string& manifest_path) const;
};

/// A loaded, validated corpus in the normalized instance schema.
struct Dataset {
    std::string id;
    TaskKind task = TaskKind::kDialog;
    std::vector<AspectDeclaration> aspects;
    std::vector<EvaluationInstance> instances;  // file order
    std::vector<std::string> warnings;

    const AspectDeclaration* find_aspect(const std::string& normalized_name) const;
    const EvaluationInstance* find_instance(const std::string& id) const;

    /// Mean annotator score for (instance, aspect), native scale.
    std::optional<double> mean_human_score(const EvaluationInstance& instance,
                                           const std::string& aspect_name) const;
};

/// Loads the manifest's normalized data file. Missing fields raise an error
/// naming the instance and field; a size mismatch is only a warning.
Dataset load_dataset(const DatasetManifest& manifest);

/// Writes a dataset back out in the normalized line-delimited format.
void save_dataset(const Dataset& dataset, const std::string& path);

struct ValidationIssue {
    std::string instance_id;
    std::string kind;  // duplicate-id | empty-hypothesis | missing-aspect | score-range
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool clean() const { return issues.empty(); }
};

/// Structural checks against the manifest. Reports, never throws.
ValidationReport validate_dataset(const Dataset& dataset, const DatasetManifest& manifest);

}  // namespace coaeval
