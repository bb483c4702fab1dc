#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coaeval/pipeline/score_table.hpp"

namespace coaeval {

struct Dataset;  // data/dataset.hpp

/// Metric and human score series paired by instance id.
struct PairedSeries {
    std::vector<std::string> instance_ids;
    std::vector<double> metric_values;
    std::vector<double> human_values;  // mean over annotators
};

/// Average ranks (1-based); tied values receive the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Sample Pearson product-moment coefficient. Returns nullopt when either
/// series has zero variance. Throws InvalidInputError on length mismatch or
/// fewer than 2 points.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation: Pearson over average-rank transforms.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// Kendall tau-b with tie correction in both series:
///   (C - D) / sqrt((C + D + Tx) (C + D + Ty))
/// Returns nullopt when a denominator factor is zero.
std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// One report row: all three coefficients for a (metric, aspect) pairing.
struct CorrelationRow {
    std::string metric_name;
    std::string aspect_name;
    std::optional<double> pearson;
    std::optional<double> spearman;
    std::optional<double> kendall;
    std::size_t n_pairs = 0;
    std::size_t n_excluded = 0;
    std::string note;  // reason when the row is undefined
};

/// Terminal artifact: correlation of every metric against human judgments.
struct CorrelationReport {
    std::string dataset_id;
    std::vector<CorrelationRow> rows;
};

/// Pairs each score table with the dataset's mean human scores by instance id
/// and computes all three coefficients per (metric, aspect). Exclusions are
/// dropped from that metric's pairing only.
CorrelationReport dataset_level_correlations(const std::vector<ScoreTable>& score_tables,
                                             const Dataset& dataset);

}  // namespace coaeval
