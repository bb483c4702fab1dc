#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coaeval/core/types.hpp"

namespace coaeval {

/// Metric scores aligned to instances for one (dataset, metric, aspect).
/// Rows are keyed by instance id; instances that failed permanently land in
/// exclusions with a reason and never in rows.
struct ScoreTable {
    std::string dataset_id;
    std::string metric_name;
    std::string aspect_name;
    std::map<std::string, MetricScore> rows;
    std::vector<std::pair<std::string, std::string>> exclusions;  // (instance_id, reason)
    std::vector<std::string> warnings;

    /// Throws InvalidInputError if rows and exclusions overlap.
    void validate() const;
};

}  // namespace coaeval
