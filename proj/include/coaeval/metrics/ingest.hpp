#pragma once

#include <string>

#include "coaeval/data/dataset.hpp"
#include "coaeval/pipeline/score_table.hpp"

namespace coaeval {

/// Reads precomputed per-instance scores ("instance_id,value" with header)
/// into a score table with ingested provenance. Ids outside the dataset and
/// duplicate ids are errors; malformed rows are reported with line numbers.
ScoreTable ingest_external_scores(const std::string& path, const std::string& metric_name,
                                  const Dataset& dataset, const std::string& aspect_name);

}  // namespace coaeval
