#pragma once

#include <string>

#include "coaeval/pipeline/score_table.hpp"
#include "coaeval/stats/correlation.hpp"

namespace coaeval {

/// Markdown table with one row per metric, coefficients to three decimals,
/// undefined cells rendered as an em dash. Byte-stable for fixed inputs.
std::string render_correlation_markdown(const CorrelationReport& report);

/// CSV rendering of the same table.
std::string render_correlation_csv(const CorrelationReport& report);

/// "0.634" style three-decimal coefficient cell; undefined renders as an
/// em dash.
std::string format_coefficient(const std::optional<double>& value);

/// Writes a score table as "instance_id,value,provenance" rows sorted by id.
void write_score_csv(const ScoreTable& table, const std::string& path);

/// Reads a score file back. Metric and aspect names are not part of the file;
/// the caller fills them from the sibling manifest or the filename.
ScoreTable read_score_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace coaeval
