#pragma once

#include <string>
#include <vector>

#include "coaeval/core/types.hpp"

namespace coaeval {

struct AspectListParse {
    AspectChain chain;
    std::vector<std::string> warnings;
};

/// Extracts up to expected_m (name, description) pairs from "Name: description"
/// lines. Tolerates numbering, bullets and bold markers; names are normalized
/// and deduplicated keeping the first occurrence, order as encountered.
/// Zero parseable pairs is a ParseError.
AspectListParse parse_aspect_list(const std::string& text, std::size_t expected_m,
                                  const AspectSpec& target);

/// Parses a name -> score object out of judge text. Primary path: the first
/// JSON object found in the text. Fallback: "Name: number" lines. Names are
/// matched against expected_names after normalization; values are clamped to
/// the scale; expected names never seen land in `missing`. Foreign names are
/// ignored. ParseError when no expected name is found at all.
AspectScoreSet parse_score_map(const std::string& text,
                               const std::vector<std::string>& expected_names,
                               double scale_min = 1.0, double scale_max = 5.0);

/// First numeric token inside the scale, tolerating prefixes like "Score:"
/// and suffixes like "/5". Out-of-range tokens are skipped; no in-range token
/// is a ParseError.
double parse_scalar_score(const std::string& text, const AspectSpec& scale);

}  // namespace coaeval
