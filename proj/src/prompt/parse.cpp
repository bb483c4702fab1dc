#include "coaeval/prompt/parse.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace coaeval {

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = 0, end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

/// Strips list decorations a judge may add: bullets, "1." / "1)" numbering,
/// markdown emphasis.
std::string strip_decorations(const std::string& line) {
    std::string out = trim(line);
    std::size_t pos = 0;
    while (pos < out.size() && (out[pos] == '-' || out[pos] == '*' || out[pos] == '#')) ++pos;
    while (pos < out.size() && std::isspace(static_cast<unsigned char>(out[pos]))) ++pos;
    std::size_t digits = pos;
    while (digits < out.size() && std::isdigit(static_cast<unsigned char>(out[digits]))) ++digits;
    if (digits > pos && digits < out.size() && (out[digits] == '.' || out[digits] == ')')) {
        pos = digits + 1;
        while (pos < out.size() && std::isspace(static_cast<unsigned char>(out[pos]))) ++pos;
    }
    return out.substr(pos);
}

std::string strip_emphasis(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c != '*' && c != '_' && c != '`' && c != '"') {
            out.push_back(c);
        }
    }
    return trim(out);
}

/// Drops leading emphasis markers without touching quotes inside the text.
std::string strip_leading_emphasis(const std::string& text) {
    std::size_t pos = 0;
    while (pos < text.size() && (text[pos] == '*' || text[pos] == '_' || text[pos] == '`')) {
        ++pos;
    }
    return trim(text.substr(pos));
}

std::size_t word_count(const std::string& text) {
    std::istringstream stream(text);
    std::string word;
    std::size_t count = 0;
    while (stream >> word) ++count;
    return count;
}

/// A plausible aspect name: short, not a sentence fragment.
bool plausible_name(const std::string& candidate) {
    return !candidate.empty() && candidate.size() <= 60 && word_count(candidate) <= 6;
}

std::optional<std::pair<std::string, std::string>> split_name_line(const std::string& line) {
    const std::string stripped = strip_decorations(line);
    const std::size_t colon = stripped.find(':');
    if (colon == std::string::npos) {
        return std::nullopt;
    }
    const std::string name = strip_emphasis(stripped.substr(0, colon));
    const std::string rest = strip_leading_emphasis(stripped.substr(colon + 1));
    if (!plausible_name(name)) {
        return std::nullopt;
    }
    return std::make_pair(name, rest);
}

/// First standalone numeric token in `text`, if any.
std::optional<double> first_number(const std::string& text, std::size_t* out_pos = nullptr) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const bool starts_number =
            std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '-' || c == '+') && i + 1 < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i + 1])));
        if (!starts_number) {
            continue;
        }
        if (i > 0 && (std::isalnum(static_cast<unsigned char>(text[i - 1])) ||
                      text[i - 1] == '.')) {
            continue;  // inside a word like "v2" or "3.1.4"
        }
        char* end = nullptr;
        const double value = std::strtod(text.c_str() + i, &end);
        if (end != text.c_str() + i) {
            if (out_pos != nullptr) {
                *out_pos = static_cast<std::size_t>(end - text.c_str());
            }
            return value;
        }
    }
    return std::nullopt;
}

/// Every standalone numeric token in order of appearance.
std::vector<double> all_numbers(const std::string& text) {
    std::vector<double> numbers;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::string rest = text.substr(pos);
        std::size_t advanced = 0;
        const auto value = first_number(rest, &advanced);
        if (!value) {
            break;
        }
        numbers.push_back(*value);
        pos += advanced;
    }
    return numbers;
}

std::optional<nlohmann::json> extract_json_object(const std::string& text) {
    const std::size_t open = text.find('{');
    if (open == std::string::npos) {
        return std::nullopt;
    }
    const std::size_t close = text.rfind('}');
    if (close == std::string::npos || close <= open) {
        return std::nullopt;
    }
    try {
        auto parsed = nlohmann::json::parse(text.substr(open, close - open + 1));
        if (!parsed.is_object()) {
            return std::nullopt;
        }
        return parsed;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

double clamp_score(double value, double lo, double hi) {
    return std::min(hi, std::max(lo, value));
}

}  // namespace

AspectListParse parse_aspect_list(const std::string& text, std::size_t expected_m,
                                  const AspectSpec& target) {
    if (trim(text).empty()) {
        throw ParseError("aspect list text is empty");
    }
    if (expected_m == 0) {
        throw InvalidInputError("expected_m must be >= 1");
    }

    std::vector<Aspect> aspects;
    std::set<std::string> seen;
    std::vector<std::string> warnings;

    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto pair = split_name_line(line);
        if (!pair || pair->second.empty()) {
            continue;
        }
        std::string normalized;
        try {
            normalized = normalize_aspect_name(pair->first);
        } catch (const InvalidInputError&) {
            continue;
        }
        if (!seen.insert(normalized).second) {
            warnings.push_back("duplicate aspect '" + normalized + "' dropped");
            continue;
        }
        aspects.push_back(Aspect::make(normalized, pair->second));
    }

    if (aspects.empty()) {
        throw ParseError("no 'Name: description' pairs found in aspect list output");
    }
    if (aspects.size() > expected_m) {
        warnings.push_back("judge returned " + std::to_string(aspects.size()) +
                           " aspects, keeping the first " + std::to_string(expected_m));
        aspects.resize(expected_m);
    }

    AspectListParse result;
    result.chain = AspectChain::make(target, std::move(aspects));
    result.warnings = std::move(warnings);
    return result;
}

AspectScoreSet parse_score_map(const std::string& text,
                               const std::vector<std::string>& expected_names,
                               double scale_min, double scale_max) {
    if (expected_names.empty()) {
        throw InvalidInputError("parse_score_map needs expected names");
    }

    std::set<std::string> expected(expected_names.begin(), expected_names.end());
    std::map<std::string, double> found;

    // Primary path: a JSON object with aspect names as keys.
    if (const auto object = extract_json_object(text)) {
        for (const auto& [key, value] : object->items()) {
            std::string normalized;
            try {
                normalized = normalize_aspect_name(key);
            } catch (const InvalidInputError&) {
                continue;
            }
            if (expected.count(normalized) == 0 || found.count(normalized) != 0) {
                continue;
            }
            std::optional<double> score;
            if (value.is_number()) {
                score = value.get<double>();
            } else if (value.is_string()) {
                score = first_number(value.get<std::string>());
            }
            if (score) {
                found[normalized] = clamp_score(*score, scale_min, scale_max);
            }
        }
    }

    // Fallback path: "Name: number" lines.
    if (found.empty()) {
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            const auto pair = split_name_line(line);
            if (!pair) {
                continue;
            }
            std::string normalized;
            try {
                normalized = normalize_aspect_name(pair->first);
            } catch (const InvalidInputError&) {
                continue;
            }
            if (expected.count(normalized) == 0 || found.count(normalized) != 0) {
                continue;
            }
            if (const auto score = first_number(pair->second)) {
                found[normalized] = clamp_score(*score, scale_min, scale_max);
            }
        }
    }

    if (found.empty()) {
        throw ParseError("judge output contains none of the expected aspect names");
    }

    AspectScoreSet result;
    result.scores = std::move(found);
    for (const std::string& name : expected_names) {
        if (result.scores.count(name) == 0) {
            result.missing.push_back(name);
        }
    }
    return result;
}

double parse_scalar_score(const std::string& text, const AspectSpec& scale) {
    if (trim(text).empty()) {
        throw ParseError("scalar score text is empty");
    }
    for (double value : all_numbers(text)) {
        if (value >= scale.scale_min && value <= scale.scale_max) {
            return value;
        }
    }
    throw ParseError("no numeric token within [" + std::to_string(scale.scale_min) + ", " +
                     std::to_string(scale.scale_max) + "] in judge output");
}

}  // namespace coaeval
