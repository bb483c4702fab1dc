#include "coaeval/report/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace coaeval {

namespace {

constexpr const char* kUndefinedCell = "—";

std::string format_value(double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    return buffer;
}

}  // namespace

std::string format_coefficient(const std::optional<double>& value) {
    if (!value) {
        return kUndefinedCell;
    }
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.3f", *value);
    return buffer;
}

std::string render_correlation_markdown(const CorrelationReport& report) {
    std::ostringstream out;
    out << "## Dataset-level correlations: " << report.dataset_id << "\n\n";
    out << "| Metric | Aspect | γ | ρ | τ | n_pairs | n_excluded |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const CorrelationRow& row : report.rows) {
        out << "| " << row.metric_name << " | " << row.aspect_name << " | "
            << format_coefficient(row.pearson) << " | " << format_coefficient(row.spearman)
            << " | " << format_coefficient(row.kendall) << " | " << row.n_pairs << " | "
            << row.n_excluded << " |\n";
    }
    return out.str();
}

std::string render_correlation_csv(const CorrelationReport& report) {
    std::ostringstream out;
    out << "metric,aspect,pearson,spearman,kendall,n_pairs,n_excluded\n";
    for (const CorrelationRow& row : report.rows) {
        out << row.metric_name << ',' << row.aspect_name << ','
            << format_coefficient(row.pearson) << ',' << format_coefficient(row.spearman) << ','
            << format_coefficient(row.kendall) << ',' << row.n_pairs << ',' << row.n_excluded
            << '\n';
    }
    return out.str();
}

void write_score_csv(const ScoreTable& table, const std::string& path) {
    std::ostringstream out;
    out << "instance_id,value,provenance\n";
    for (const auto& [id, score] : table.rows) {
        out << id << ',' << format_value(score.value) << ',' << to_string(score.provenance)
            << '\n';
    }
    write_text_file(path, out.str());
}

ScoreTable read_score_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open score file: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("instance_id,value", 0) != 0) {
        throw InvalidInputError("score file " + path +
                                " must start with header 'instance_id,value,provenance'");
    }
    ScoreTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::size_t first = line.find(',');
        const std::size_t second = first == std::string::npos
                                       ? std::string::npos
                                       : line.find(',', first + 1);
        if (first == std::string::npos || second == std::string::npos) {
            throw InvalidInputError("malformed score row at " + path + ":" +
                                    std::to_string(line_no));
        }
        MetricScore score;
        score.instance_id = line.substr(0, first);
        const std::string raw_value = line.substr(first + 1, second - first - 1);
        char* end = nullptr;
        score.value = std::strtod(raw_value.c_str(), &end);
        if (end == raw_value.c_str()) {
            throw InvalidInputError("malformed score value at " + path + ":" +
                                    std::to_string(line_no));
        }
        score.provenance = provenance_from_string(line.substr(second + 1));
        table.rows[score.instance_id] = std::move(score);
    }
    return table;
}

void write_text_file(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write file: " + path);
    }
    out << text;
}

}  // namespace coaeval
