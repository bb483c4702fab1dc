#include "coaeval/metrics/ingest.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace coaeval {

ScoreTable ingest_external_scores(const std::string& path, const std::string& metric_name,
                                  const Dataset& dataset, const std::string& aspect_name) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open external scores file: " + path);
    }

    std::string line;
    if (!std::getline(in, line) || line.rfind("instance_id,value", 0) != 0) {
        throw InvalidInputError("external scores file " + path +
                                " must start with header 'instance_id,value'");
    }

    std::set<std::string> dataset_ids;
    for (const EvaluationInstance& instance : dataset.instances) {
        dataset_ids.insert(instance.id);
    }

    ScoreTable table;
    table.dataset_id = dataset.id;
    table.metric_name = metric_name;
    table.aspect_name = aspect_name;

    std::vector<std::string> bad_rows;
    std::vector<std::string> unknown_ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::size_t comma = line.find(',');
        bool ok = comma != std::string::npos && comma > 0;
        std::string id;
        double value = 0.0;
        if (ok) {
            id = line.substr(0, comma);
            const std::string raw = line.substr(comma + 1);
            char* end = nullptr;
            value = std::strtod(raw.c_str(), &end);
            ok = end != raw.c_str() && *end == '\0';
        }
        if (!ok) {
            bad_rows.push_back(std::to_string(line_no));
            continue;
        }
        if (dataset_ids.count(id) == 0) {
            unknown_ids.push_back(id);
            continue;
        }
        if (table.rows.count(id) != 0) {
            throw InvalidInputError("external scores file " + path + " has duplicate id '" +
                                    id + "'");
        }
        MetricScore score;
        score.instance_id = id;
        score.metric_name = metric_name;
        score.aspect_name = aspect_name;
        score.value = value;
        score.provenance = Provenance::kIngested;
        table.rows[id] = std::move(score);
    }

    if (!bad_rows.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < bad_rows.size(); ++i) {
            if (i > 0) joined += ", ";
            joined += bad_rows[i];
        }
        throw InvalidInputError("external scores file " + path + " has malformed rows at lines " +
                                joined);
    }
    if (!unknown_ids.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < unknown_ids.size(); ++i) {
            if (i > 0) joined += ", ";
            joined += unknown_ids[i];
        }
        throw InvalidInputError("external scores file " + path + " names ids not in dataset '" +
                                dataset.id + "': " + joined);
    }
    return table;
}

}  // namespace coaeval
