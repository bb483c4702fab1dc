#include "coaeval/data/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

namespace coaeval {

namespace {

using ordered_json = nlohmann::ordered_json;

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open file: " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("malformed JSON in " + path + ": " + ex.what());
    }
}

std::vector<double> parse_score_list(const nlohmann::json& value) {
    std::vector<double> scores;
    if (value.is_number()) {
        scores.push_back(value.get<double>());
    } else if (value.is_array()) {
        for (const auto& item : value) {
            scores.push_back(item.get<double>());
        }
    }
    return scores;
}

}  // namespace

DatasetManifest DatasetManifest::load(const std::string& manifest_path) {
    const auto doc = read_json_file(manifest_path);
    DatasetManifest manifest;
    try {
        manifest.id = doc.at("id").get<std::string>();
        manifest.task = task_kind_from_string(doc.at("task").get<std::string>());
        manifest.data_path = doc.at("data").get<std::string>();
        manifest.expected_size = doc.value("expected_size", std::size_t{0});
        for (const auto& entry : doc.at("aspects")) {
            AspectDeclaration decl;
            decl.name = normalize_aspect_name(entry.at("name").get<std::string>());
            decl.criterion = entry.value("criterion", "");
            decl.scale_min = entry.value("scale_min", 1.0);
            decl.scale_max = entry.value("scale_max", 5.0);
            decl.annotator_count = entry.value("annotators", 0);
            manifest.aspects.push_back(std::move(decl));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("bad dataset manifest " + manifest_path + ": " + ex.what());
    }
    if (manifest.aspects.empty()) {
        throw ConfigError("dataset manifest " + manifest_path + " declares no aspects");
    }
    if (manifest.expected_size == 0) {
        throw ConfigError("dataset manifest " + manifest_path + " needs expected_size > 0");
    }
    // Data path is relative to the manifest's own directory.
    const auto base = std::filesystem::path(manifest_path).parent_path();
    const std::filesystem::path data(manifest.data_path);
    if (data.is_relative()) {
        manifest.data_path = (base / data).string();
    }
    return manifest;
}

void DatasetManifest::save(const std::string& manifest_path) const {
    ordered_json doc;
    doc["id"] = id;
    doc["task"] = to_string(task);
    doc["data"] = data_path;
    doc["expected_size"] = expected_size;
    doc["aspects"] = ordered_json::array();
    for (const AspectDeclaration& decl : aspects) {
        ordered_json entry;
        entry["name"] = decl.name;
        entry["criterion"] = decl.criterion;
        entry["scale_min"] = decl.scale_min;
        entry["scale_max"] = decl.scale_max;
        entry["annotators"] = decl.annotator_count;
        doc["aspects"].push_back(std::move(entry));
    }
    std::ofstream out(manifest_path, std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write manifest: " + manifest_path);
    }
    out << doc.dump(2) << '\n';
}

const AspectDeclaration* Dataset::find_aspect(const std::string& normalized_name) const {
    for (const AspectDeclaration& decl : aspects) {
        if (decl.name == normalized_name) {
            return &decl;
        }
    }
    return nullptr;
}

const EvaluationInstance* Dataset::find_instance(const std::string& instance_id) const {
    for (const EvaluationInstance& instance : instances) {
        if (instance.id == instance_id) {
            return &instance;
        }
    }
    return nullptr;
}

std::optional<double> Dataset::mean_human_score(const EvaluationInstance& instance,
                                                const std::string& aspect_name) const {
    const auto it = instance.human_scores.find(aspect_name);
    if (it == instance.human_scores.end() || it->second.empty()) {
        return std::nullopt;
    }
    const double sum = std::accumulate(it->second.begin(), it->second.end(), 0.0);
    return sum / static_cast<double>(it->second.size());
}

Dataset load_dataset(const DatasetManifest& manifest) {
    std::ifstream in(manifest.data_path);
    if (!in) {
        throw ConfigError("cannot open dataset file: " + manifest.data_path);
    }

    Dataset dataset;
    dataset.id = manifest.id;
    dataset.task = manifest.task;
    dataset.aspects = manifest.aspects;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError("malformed instance at " + manifest.data_path + ":" +
                              std::to_string(line_no) + ": " + ex.what());
        }

        EvaluationInstance instance;
        instance.task = manifest.task;
        const std::string where = manifest.data_path + ":" + std::to_string(line_no);
        auto require_string = [&](const char* field) {
            if (!record.contains(field) || !record.at(field).is_string()) {
                throw ConfigError("instance at " + where + " (id '" +
                                  record.value("id", "?") + "') is missing field '" + field +
                                  "'");
            }
            return record.at(field).get<std::string>();
        };
        instance.id = require_string("id");
        instance.source = require_string("source");
        instance.hypothesis = require_string("hypothesis");
        if (record.contains("fact") && record.at("fact").is_string()) {
            instance.fact = record.at("fact").get<std::string>();
        }
        if (record.contains("references")) {
            for (const auto& ref : record.at("references")) {
                instance.references.push_back(ref.get<std::string>());
            }
        }
        if (!record.contains("human_scores") || !record.at("human_scores").is_object()) {
            throw ConfigError("instance '" + instance.id + "' at " + where +
                              " is missing field 'human_scores'");
        }
        for (const auto& [name, value] : record.at("human_scores").items()) {
            instance.human_scores[normalize_aspect_name(name)] = parse_score_list(value);
        }
        for (const AspectDeclaration& decl : manifest.aspects) {
            const auto it = instance.human_scores.find(decl.name);
            if (it == instance.human_scores.end() || it->second.empty()) {
                throw ConfigError("instance '" + instance.id + "' is missing human scores for "
                                  "declared aspect '" + decl.name + "'");
            }
        }
        instance.validate();
        dataset.instances.push_back(std::move(instance));
    }

    if (manifest.expected_size != 0 && dataset.instances.size() != manifest.expected_size) {
        dataset.warnings.push_back("dataset '" + dataset.id + "' has " +
                                   std::to_string(dataset.instances.size()) +
                                   " instances, manifest expects " +
                                   std::to_string(manifest.expected_size));
    }
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write dataset file: " + path);
    }
    for (const EvaluationInstance& instance : dataset.instances) {
        ordered_json record;
        record["id"] = instance.id;
        record["task"] = to_string(instance.task);
        record["source"] = instance.source;
        if (instance.fact) {
            record["fact"] = *instance.fact;
        }
        record["hypothesis"] = instance.hypothesis;
        record["references"] = instance.references;
        ordered_json scores;
        for (const auto& [name, values] : instance.human_scores) {
            scores[name] = values;
        }
        record["human_scores"] = std::move(scores);
        out << record.dump() << '\n';
    }
}

ValidationReport validate_dataset(const Dataset& dataset, const DatasetManifest& manifest) {
    ValidationReport report;
    std::set<std::string> seen_ids;
    for (const EvaluationInstance& instance : dataset.instances) {
        if (!seen_ids.insert(instance.id).second) {
            report.issues.push_back(
                {instance.id, "duplicate-id", "instance id '" + instance.id + "' occurs twice"});
        }
        if (instance.hypothesis.empty()) {
            report.issues.push_back({instance.id, "empty-hypothesis",
                                     "instance '" + instance.id + "' has an empty hypothesis"});
        }
        for (const AspectDeclaration& decl : manifest.aspects) {
            const auto it = instance.human_scores.find(decl.name);
            if (it == instance.human_scores.end() || it->second.empty()) {
                report.issues.push_back({instance.id, "missing-aspect",
                                         "instance '" + instance.id + "' lacks scores for '" +
                                             decl.name + "'"});
                continue;
            }
            for (double value : it->second) {
                if (value < decl.scale_min || value > decl.scale_max) {
                    report.issues.push_back(
                        {instance.id, "score-range",
                         "instance '" + instance.id + "' has " + decl.name + " score " +
                             std::to_string(value) + " outside [" +
                             std::to_string(decl.scale_min) + ", " +
                             std::to_string(decl.scale_max) + "]"});
                }
            }
        }
    }
    return report;
}

}  // namespace coaeval
