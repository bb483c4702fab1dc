#include "coaeval/data/converters.hpp"

#include <fstream>
#include <functional>
#include <vector>

#include <json.hpp>

#include "coaeval/core/types.hpp"

namespace coaeval {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open upstream file: " + path);
    }
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write normalized file: " + path);
    }
    return out;
}

nlohmann::json parse_document(std::ifstream& in, const std::string& path) {
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("malformed JSON in " + path + ": " + ex.what());
    }
}

ordered_json base_record(const std::string& id, const std::string& task,
                         const std::string& source, const std::string& hypothesis) {
    ordered_json record;
    record["id"] = id;
    record["task"] = task;
    record["source"] = source;
    record["hypothesis"] = hypothesis;
    record["references"] = ordered_json::array();
    record["human_scores"] = ordered_json::object();
    return record;
}

std::vector<double> to_scores(const nlohmann::json& value) {
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

// Upstream: one JSON object per line with fields id, text (article), decoded
// (summary), references, expert_annotations (list of per-annotator objects
// keyed by aspect).
std::size_t convert_summeval(const std::string& in_path, const std::string& out_path) {
    auto in = open_in(in_path);
    auto out = open_out(out_path);
    std::string line;
    std::size_t line_no = 0, written = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError("malformed record at " + in_path + ":" + std::to_string(line_no) +
                              ": " + ex.what());
        }
        ordered_json record = base_record(doc.at("id").get<std::string>(), "summarization",
                                          doc.at("text").get<std::string>(),
                                          doc.at("decoded").get<std::string>());
        if (doc.contains("references")) {
            record["references"] = doc.at("references");
        }
        std::map<std::string, std::vector<double>> scores;
        for (const auto& annotation : doc.at("expert_annotations")) {
            for (const auto& [aspect, value] : annotation.items()) {
                scores[normalize_aspect_name(aspect)].push_back(value.get<double>());
            }
        }
        for (const auto& [aspect, values] : scores) {
            record["human_scores"][aspect] = values;
        }
        out << record.dump() << '\n';
        ++written;
    }
    return written;
}

// Upstream: a JSON array of contexts, each with fields context, fact and a
// responses list of {response, model, annotations: {aspect: [scores]}}.
std::size_t convert_topicalchat(const std::string& in_path, const std::string& out_path) {
    auto in = open_in(in_path);
    auto out = open_out(out_path);
    const auto doc = parse_document(in, in_path);
    std::size_t written = 0;
    std::size_t context_index = 0;
    for (const auto& entry : doc) {
        ++context_index;
        for (const auto& response : entry.at("responses")) {
            const std::string model = response.value("model", "unknown");
            ordered_json record;
            record["id"] = "tc-" + std::to_string(context_index) + "-" + model;
            record["task"] = "dialog";
            record["source"] = entry.at("context").get<std::string>();
            if (entry.contains("fact")) {
                record["fact"] = entry.at("fact").get<std::string>();
            }
            record["hypothesis"] = response.at("response").get<std::string>();
            record["references"] = ordered_json::array();
            record["human_scores"] = ordered_json::object();
            for (const auto& [aspect, value] : response.at("annotations").items()) {
                record["human_scores"][normalize_aspect_name(aspect)] = to_scores(value);
            }
            out << record.dump() << '\n';
            ++written;
        }
    }
    return written;
}

// Upstream: a JSON array of {id, beginning, story, scores}.
std::size_t convert_openmeva(const std::string& in_path, const std::string& out_path) {
    auto in = open_in(in_path);
    auto out = open_out(out_path);
    const auto doc = parse_document(in, in_path);
    std::size_t written = 0;
    for (const auto& entry : doc) {
        ordered_json record =
            base_record(entry.at("id").get<std::string>(), "story",
                        entry.at("beginning").get<std::string>(),
                        entry.at("story").get<std::string>());
        record["human_scores"]["overall"] = to_scores(entry.at("scores"));
        out << record.dump() << '\n';
        ++written;
    }
    return written;
}

// Upstream: a JSON array of {id, mr, hypothesis, references, scores}.
std::size_t convert_bagel(const std::string& in_path, const std::string& out_path) {
    auto in = open_in(in_path);
    auto out = open_out(out_path);
    const auto doc = parse_document(in, in_path);
    std::size_t written = 0;
    for (const auto& entry : doc) {
        ordered_json record = base_record(entry.at("id").get<std::string>(), "data2text",
                                          entry.at("mr").get<std::string>(),
                                          entry.at("hypothesis").get<std::string>());
        if (entry.contains("references")) {
            record["references"] = entry.at("references");
        }
        record["human_scores"]["overall"] = to_scores(entry.at("scores"));
        out << record.dump() << '\n';
        ++written;
    }
    return written;
}

// Upstream: a JSON array of {id, source, translation, references, scores}.
std::size_t convert_iwslt14(const std::string& in_path, const std::string& out_path) {
    auto in = open_in(in_path);
    auto out = open_out(out_path);
    const auto doc = parse_document(in, in_path);
    std::size_t written = 0;
    for (const auto& entry : doc) {
        ordered_json record = base_record(entry.at("id").get<std::string>(), "translation",
                                          entry.at("source").get<std::string>(),
                                          entry.at("translation").get<std::string>());
        if (entry.contains("references")) {
            record["references"] = entry.at("references");
        }
        record["human_scores"]["overall"] = to_scores(entry.at("scores"));
        out << record.dump() << '\n';
        ++written;
    }
    return written;
}

std::size_t convert_corpus(const std::string& corpus, const std::string& in_path,
                           const std::string& out_path) {
    if (corpus == "summeval") return convert_summeval(in_path, out_path);
    if (corpus == "topicalchat") return convert_topicalchat(in_path, out_path);
    if (corpus == "openmeva") return convert_openmeva(in_path, out_path);
    if (corpus == "bagel") return convert_bagel(in_path, out_path);
    if (corpus == "iwslt14") return convert_iwslt14(in_path, out_path);
    throw ConfigError("unknown corpus: '" + corpus + "'");
}

}  // namespace coaeval
