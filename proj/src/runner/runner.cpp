#include "coaeval/runner/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "coaeval/metrics/ingest.hpp"
#include "coaeval/metrics/llm_metrics.hpp"
#include "coaeval/metrics/rule_metrics.hpp"
#include "coaeval/report/report.hpp"

namespace coaeval {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string to_lower(std::string text) {
    for (char& c : text) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return text;
}

std::string sanitize_tag(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : to_lower(text)) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        out.push_back(ok ? c : '_');
    }
    while (!out.empty() && out.back() == '_') {
        out.pop_back();
    }
    return out.empty() ? std::string("metric") : out;
}

bool is_rule_metric(const std::string& name) {
    return name == "bleu" || name == "rouge1" || name == "rouge2" || name == "rougel" ||
           name == "meteor_lite";
}

bool is_llm_metric(const std::string& name) {
    return name == "llmscore" || name == "llmscore_cot" || name == "coascore";
}

std::string rule_metric_display(const std::string& name) {
    if (name == "bleu") return "BLEU";
    if (name == "rouge1") return "ROUGE-1";
    if (name == "rouge2") return "ROUGE-2";
    if (name == "rougel") return "ROUGE-L";
    if (name == "meteor_lite") return "METEOR-lite";
    return name;
}

BackendConfig backend_from_json(const nlohmann::json& doc) {
    BackendConfig backend;
    backend.kind = backend_kind_from_string(doc.value("kind", "scripted"));
    backend.base_url = doc.value("base_url", backend.base_url);
    backend.model = doc.value("model", backend.model);
    backend.api_key_env_name = doc.value("api_key_env", backend.api_key_env_name);
    backend.max_concurrency = doc.value("max_concurrency", backend.max_concurrency);
    backend.cache_dir = doc.value("cache_dir", "");
    backend.script_path = doc.value("script", "");
    backend.replay_path = doc.value("replay", "");
    if (doc.contains("retry")) {
        const auto& retry = doc.at("retry");
        backend.retry.max_attempts = retry.value("max_attempts", backend.retry.max_attempts);
        backend.retry.base_backoff_seconds =
            retry.value("base_backoff_seconds", backend.retry.base_backoff_seconds);
        backend.retry.backoff_multiplier =
            retry.value("multiplier", backend.retry.backoff_multiplier);
    }
    return backend;
}

void write_manifest(const std::string& path, const Dataset& dataset, const MetricSpec& spec,
                    const std::string& display_name, const std::string& aspect_name,
                    const BackendConfig& backend, const TemplateSet& templates,
                    const AspectChain* chain, const std::vector<std::string>& warnings) {
    ordered_json doc;
    doc["dataset"] = dataset.id;
    doc["aspect"] = aspect_name;
    doc["metric"] = display_name;
    doc["backend"] = to_string(backend.kind);
    doc["model"] = backend.model;
    if (spec.name == "coascore") {
        doc["variant"] = to_string(spec.variant);
        doc["m"] = spec.m;
        if (spec.seed) {
            doc["seed"] = *spec.seed;
        }
    }
    ordered_json digests;
    for (const auto& [stage, tmpl] : templates.templates) {
        digests[to_string(stage)] = template_digest(tmpl);
    }
    doc["templates"] = std::move(digests);
    if (chain != nullptr && !chain->empty()) {
        doc["chain_digest"] = chain_digest(*chain);
        doc["chain"] = chain_to_text(*chain);
    }
    doc["warnings"] = warnings;
    write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace

MetricSpec MetricSpec::parse(const std::string& text) {
    MetricSpec spec;
    const std::size_t colon = text.find(':');
    spec.name = to_lower(text.substr(0, colon));
    if (spec.name.empty()) {
        throw ConfigError("empty metric name in spec '" + text + "'");
    }
    if (colon != std::string::npos) {
        std::string rest = text.substr(colon + 1);
        std::size_t start = 0;
        while (start <= rest.size()) {
            std::size_t comma = rest.find(',', start);
            if (comma == std::string::npos) {
                comma = rest.size();
            }
            const std::string pair = rest.substr(start, comma - start);
            start = comma + 1;
            if (pair.empty()) {
                continue;
            }
            const std::size_t eq = pair.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("bad metric option '" + pair + "' in spec '" + text + "'");
            }
            const std::string key = to_lower(pair.substr(0, eq));
            const std::string value = pair.substr(eq + 1);
            if (key == "variant") {
                spec.variant = coa_variant_from_string(to_lower(value));
            } else if (key == "m") {
                spec.m = std::stoi(value);
            } else if (key == "seed") {
                spec.seed = std::stoull(value);
            } else if (key == "path") {
                spec.path = value;
            } else if (key == "label") {
                spec.label = value;
            } else {
                throw ConfigError("unknown metric option '" + key + "' in spec '" + text + "'");
            }
        }
    }
    if (!is_rule_metric(spec.name) && !is_llm_metric(spec.name) && spec.name != "ingest") {
        throw ConfigError("unknown metric '" + spec.name + "'");
    }
    if (spec.name == "ingest" && spec.path.empty()) {
        throw ConfigError("ingest metric needs path=<file>");
    }
    return spec;
}

std::string MetricSpec::file_tag() const {
    if (name == "coascore") {
        std::string tag = "coascore_" + to_string(variant) + "_m" + std::to_string(m);
        if (variant == CoaVariant::kRandom && seed) {
            tag += "_seed" + std::to_string(*seed);
        }
        return tag;
    }
    if (name == "ingest") {
        return sanitize_tag(label.empty() ? "ingested" : label);
    }
    return sanitize_tag(name);
}

std::string MetricSpec::display_name() const {
    if (name == "coascore") {
        PipelineConfig config;
        config.variant = variant;
        config.m = m;
        return config.metric_name();
    }
    if (name == "llmscore") return "LLMScore";
    if (name == "llmscore_cot") return "LLMScore_CoT";
    if (name == "ingest") return label.empty() ? "ingested" : label;
    return rule_metric_display(name);
}

RunConfig RunConfig::load(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) {
        throw ConfigError("cannot open config file: " + config_path);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("malformed config " + config_path + ": " + ex.what());
    }

    RunConfig config;
    try {
        config.dataset_manifest = doc.at("dataset").get<std::string>();
        config.aspect = doc.value("aspect", "");
        if (doc.contains("metrics")) {
            for (const auto& entry : doc.at("metrics")) {
                if (entry.is_string()) {
                    config.metrics.push_back(MetricSpec::parse(entry.get<std::string>()));
                    continue;
                }
                MetricSpec spec;
                spec.name = to_lower(entry.at("name").get<std::string>());
                if (entry.contains("variant")) {
                    spec.variant =
                        coa_variant_from_string(entry.at("variant").get<std::string>());
                }
                spec.m = entry.value("m", spec.m);
                if (entry.contains("seed")) {
                    spec.seed = entry.at("seed").get<std::uint64_t>();
                }
                spec.path = entry.value("path", "");
                spec.label = entry.value("label", "");
                config.metrics.push_back(std::move(spec));
            }
        }
        if (doc.contains("backend")) {
            config.backend = backend_from_json(doc.at("backend"));
        }
        config.out_dir = doc.value("out", "");
        if (doc.contains("formats")) {
            config.formats.clear();
            for (const auto& format : doc.at("formats")) {
                config.formats.push_back(format.get<std::string>());
            }
        }
        config.record_path = doc.value("record", "");
        config.templates_dir = doc.value("templates_dir", "");
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("bad config " + config_path + ": " + ex.what());
    }

    // Relative paths in the config resolve against the config's directory.
    const auto base = std::filesystem::path(config_path).parent_path();
    auto resolve = [&](std::string& path) {
        if (!path.empty() && std::filesystem::path(path).is_relative()) {
            path = (base / path).string();
        }
    };
    resolve(config.dataset_manifest);
    resolve(config.out_dir);
    resolve(config.record_path);
    resolve(config.templates_dir);
    resolve(config.backend.cache_dir);
    resolve(config.backend.script_path);
    resolve(config.backend.replay_path);
    for (MetricSpec& spec : config.metrics) {
        resolve(spec.path);
    }
    return config;
}

void RunConfig::validate() const {
    if (dataset_manifest.empty()) {
        throw ConfigError("run config needs a dataset manifest path");
    }
    if (metrics.empty()) {
        throw ConfigError("run config needs at least one metric");
    }
    if (out_dir.empty()) {
        throw ConfigError("run config needs an output directory");
    }
    for (const std::string& format : formats) {
        if (format != "csv" && format != "markdown") {
            throw ConfigError("unknown report format '" + format + "'");
        }
    }
    backend.validate();

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const auto probe = std::filesystem::path(out_dir) / ".write-probe";
    std::ofstream out(probe);
    if (!out) {
        throw ConfigError("output directory is not writable: " + out_dir);
    }
    out.close();
    std::filesystem::remove(probe, ec);
}

AspectSpec resolve_aspect(const Dataset& dataset, const std::string& aspect_name) {
    if (aspect_name.empty()) {
        throw ConfigError("no target aspect configured");
    }
    const std::string normalized = normalize_aspect_name(aspect_name);
    const AspectDeclaration* decl = dataset.find_aspect(normalized);
    if (decl == nullptr) {
        throw ConfigError("dataset '" + dataset.id + "' does not declare aspect '" + normalized +
                          "'");
    }
    AspectSpec spec;
    spec.name = decl->name;
    spec.criterion = decl->criterion;
    spec.scale_min = 1.0;
    spec.scale_max = 5.0;
    return spec;
}

ScoreTable rule_metric_table(const Dataset& dataset, const std::string& metric,
                             const std::string& aspect_name) {
    if (!is_rule_metric(metric)) {
        throw ConfigError("unknown rule metric '" + metric + "'");
    }
    ScoreTable table;
    table.dataset_id = dataset.id;
    table.metric_name = rule_metric_display(metric);
    table.aspect_name = aspect_name;

    for (const EvaluationInstance& instance : dataset.instances) {
        const TokenSequence hypothesis = tokenize(instance.hypothesis);
        std::vector<TokenSequence> references;
        for (const std::string& reference : instance.references) {
            TokenSequence tokens = tokenize(reference);
            if (!tokens.empty()) {
                references.push_back(std::move(tokens));
            }
        }
        if (references.empty()) {
            table.exclusions.emplace_back(instance.id, "no nonempty references");
            continue;
        }

        double value = 0.0;
        if (metric == "bleu") {
            value = bleu(hypothesis, references);
        } else if (metric == "meteor_lite") {
            for (const TokenSequence& reference : references) {
                value = std::max(value, meteor_lite(hypothesis, reference));
            }
        } else {
            const RougeVariant variant = metric == "rouge1"   ? RougeVariant::kRouge1
                                         : metric == "rouge2" ? RougeVariant::kRouge2
                                                              : RougeVariant::kRougeL;
            for (const TokenSequence& reference : references) {
                value = std::max(value, rouge(hypothesis, reference, variant));
            }
        }

        MetricScore score;
        score.instance_id = instance.id;
        score.metric_name = table.metric_name;
        score.aspect_name = aspect_name;
        score.value = value;
        score.provenance = Provenance::kRule;
        table.rows[instance.id] = std::move(score);
    }
    return table;
}

EvaluateOutcome run_evaluate(const RunConfig& config, const Dataset& dataset,
                             CompletionClient& client) {
    const TemplateSet templates = load_templates(dataset.task, config.templates_dir);

    const bool needs_llm = std::any_of(config.metrics.begin(), config.metrics.end(),
                                       [](const MetricSpec& s) { return is_llm_metric(s.name); });
    const bool needs_aspect =
        needs_llm || std::any_of(config.metrics.begin(), config.metrics.end(),
                                 [](const MetricSpec& s) { return is_rule_metric(s.name); });

    AspectSpec aspect;
    if (needs_aspect) {
        aspect = resolve_aspect(dataset, config.aspect);
        if (needs_llm && aspect.criterion.empty()) {
            throw ConfigError("aspect '" + aspect.name +
                              "' has no criterion in the dataset manifest; LLM metrics need one");
        }
    }

    EvaluateOutcome outcome;
    for (const MetricSpec& spec : config.metrics) {
        ScoreTable table;
        AspectChain chain;
        if (spec.name == "coascore") {
            PipelineConfig pipeline;
            pipeline.variant = spec.variant;
            pipeline.m = spec.m;
            pipeline.seed = spec.seed;
            pipeline.aspect = aspect;
            table = evaluate_dataset(dataset, pipeline, client, templates, &chain);
        } else if (spec.name == "llmscore") {
            table = map_dataset(dataset, spec.display_name(), aspect.name,
                                client.config().max_concurrency,
                                [&](const EvaluationInstance& instance, std::size_t) {
                                    return llmscore(instance, aspect, client, templates);
                                });
        } else if (spec.name == "llmscore_cot") {
            table = map_dataset(dataset, spec.display_name(), aspect.name,
                                client.config().max_concurrency,
                                [&](const EvaluationInstance& instance, std::size_t) {
                                    return llmscore_cot(instance, aspect, client, templates);
                                });
        } else if (spec.name == "ingest") {
            const std::string ingest_aspect =
                !aspect.name.empty()
                    ? aspect.name
                    : (config.aspect.empty() ? "" : normalize_aspect_name(config.aspect));
            table = ingest_external_scores(spec.path, spec.display_name(), dataset,
                                           ingest_aspect);
        } else {
            table = rule_metric_table(dataset, spec.name, aspect.name);
        }

        const std::string tag = spec.file_tag();
        const std::string score_path =
            (std::filesystem::path(config.out_dir) / (tag + ".scores.csv")).string();
        const std::string manifest_path =
            (std::filesystem::path(config.out_dir) / (tag + ".manifest.json")).string();
        write_score_csv(table, score_path);
        write_manifest(manifest_path, dataset, spec, table.metric_name, table.aspect_name,
                       client.config(), templates, chain.empty() ? nullptr : &chain,
                       table.warnings);

        outcome.tables.push_back(std::move(table));
        outcome.score_files.push_back(score_path);
        outcome.manifest_files.push_back(manifest_path);
    }
    return outcome;
}

EvaluateOutcome run_ablate(const RunConfig& config, const Dataset& dataset,
                           CompletionClient& client, int m, std::optional<std::uint64_t> seed) {
    const TemplateSet templates = load_templates(dataset.task, config.templates_dir);
    const AspectSpec aspect = resolve_aspect(dataset, config.aspect);
    if (aspect.criterion.empty()) {
        throw ConfigError("aspect '" + aspect.name + "' has no criterion in the manifest");
    }

    std::vector<std::string> chain_warnings;
    const AspectChain chain =
        generate_relevant_aspects(aspect, dataset.task, m, client, templates, &chain_warnings);

    // One stage-2 score set per instance, shared by every variant.
    const std::size_t count = dataset.instances.size();
    std::vector<std::optional<AspectScoreSet>> score_sets(count);
    std::vector<std::string> stage2_errors(count);
    {
        std::atomic<std::size_t> cursor{0};
        const int workers = std::max(
            1, std::min<int>(client.config().max_concurrency, static_cast<int>(count)));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t index = cursor.fetch_add(1);
                    if (index >= count) {
                        return;
                    }
                    try {
                        score_sets[index] = score_relevant_aspects(
                            chain, dataset.instances[index], client, templates);
                    } catch (const std::exception& error) {
                        stage2_errors[index] = error.what();
                    }
                }
            });
        }
        for (std::thread& thread : pool) {
            thread.join();
        }
    }

    EvaluateOutcome outcome;
    for (const CoaVariant variant :
         {CoaVariant::kFull, CoaVariant::kAverage, CoaVariant::kWithoutScores,
          CoaVariant::kRandom, CoaVariant::kInter}) {
        MetricSpec spec;
        spec.name = "coascore";
        spec.variant = variant;
        spec.m = m;
        if (variant == CoaVariant::kRandom) {
            if (!seed) {
                throw ConfigError("the ablation grid needs a seed for the random variant");
            }
            spec.seed = seed;
        }

        ScoreTable table = map_dataset(
            dataset, spec.display_name(), aspect.name, client.config().max_concurrency,
            [&](const EvaluationInstance& instance, std::size_t index) {
                ChainKnowledge knowledge;
                switch (variant) {
                    case CoaVariant::kFull:
                    case CoaVariant::kAverage: {
                        if (!score_sets[index]) {
                            throw ParseError("stage-2 scoring failed: " + stage2_errors[index]);
                        }
                        knowledge = assemble_knowledge(chain, *score_sets[index]);
                        break;
                    }
                    case CoaVariant::kWithoutScores:
                    case CoaVariant::kRandom: {
                        AspectScoreSet scores;
                        if (variant == CoaVariant::kRandom) {
                            scores = randomize_scores(chain, *seed);
                        } else {
                            for (const Aspect& entry : chain.aspects) {
                                scores.scores[entry.name] = 0.0;
                            }
                        }
                        knowledge = assemble_knowledge(chain, scores);
                        break;
                    }
                    case CoaVariant::kInter:
                        knowledge = inter_aspect_knowledge(instance, dataset, aspect);
                        break;
                }
                return coascore(instance, aspect, knowledge, client, templates, variant, seed,
                                spec.display_name());
            });
        table.warnings.insert(table.warnings.begin(), chain_warnings.begin(),
                              chain_warnings.end());

        const std::string tag = spec.file_tag();
        const std::string score_path =
            (std::filesystem::path(config.out_dir) / (tag + ".scores.csv")).string();
        const std::string manifest_path =
            (std::filesystem::path(config.out_dir) / (tag + ".manifest.json")).string();
        write_score_csv(table, score_path);
        write_manifest(manifest_path, dataset, spec, table.metric_name, table.aspect_name,
                       client.config(), templates, &chain, table.warnings);

        outcome.tables.push_back(std::move(table));
        outcome.score_files.push_back(score_path);
        outcome.manifest_files.push_back(manifest_path);
    }
    return outcome;
}

CorrelateOutcome run_correlate(const std::vector<std::string>& score_files,
                               const Dataset& dataset, const std::string& fallback_aspect,
                               const std::string& out_dir,
                               const std::vector<std::string>& formats) {
    if (score_files.empty()) {
        throw ConfigError("correlate needs at least one score file");
    }

    std::vector<ScoreTable> tables;
    for (const std::string& path : score_files) {
        ScoreTable table = read_score_csv(path);
        table.dataset_id = dataset.id;

        std::string stem = std::filesystem::path(path).filename().string();
        const std::string suffix = ".scores.csv";
        if (stem.size() > suffix.size() &&
            stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
            stem = stem.substr(0, stem.size() - suffix.size());
        }
        table.metric_name = stem;
        table.aspect_name = fallback_aspect.empty() ? "" : normalize_aspect_name(fallback_aspect);

        const std::string manifest_path =
            (std::filesystem::path(path).parent_path() / (stem + ".manifest.json")).string();
        if (std::filesystem::exists(manifest_path)) {
            std::ifstream in(manifest_path);
            try {
                const auto doc = nlohmann::json::parse(in);
                const std::string manifest_dataset = doc.value("dataset", "");
                if (!manifest_dataset.empty() && manifest_dataset != dataset.id) {
                    throw InvalidInputError("score file " + path + " was produced for dataset '" +
                                            manifest_dataset + "', not '" + dataset.id + "'");
                }
                table.metric_name = doc.value("metric", table.metric_name);
                const std::string manifest_aspect = doc.value("aspect", "");
                if (!manifest_aspect.empty()) {
                    table.aspect_name = manifest_aspect;
                }
            } catch (const nlohmann::json::exception& ex) {
                throw ConfigError("bad manifest " + manifest_path + ": " + ex.what());
            }
        }

        if (table.aspect_name.empty()) {
            throw ConfigError("no aspect known for score file " + path +
                              "; pass --aspect or keep the manifest next to it");
        }
        for (const auto& [id, score] : table.rows) {
            (void)score;
            if (dataset.find_instance(id) == nullptr) {
                throw InvalidInputError("score file " + path + " names id '" + id +
                                        "' which is not in dataset '" + dataset.id + "'");
            }
        }
        tables.push_back(std::move(table));
    }

    CorrelateOutcome outcome;
    outcome.report = dataset_level_correlations(tables, dataset);
    for (const std::string& format : formats) {
        const std::string filename =
            format == "markdown" ? "correlations.md" : "correlations.csv";
        const std::string path = (std::filesystem::path(out_dir) / filename).string();
        const std::string text = format == "markdown"
                                     ? render_correlation_markdown(outcome.report)
                                     : render_correlation_csv(outcome.report);
        write_text_file(path, text);
        outcome.report_files.push_back(path);
    }
    return outcome;
}

}  // namespace coaeval
