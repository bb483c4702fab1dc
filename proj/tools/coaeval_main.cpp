#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coaeval/data/converters.hpp"
#include "coaeval/report/report.hpp"
#include "coaeval/runner/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;

struct CommonFlags {
    std::string config_path;
    std::string dataset_path;
    std::string aspect;
    std::vector<std::string> metrics;
    std::string out_dir;
    std::vector<std::string> formats;
    int max_concurrency = 0;
    std::string record_path;
    std::string replay_path;
    std::optional<std::uint64_t> seed;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "run configuration file (JSON)");
    cmd->add_option("--dataset", flags.dataset_path, "dataset manifest path");
    cmd->add_option("--aspect", flags.aspect, "target aspect name");
    cmd->add_option("--metric", flags.metrics,
                    "metric spec, repeatable (e.g. llmscore, coascore:variant=full,m=5)");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--format", flags.formats, "report format: csv or markdown (repeatable)");
    cmd->add_option("--max-concurrency", flags.max_concurrency, "judge worker limit");
    cmd->add_option("--record", flags.record_path, "record a transcript of every completion");
    cmd->add_option("--replay", flags.replay_path, "serve completions from a transcript");
    cmd->add_option("--seed", flags.seed, "seed for the random variant");
}

coaeval::RunConfig build_run_config(const CommonFlags& flags) {
    coaeval::RunConfig config;
    if (!flags.config_path.empty()) {
        config = coaeval::RunConfig::load(flags.config_path);
    }
    if (!flags.dataset_path.empty()) {
        config.dataset_manifest = flags.dataset_path;
    }
    if (!flags.aspect.empty()) {
        config.aspect = flags.aspect;
    }
    if (!flags.metrics.empty()) {
        config.metrics.clear();
        for (const std::string& spec : flags.metrics) {
            config.metrics.push_back(coaeval::MetricSpec::parse(spec));
        }
    }
    if (!flags.out_dir.empty()) {
        config.out_dir = flags.out_dir;
    }
    if (!flags.formats.empty()) {
        config.formats = flags.formats;
    }
    if (flags.max_concurrency > 0) {
        config.backend.max_concurrency = flags.max_concurrency;
    }
    if (!flags.record_path.empty()) {
        config.record_path = flags.record_path;
    }
    if (!flags.replay_path.empty()) {
        config.backend.kind = coaeval::BackendKind::kReplay;
        config.backend.replay_path = flags.replay_path;
    }
    if (flags.seed) {
        for (coaeval::MetricSpec& spec : config.metrics) {
            if (spec.name == "coascore" && !spec.seed) {
                spec.seed = flags.seed;
            }
        }
    }
    return config;
}

std::unique_ptr<coaeval::CompletionClient> build_client(const coaeval::RunConfig& config) {
    auto backend = coaeval::make_backend(config.backend);
    auto client = std::make_unique<coaeval::CompletionClient>(backend, config.backend);
    if (!config.backend.cache_dir.empty()) {
        client->attach_cache(
            std::make_shared<coaeval::CompletionCache>(config.backend.cache_dir));
    }
    if (!config.record_path.empty()) {
        client->attach_recorder(
            std::make_shared<coaeval::TranscriptWriter>(config.record_path));
    }
    return client;
}

void print_warnings(const coaeval::Dataset& dataset) {
    for (const std::string& warning : dataset.warnings) {
        std::cerr << "warning: " << warning << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chain-of-aspects LLM judging and NLG metric correlation toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* evaluate = app.add_subcommand("evaluate", "score a dataset with configured metrics");
    add_common_flags(evaluate, flags);

    auto* correlate =
        app.add_subcommand("correlate", "correlate score files with human judgments");
    add_common_flags(correlate, flags);
    std::vector<std::string> score_files;
    correlate->add_option("scores", score_files, "score csv files")->expected(-1);

    auto* ablate = app.add_subcommand("ablate", "run all pipeline variants at fixed m");
    add_common_flags(ablate, flags);
    int ablate_m = 5;
    ablate->add_option("--m", ablate_m, "relevant aspect count shared by all variants");

    auto* convert = app.add_subcommand("convert", "convert an upstream corpus to the "
                                                  "normalized instance format");
    std::string corpus, convert_in, convert_out;
    convert->add_option("--corpus", corpus, "summeval|topicalchat|openmeva|bagel|iwslt14")
        ->required();
    convert->add_option("--in", convert_in, "upstream file")->required();
    convert->add_option("--out", convert_out, "normalized output file")->required();

    auto* validate = app.add_subcommand("validate", "check a dataset against its manifest");
    std::string validate_manifest;
    validate->add_option("--dataset", validate_manifest, "dataset manifest path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (convert->parsed()) {
            const std::size_t written = coaeval::convert_corpus(corpus, convert_in, convert_out);
            std::cout << "wrote " << written << " instances to " << convert_out << '\n';
            return kExitOk;
        }

        if (validate->parsed()) {
            const auto manifest = coaeval::DatasetManifest::load(validate_manifest);
            const auto dataset = coaeval::load_dataset(manifest);
            print_warnings(dataset);
            const auto report = coaeval::validate_dataset(dataset, manifest);
            for (const auto& issue : report.issues) {
                std::cout << issue.kind << ": " << issue.message << '\n';
            }
            std::cout << (report.clean() ? "dataset is clean" : "violations found") << '\n';
            return kExitOk;
        }

        const coaeval::RunConfig config = build_run_config(flags);

        if (evaluate->parsed()) {
            config.validate();
            const auto manifest = coaeval::DatasetManifest::load(config.dataset_manifest);
            const auto dataset = coaeval::load_dataset(manifest);
            print_warnings(dataset);
            auto client = build_client(config);
            const auto outcome = coaeval::run_evaluate(config, dataset, *client);
            for (std::size_t i = 0; i < outcome.score_files.size(); ++i) {
                const auto& table = outcome.tables[i];
                std::cout << table.metric_name << ": " << table.rows.size() << " scored, "
                          << table.exclusions.size() << " excluded -> "
                          << outcome.score_files[i] << '\n';
            }
            return kExitOk;
        }

        if (ablate->parsed()) {
            coaeval::RunConfig ablate_config = config;
            ablate_config.metrics = {coaeval::MetricSpec::parse("coascore")};
            ablate_config.validate();
            const auto manifest =
                coaeval::DatasetManifest::load(ablate_config.dataset_manifest);
            const auto dataset = coaeval::load_dataset(manifest);
            print_warnings(dataset);
            auto client = build_client(ablate_config);
            const auto outcome =
                coaeval::run_ablate(ablate_config, dataset, *client, ablate_m, flags.seed);
            for (std::size_t i = 0; i < outcome.score_files.size(); ++i) {
                const auto& table = outcome.tables[i];
                std::cout << table.metric_name << ": " << table.rows.size() << " scored, "
                          << table.exclusions.size() << " excluded -> "
                          << outcome.score_files[i] << '\n';
            }
            return kExitOk;
        }

        if (correlate->parsed()) {
            if (config.dataset_manifest.empty()) {
                throw coaeval::ConfigError("correlate needs --dataset (or a config with one)");
            }
            if (config.out_dir.empty()) {
                throw coaeval::ConfigError("correlate needs --out");
            }
            const auto manifest = coaeval::DatasetManifest::load(config.dataset_manifest);
            const auto dataset = coaeval::load_dataset(manifest);
            print_warnings(dataset);
            const auto outcome = coaeval::run_correlate(score_files, dataset, config.aspect,
                                                        config.out_dir, config.formats);
            for (const std::string& path : outcome.report_files) {
                std::cout << "wrote " << path << '\n';
            }
            return kExitOk;
        }
    } catch (const coaeval::ConfigError& error) {
        std::cerr << "config error: " << error.what() << '\n';
        return kExitConfig;
    } catch (const coaeval::Error& error) {
        std::cerr << "run failed: " << error.what() << '\n';
        return kExitRun;
    } catch (const std::exception& error) {
        std::cerr << "run failed: " << error.what() << '\n';
        return kExitRun;
    }

    return kExitConfig;
}
