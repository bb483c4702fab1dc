#include "coaeval/pipeline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include <openssl/sha.h>

#include "coaeval/metrics/llm_metrics.hpp"
#include "coaeval/prompt/parse.hpp"
#include "coaeval/prompt/render.hpp"

namespace coaeval {

namespace {

ChainKnowledge knowledge_from_chain(const AspectChain& chain,
                                    const std::map<std::string, double>& scores) {
    ChainKnowledge knowledge;
    for (const Aspect& aspect : chain.aspects) {
        const auto it = scores.find(aspect.name);
        if (it == scores.end()) {
            continue;
        }
        knowledge.entries.push_back({aspect.name, aspect.description, it->second});
    }
    return knowledge;
}

double rescale_to(double value, double from_min, double from_max, double to_min, double to_max) {
    if (from_min == to_min && from_max == to_max) {
        return value;
    }
    if (from_max == from_min) {
        return (to_min + to_max) / 2.0;
    }
    return to_min + (value - from_min) * (to_max - to_min) / (from_max - from_min);
}

}  // namespace

std::string to_string(CoaVariant variant) {
    switch (variant) {
        case CoaVariant::kFull: return "full";
        case CoaVariant::kAverage: return "average";
        case CoaVariant::kWithoutScores: return "without_scores";
        case CoaVariant::kRandom: return "random";
        case CoaVariant::kInter: return "inter";
    }
    return "full";
}

CoaVariant coa_variant_from_string(const std::string& text) {
    if (text == "full") return CoaVariant::kFull;
    if (text == "average") return CoaVariant::kAverage;
    if (text == "without_scores") return CoaVariant::kWithoutScores;
    if (text == "random") return CoaVariant::kRandom;
    if (text == "inter") return CoaVariant::kInter;
    throw ConfigError("unknown pipeline variant: '" + text + "'");
}

void PipelineConfig::validate() const {
    if (m < 1) {
        throw ConfigError("pipeline aspect count m must be >= 1");
    }
    if (variant == CoaVariant::kRandom && !seed) {
        throw ConfigError("the random variant requires a seed");
    }
    if (aspect.name.empty()) {
        throw ConfigError("pipeline config needs a target aspect");
    }
}

std::string PipelineConfig::metric_name() const {
    switch (variant) {
        case CoaVariant::kFull: return "CoAScore_(n=" + std::to_string(m) + ")";
        case CoaVariant::kAverage: return "CoAScore_average_(n=" + std::to_string(m) + ")";
        case CoaVariant::kWithoutScores:
            return "CoAScore_w/o_score_(n=" + std::to_string(m) + ")";
        case CoaVariant::kRandom: return "CoAScore_random_(n=" + std::to_string(m) + ")";
        case CoaVariant::kInter: return "CoAScore_inter";
    }
    return "CoAScore";
}

AspectChain generate_relevant_aspects(const AspectSpec& aspect, TaskKind task_kind, int m,
                                      CompletionClient& client, const TemplateSet& templates,
                                      std::vector<std::string>* warnings) {
    if (m < 1) {
        throw InvalidInputError("aspect generation needs m >= 1");
    }
    const RenderedPrompt prompt =
        render_aspect_generation_prompt(templates.at(PromptStage::kAspectGen), aspect, task_kind,
                                        m);
    const CompletionRequest request =
        make_judge_request(client, prompt, stage_tags::kAspectGen, "");

    auto attempt = [&](bool bypass_cache) -> std::optional<AspectListParse> {
        const CompletionResult completion = client.complete(request, bypass_cache);
        try {
            return parse_aspect_list(completion.text, static_cast<std::size_t>(m), aspect);
        } catch (const ParseError&) {
            return std::nullopt;
        }
    };

    std::optional<AspectListParse> best = attempt(false);
    if (!best || best->chain.size() < static_cast<std::size_t>(m)) {
        if (const auto retry = attempt(true)) {
            if (!best || retry->chain.size() > best->chain.size()) {
                best = retry;
            }
        }
    }
    if (!best) {
        throw StageOneError("relevant aspect generation produced no parseable aspects for '" +
                            aspect.name + "'");
    }
    if (warnings != nullptr) {
        warnings->insert(warnings->end(), best->warnings.begin(), best->warnings.end());
        if (best->chain.size() < static_cast<std::size_t>(m)) {
            warnings->push_back("aspect generation degraded: " +
                                std::to_string(best->chain.size()) + " of " + std::to_string(m) +
                                " aspects for '" + aspect.name + "'");
        }
    }
    return best->chain;
}

AspectScoreSet score_relevant_aspects(const AspectChain& chain,
                                      const EvaluationInstance& instance,
                                      CompletionClient& client, const TemplateSet& templates) {
    if (chain.empty()) {
        throw InvalidInputError("scoring needs a nonempty chain");
    }
    const AspectSpec& target = chain.target;
    const std::vector<std::string> expected = chain.names();

    const RenderedPrompt prompt =
        render_aspect_scoring_prompt(templates.at(PromptStage::kAspectScore), chain, instance);
    const CompletionRequest request =
        make_judge_request(client, prompt, stage_tags::kAspectScore, instance.id);

    AspectScoreSet scores;
    try {
        scores = parse_score_map(client.complete(request).text, expected, target.scale_min,
                                 target.scale_max);
    } catch (const ParseError&) {
        scores = parse_score_map(client.complete(request, /*bypass_cache=*/true).text, expected,
                                 target.scale_min, target.scale_max);
    }

    if (!scores.missing.empty()) {
        // One targeted re-query covering only the missing subset.
        std::vector<Aspect> missing_aspects;
        for (const Aspect& aspect : chain.aspects) {
            if (std::find(scores.missing.begin(), scores.missing.end(), aspect.name) !=
                scores.missing.end()) {
                missing_aspects.push_back(aspect);
            }
        }
        const AspectChain repair_chain = AspectChain::make(target, std::move(missing_aspects));
        const RenderedPrompt repair_prompt = render_aspect_scoring_prompt(
            templates.at(PromptStage::kAspectScore), repair_chain, instance);
        const CompletionRequest repair_request =
            make_judge_request(client, repair_prompt, stage_tags::kAspectScore, instance.id);
        try {
            const AspectScoreSet repaired =
                parse_score_map(client.complete(repair_request).text, scores.missing,
                                target.scale_min, target.scale_max);
            for (const auto& [name, value] : repaired.scores) {
                scores.scores[name] = value;
            }
        } catch (const ParseError&) {
            // Remaining gaps stay missing.
        }
        scores.missing.clear();
        for (const std::string& name : expected) {
            if (scores.scores.count(name) == 0) {
                scores.missing.push_back(name);
            }
        }
    }

    scores.validate_against(chain);
    return scores;
}

ChainKnowledge assemble_knowledge(const AspectChain& chain, const AspectScoreSet& scores) {
    const ChainKnowledge knowledge = knowledge_from_chain(chain, scores.scores);
    if (knowledge.empty()) {
        throw EmptyKnowledgeError("no aspect is present in both the chain and the score set");
    }
    return knowledge;
}

AspectScoreSet randomize_scores(const AspectChain& chain, std::uint64_t seed) {
    if (chain.empty()) {
        throw InvalidInputError("randomize_scores needs a nonempty chain");
    }
    const long lo = static_cast<long>(std::ceil(chain.target.scale_min));
    const long hi = static_cast<long>(std::floor(chain.target.scale_max));
    if (hi < lo) {
        throw InvalidInputError("target scale has no integers to draw from");
    }
    // Plain modulo keeps the draw sequence identical across standard library
    // implementations; the bias over a 64-bit engine is negligible.
    std::mt19937_64 engine(seed);
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    AspectScoreSet scores;
    for (const Aspect& aspect : chain.aspects) {
        scores.scores[aspect.name] =
            static_cast<double>(lo + static_cast<long>(engine() % span));
    }
    return scores;
}

ChainKnowledge inter_aspect_knowledge(const EvaluationInstance& instance, const Dataset& dataset,
                                      const AspectSpec& target) {
    ChainKnowledge knowledge;
    for (const AspectDeclaration& decl : dataset.aspects) {
        if (decl.name == target.name) {
            continue;
        }
        const auto mean = dataset.mean_human_score(instance, decl.name);
        if (!mean) {
            continue;
        }
        const double scaled = rescale_to(*mean, decl.scale_min, decl.scale_max,
                                         target.scale_min, target.scale_max);
        knowledge.entries.push_back(
            {decl.name, "human-annotated " + decl.name + " quality", scaled});
    }
    if (knowledge.empty()) {
        throw EmptyKnowledgeError("instance '" + instance.id +
                                  "' has no other human-scored aspects");
    }
    return knowledge;
}

MetricScore coascore(const EvaluationInstance& instance, const AspectSpec& aspect,
                     const ChainKnowledge& knowledge, CompletionClient& client,
                     const TemplateSet& templates, CoaVariant variant,
                     std::optional<std::uint64_t> seed, const std::string& metric_name) {
    if (knowledge.empty()) {
        throw EmptyKnowledgeError("chain-of-aspects scoring needs nonempty knowledge");
    }

    MetricScore score;
    score.instance_id = instance.id;
    score.metric_name = metric_name;
    score.aspect_name = aspect.name;
    score.provenance = Provenance::kLlm;
    score.diagnostics["variant"] = to_string(variant);

    if (variant == CoaVariant::kAverage) {
        double sum = 0.0;
        for (const ChainKnowledge::Entry& entry : knowledge.entries) {
            sum += entry.score;
        }
        score.value = sum / static_cast<double>(knowledge.size());
        return score;
    }

    ChainKnowledge effective = knowledge;
    if (variant == CoaVariant::kRandom) {
        if (!seed) {
            throw InvalidInputError("the random variant requires a seed");
        }
        std::vector<Aspect> aspects;
        aspects.reserve(knowledge.size());
        for (const ChainKnowledge::Entry& entry : knowledge.entries) {
            aspects.push_back(Aspect{entry.name, entry.description});
        }
        const AspectScoreSet randomized =
            randomize_scores(AspectChain::make(aspect, std::move(aspects)), *seed);
        for (ChainKnowledge::Entry& entry : effective.entries) {
            entry.score = randomized.scores.at(entry.name);
        }
    }

    const bool include_scores = variant != CoaVariant::kWithoutScores;
    const RenderedPrompt prompt = render_coa_prompt(templates.at(PromptStage::kCoaScore), aspect,
                                                    instance, effective, include_scores);
    const ScalarCall call =
        complete_scalar_score(client, prompt, aspect, stage_tags::kCoaScore, instance.id);
    score.value = call.value;
    score.diagnostics["attempts"] = std::to_string(call.completion.attempts);
    score.diagnostics["from_cache"] = call.completion.from_cache ? "true" : "false";
    if (call.requeried) {
        score.diagnostics["requeried"] = "true";
    }
    return score;
}

ScoreTable evaluate_dataset(const Dataset& dataset, const PipelineConfig& config,
                            CompletionClient& client, const TemplateSet& templates,
                            AspectChain* chain_out) {
    config.validate();

    ScoreTable table;
    table.dataset_id = dataset.id;
    table.metric_name = config.metric_name();
    table.aspect_name = config.aspect.name;

    std::size_t lacking_human = 0;
    for (const EvaluationInstance& instance : dataset.instances) {
        if (instance.human_scores.count(config.aspect.name) == 0) {
            ++lacking_human;
        }
    }
    if (lacking_human > 0) {
        table.warnings.push_back(std::to_string(lacking_human) +
                                 " instances lack human scores for aspect '" +
                                 config.aspect.name + "'");
    }

    std::optional<AspectChain> shared_chain;
    if (config.variant != CoaVariant::kInter && config.reuse_chain_per_dataset) {
        std::vector<std::string> chain_warnings;
        shared_chain = generate_relevant_aspects(config.aspect, dataset.task, config.m, client,
                                                 templates, &chain_warnings);
        table.warnings.insert(table.warnings.end(), chain_warnings.begin(),
                              chain_warnings.end());
        if (chain_out != nullptr) {
            *chain_out = *shared_chain;
        }
    }

    struct Outcome {
        std::optional<MetricScore> score;
        std::string error;
        std::vector<std::string> warnings;
    };
    const std::size_t count = dataset.instances.size();
    std::vector<Outcome> outcomes(count);

    auto run_one = [&](std::size_t index) {
        const EvaluationInstance& instance = dataset.instances[index];
        Outcome& outcome = outcomes[index];
        try {
            AspectChain chain;
            if (config.variant != CoaVariant::kInter) {
                if (shared_chain) {
                    chain = *shared_chain;
                } else {
                    chain = generate_relevant_aspects(config.aspect, dataset.task, config.m,
                                                      client, templates, &outcome.warnings);
                }
            }

            ChainKnowledge knowledge;
            try {
                switch (config.variant) {
                    case CoaVariant::kFull:
                    case CoaVariant::kAverage: {
                        const AspectScoreSet scores =
                            score_relevant_aspects(chain, instance, client, templates);
                        knowledge = assemble_knowledge(chain, scores);
                        break;
                    }
                    case CoaVariant::kWithoutScores: {
                        std::map<std::string, double> zero;
                        for (const Aspect& aspect : chain.aspects) {
                            zero[aspect.name] = 0.0;
                        }
                        knowledge = knowledge_from_chain(chain, zero);
                        break;
                    }
                    case CoaVariant::kRandom: {
                        const AspectScoreSet randomized = randomize_scores(chain, *config.seed);
                        knowledge = knowledge_from_chain(chain, randomized.scores);
                        break;
                    }
                    case CoaVariant::kInter:
                        knowledge = inter_aspect_knowledge(instance, dataset, config.aspect);
                        break;
                }
                outcome.score = coascore(instance, config.aspect, knowledge, client, templates,
                                         config.variant, config.seed, config.metric_name());
            } catch (const EmptyKnowledgeError& error) {
                // Degrade to the plain single-prompt baseline for this
                // instance rather than cascading exclusions.
                MetricScore fallback = llmscore(instance, config.aspect, client, templates);
                fallback.metric_name = config.metric_name();
                fallback.diagnostics["fallback"] = "llmscore";
                outcome.score = fallback;
                outcome.warnings.push_back("instance '" + instance.id +
                                           "' fell back to LLMScore: " + error.what());
            }
        } catch (const StageOneError&) {
            throw;
        } catch (const std::exception& error) {
            outcome.error = error.what();
        }
    };

    const int workers = std::max(
        1, std::min<int>(client.config().max_concurrency, static_cast<int>(count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            run_one(i);
        }
    } else {
        std::atomic<std::size_t> cursor{0};
        std::exception_ptr fatal;
        std::mutex fatal_mutex;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t index = cursor.fetch_add(1);
                    if (index >= count) {
                        return;
                    }
                    try {
                        run_one(index);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(fatal_mutex);
                        if (!fatal) {
                            fatal = std::current_exception();
                        }
                        return;
                    }
                }
            });
        }
        for (std::thread& thread : pool) {
            thread.join();
        }
        if (fatal) {
            std::rethrow_exception(fatal);
        }
    }

    for (std::size_t i = 0; i < count; ++i) {
        Outcome& outcome = outcomes[i];
        table.warnings.insert(table.warnings.end(), outcome.warnings.begin(),
                              outcome.warnings.end());
        if (outcome.score) {
            table.rows[outcome.score->instance_id] = std::move(*outcome.score);
        } else {
            table.exclusions.emplace_back(dataset.instances[i].id, outcome.error);
        }
    }
    table.validate();
    return table;
}

ScoreTable map_dataset(
    const Dataset& dataset, const std::string& metric_name, const std::string& aspect_name,
    int max_concurrency,
    const std::function<MetricScore(const EvaluationInstance&, std::size_t)>& scorer) {
    ScoreTable table;
    table.dataset_id = dataset.id;
    table.metric_name = metric_name;
    table.aspect_name = aspect_name;

    const std::size_t count = dataset.instances.size();
    struct Outcome {
        std::optional<MetricScore> score;
        std::string error;
    };
    std::vector<Outcome> outcomes(count);

    auto run_one = [&](std::size_t index) {
        try {
            outcomes[index].score = scorer(dataset.instances[index], index);
        } catch (const std::exception& error) {
            outcomes[index].error = error.what();
        }
    };

    const int workers =
        std::max(1, std::min<int>(max_concurrency, static_cast<int>(count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            run_one(i);
        }
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t index = cursor.fetch_add(1);
                    if (index >= count) {
                        return;
                    }
                    run_one(index);
                }
            });
        }
        for (std::thread& thread : pool) {
            thread.join();
        }
    }

    for (std::size_t i = 0; i < count; ++i) {
        if (outcomes[i].score) {
            table.rows[outcomes[i].score->instance_id] = std::move(*outcomes[i].score);
        } else {
            table.exclusions.emplace_back(dataset.instances[i].id, outcomes[i].error);
        }
    }
    table.validate();
    return table;
}

std::string chain_to_text(const AspectChain& chain) {
    std::string text;
    for (const Aspect& aspect : chain.aspects) {
        text += display_aspect_name(aspect.name) + ": " + aspect.description + "\n";
    }
    return text;
}

std::string chain_digest(const AspectChain& chain) {
    const std::string text = chain_to_text(chain);
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
    static const char* kHex = "0123456789abcdef";
    std::string hex(16, '0');
    for (int i = 0; i < 8; ++i) {
        hex[2 * i] = kHex[digest[i] >> 4];
        hex[2 * i + 1] = kHex[digest[i] & 0x0f];
    }
    return hex;
}

}  // namespace coaeval
