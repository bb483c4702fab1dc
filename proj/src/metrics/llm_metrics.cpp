#include "coaeval/metrics/llm_metrics.hpp"

#include "coaeval/prompt/parse.hpp"

namespace coaeval {

namespace {

std::string trim_copy(const std::string& text) {
    std::size_t begin = 0, end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

MetricScore scalar_metric(const EvaluationInstance& instance, const AspectSpec& aspect,
                          const std::string& metric_name, const ScalarCall& call) {
    MetricScore score;
    score.instance_id = instance.id;
    score.metric_name = metric_name;
    score.aspect_name = aspect.name;
    score.value = call.value;
    score.provenance = Provenance::kLlm;
    score.diagnostics["attempts"] = std::to_string(call.completion.attempts);
    score.diagnostics["from_cache"] = call.completion.from_cache ? "true" : "false";
    if (call.requeried) {
        score.diagnostics["requeried"] = "true";
    }
    return score;
}

}  // namespace

CompletionRequest make_judge_request(const CompletionClient& client, const RenderedPrompt& prompt,
                                     const std::string& stage_tag,
                                     const std::string& instance_hint) {
    CompletionRequest request;
    request.model = client.config().model;
    request.prompt = prompt.text;
    request.temperature = 0.0;
    request.n = 1;
    request.stage = stage_tag;
    request.instance_hint = instance_hint;
    return request;
}

ScalarCall complete_scalar_score(CompletionClient& client, const RenderedPrompt& prompt,
                                 const AspectSpec& aspect, const std::string& stage_tag,
                                 const std::string& instance_hint) {
    const CompletionRequest request = make_judge_request(client, prompt, stage_tag, instance_hint);
    ScalarCall call;
    call.completion = client.complete(request);
    try {
        call.value = parse_scalar_score(call.completion.text, aspect);
        return call;
    } catch (const ParseError&) {
        call.requeried = true;
    }
    call.completion = client.complete(request, /*bypass_cache=*/true);
    call.value = parse_scalar_score(call.completion.text, aspect);
    return call;
}

MetricScore llmscore(const EvaluationInstance& instance, const AspectSpec& aspect,
                     CompletionClient& client, const TemplateSet& templates) {
    const RenderedPrompt prompt =
        render_llmscore_prompt(templates.at(PromptStage::kLlmScore), aspect, instance);
    const ScalarCall call =
        complete_scalar_score(client, prompt, aspect, stage_tags::kLlmScore, instance.id);
    return scalar_metric(instance, aspect, "LLMScore", call);
}

MetricScore llmscore_cot(const EvaluationInstance& instance, const AspectSpec& aspect,
                         CompletionClient& client, const TemplateSet& templates) {
    const RenderedPrompt think_prompt =
        render_cot_prompt(templates.at(PromptStage::kLlmScoreCot), aspect, instance);
    const CompletionRequest think_request =
        make_judge_request(client, think_prompt, stage_tags::kCotThink, instance.id);

    CompletionResult reasoning = client.complete(think_request);
    if (trim_copy(reasoning.text).empty()) {
        reasoning = client.complete(think_request, /*bypass_cache=*/true);
    }
    if (trim_copy(reasoning.text).empty()) {
        throw ParseError("judge produced no reasoning for instance '" + instance.id + "'");
    }

    const RenderedPrompt score_prompt =
        render_cot_score_prompt(think_prompt, reasoning.text, aspect);
    const ScalarCall call =
        complete_scalar_score(client, score_prompt, aspect, stage_tags::kCotScore, instance.id);
    MetricScore score = scalar_metric(instance, aspect, "LLMScore_CoT", call);
    return score;
}

}  // namespace coaeval
