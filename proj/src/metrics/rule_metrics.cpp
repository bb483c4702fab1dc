#include "coaeval/metrics/rule_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace coaeval {

namespace {

using NgramCounts = std::map<std::string, int>;

std::string ngram_key(const std::vector<std::string>& tokens, std::size_t start, int n) {
    std::string key = tokens[start];
    for (int k = 1; k < n; ++k) {
        key.push_back('\x1f');
        key += tokens[start + static_cast<std::size_t>(k)];
    }
    return key;
}

NgramCounts count_ngrams(const TokenSequence& seq, int n) {
    NgramCounts counts;
    if (static_cast<int>(seq.size()) < n) {
        return counts;
    }
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= seq.size(); ++i) {
        ++counts[ngram_key(seq.tokens, i, n)];
    }
    return counts;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

bool any_nonempty(const std::vector<TokenSequence>& sequences) {
    return std::any_of(sequences.begin(), sequences.end(),
                       [](const TokenSequence& s) { return !s.empty(); });
}

}  // namespace

TokenSequence tokenize(const std::string& text) {
    TokenSequence out;
    std::istringstream stream(text);
    std::string word;
    while (stream >> word) {
        std::size_t begin = 0, end = word.size();
        while (begin < end && std::ispunct(static_cast<unsigned char>(word[begin]))) ++begin;
        while (end > begin && std::ispunct(static_cast<unsigned char>(word[end - 1]))) --end;
        if (begin == end) {
            continue;
        }
        std::string token = word.substr(begin, end - begin);
        for (char& c : token) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        out.tokens.push_back(std::move(token));
    }
    return out;
}

double bleu(const TokenSequence& hypothesis, const std::vector<TokenSequence>& references,
            int max_n) {
    if (references.empty() || !any_nonempty(references)) {
        throw InvalidInputError("bleu needs at least one nonempty reference");
    }
    if (max_n < 1) {
        throw InvalidInputError("bleu max_n must be at least 1");
    }
    if (hypothesis.empty()) {
        return 0.0;
    }

    double log_precision_sum = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        const NgramCounts hyp_counts = count_ngrams(hypothesis, n);
        NgramCounts max_ref_counts;
        for (const TokenSequence& ref : references) {
            for (const auto& [gram, count] : count_ngrams(ref, n)) {
                max_ref_counts[gram] = std::max(max_ref_counts[gram], count);
            }
        }
        long clipped = 0, total = 0;
        for (const auto& [gram, count] : hyp_counts) {
            total += count;
            const auto it = max_ref_counts.find(gram);
            if (it != max_ref_counts.end()) {
                clipped += std::min(count, it->second);
            }
        }
        double precision;
        if (n == 1) {
            if (clipped == 0) {
                return 0.0;  // no unigram overlap, no smoothing for n=1
            }
            precision = static_cast<double>(clipped) / static_cast<double>(total);
        } else {
            precision = (static_cast<double>(clipped) + 1.0) / (static_cast<double>(total) + 1.0);
        }
        log_precision_sum += std::log(precision);
    }
    const double geometric_mean = std::exp(log_precision_sum / static_cast<double>(max_n));

    // Closest reference length; ties resolved toward the shorter reference.
    const long hyp_len = static_cast<long>(hypothesis.size());
    long closest_ref_len = static_cast<long>(references.front().size());
    for (const TokenSequence& ref : references) {
        const long len = static_cast<long>(ref.size());
        const long best_gap = std::labs(closest_ref_len - hyp_len);
        const long gap = std::labs(len - hyp_len);
        if (gap < best_gap || (gap == best_gap && len < closest_ref_len)) {
            closest_ref_len = len;
        }
    }
    double brevity_penalty = 1.0;
    if (hyp_len < closest_ref_len) {
        brevity_penalty =
            std::exp(1.0 - static_cast<double>(closest_ref_len) / static_cast<double>(hyp_len));
    }
    return brevity_penalty * geometric_mean;
}

double rouge(const TokenSequence& hypothesis, const TokenSequence& reference,
             RougeVariant variant) {
    if (reference.empty()) {
        throw InvalidInputError("rouge needs a nonempty reference");
    }
    if (hypothesis.empty()) {
        return 0.0;
    }

    double precision = 0.0, recall = 0.0;
    if (variant == RougeVariant::kRougeL) {
        const std::size_t lcs = lcs_length(hypothesis.tokens, reference.tokens);
        if (lcs == 0) {
            return 0.0;
        }
        precision = static_cast<double>(lcs) / static_cast<double>(hypothesis.size());
        recall = static_cast<double>(lcs) / static_cast<double>(reference.size());
    } else {
        const int n = (variant == RougeVariant::kRouge1) ? 1 : 2;
        const NgramCounts hyp_counts = count_ngrams(hypothesis, n);
        const NgramCounts ref_counts = count_ngrams(reference, n);
        long hyp_total = 0, ref_total = 0, overlap = 0;
        for (const auto& [gram, count] : hyp_counts) {
            hyp_total += count;
            const auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) {
                overlap += std::min(count, it->second);
            }
        }
        for (const auto& [gram, count] : ref_counts) {
            (void)gram;
            ref_total += count;
        }
        if (hyp_total == 0 || ref_total == 0 || overlap == 0) {
            return 0.0;
        }
        precision = static_cast<double>(overlap) / static_cast<double>(hyp_total);
        recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
    }
    return 2.0 * precision * recall / (precision + recall);
}

std::string stem_token(const std::string& token) {
    static const std::vector<std::string> kSuffixes = {"ness", "ment", "ing",
                                                       "ed",   "ly",   "es", "s"};
    for (const std::string& suffix : kSuffixes) {
        if (token.size() > suffix.size() && token.size() - suffix.size() >= 3 &&
            token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0) {
            return token.substr(0, token.size() - suffix.size());
        }
    }
    return token;
}

double meteor_lite(const TokenSequence& hypothesis, const TokenSequence& reference) {
    if (reference.empty()) {
        throw InvalidInputError("meteor_lite needs a nonempty reference");
    }
    if (hypothesis.empty()) {
        return 0.0;
    }

    const std::size_t hyp_len = hypothesis.size();
    const std::size_t ref_len = reference.size();
    std::vector<long> aligned_ref_pos(hyp_len, -1);
    std::vector<bool> ref_used(ref_len, false);

    // Stage 1: exact matches, each hypothesis token to the first unused
    // identical reference token.
    for (std::size_t i = 0; i < hyp_len; ++i) {
        for (std::size_t j = 0; j < ref_len; ++j) {
            if (!ref_used[j] && reference.tokens[j] == hypothesis.tokens[i]) {
                aligned_ref_pos[i] = static_cast<long>(j);
                ref_used[j] = true;
                break;
            }
        }
    }

    // Stage 2: stem matches for what is still unaligned.
    std::vector<std::string> hyp_stems(hyp_len), ref_stems(ref_len);
    for (std::size_t i = 0; i < hyp_len; ++i) hyp_stems[i] = stem_token(hypothesis.tokens[i]);
    for (std::size_t j = 0; j < ref_len; ++j) ref_stems[j] = stem_token(reference.tokens[j]);
    for (std::size_t i = 0; i < hyp_len; ++i) {
        if (aligned_ref_pos[i] >= 0) continue;
        for (std::size_t j = 0; j < ref_len; ++j) {
            if (!ref_used[j] && ref_stems[j] == hyp_stems[i]) {
                aligned_ref_pos[i] = static_cast<long>(j);
                ref_used[j] = true;
                break;
            }
        }
    }

    std::size_t matches = 0;
    for (long pos : aligned_ref_pos) {
        if (pos >= 0) ++matches;
    }
    if (matches == 0) {
        return 0.0;
    }

    const double p = static_cast<double>(matches) / static_cast<double>(hyp_len);
    const double r = static_cast<double>(matches) / static_cast<double>(ref_len);
    const double f_mean = 10.0 * p * r / (r + 9.0 * p);

    // A chunk is a maximal run of adjacent hypothesis positions mapped to
    // adjacent, increasing reference positions.
    std::size_t chunks = 0;
    long prev_hyp = -2, prev_ref = -2;
    for (std::size_t i = 0; i < hyp_len; ++i) {
        if (aligned_ref_pos[i] < 0) continue;
        if (static_cast<long>(i) != prev_hyp + 1 || aligned_ref_pos[i] != prev_ref + 1) {
            ++chunks;
        }
        prev_hyp = static_cast<long>(i);
        prev_ref = aligned_ref_pos[i];
    }

    const double fragmentation = static_cast<double>(chunks) / static_cast<double>(matches);
    const double penalty = 0.5 * fragmentation * fragmentation * fragmentation;
    return f_mean * (1.0 - penalty);
}

}  // namespace coaeval
