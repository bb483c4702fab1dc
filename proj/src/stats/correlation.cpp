#include "coaeval/stats/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "coaeval/data/dataset.hpp"

namespace coaeval {

namespace {

void require_paired(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw InvalidInputError("correlation inputs have different lengths");
    }
    if (x.size() < 2) {
        throw InvalidInputError("correlation needs at least 2 paired points");
    }
}

// Merge-sort inversion count over values[order]; reorders `order` by value.
std::int64_t count_inversions(std::vector<std::size_t>& order, const std::vector<double>& values,
                              std::vector<std::size_t>& scratch, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) {
        return 0;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = count_inversions(order, values, scratch, lo, mid) +
                         count_inversions(order, values, scratch, mid, hi);
    std::size_t left = lo, right = mid, out = lo;
    while (left < mid && right < hi) {
        if (values[order[right]] < values[order[left]]) {
            swaps += static_cast<std::int64_t>(mid - left);
            scratch[out++] = order[right++];
        } else {
            scratch[out++] = order[left++];
        }
    }
    while (left < mid) scratch[out++] = order[left++];
    while (right < hi) scratch[out++] = order[right++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              order.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

std::int64_t tie_pair_count(const std::vector<double>& sorted) {
    std::int64_t pairs = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const std::int64_t run = static_cast<std::int64_t>(j - i);
        pairs += run * (run - 1) / 2;
        i = j;
    }
    return pairs;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // Positions i+1 .. j hold equal values; each gets the mean rank.
        const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            ranks[order[k]] = mean_rank;
        }
        i = j;
    }
    return ranks;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    require_paired(x, y);
    const double n = static_cast<double>(x.size());
    const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        return std::nullopt;
    }
    return sxy / std::sqrt(sxx * syy);
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    require_paired(x, y);
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    require_paired(x, y);
    const std::size_t n = x.size();

    // Order by x ascending, breaking x-ties by y ascending so that pairs tied
    // in x never count as inversions.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    const std::int64_t total_pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;

    // Pairs tied in x, and pairs tied in both x and y.
    std::int64_t tied_x = 0, tied_both = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i + 1;
            while (j < n && x[order[j]] == x[order[i]]) ++j;
            const std::int64_t run = static_cast<std::int64_t>(j - i);
            tied_x += run * (run - 1) / 2;
            std::size_t k = i;
            while (k < j) {
                std::size_t l = k + 1;
                while (l < j && y[order[l]] == y[order[k]]) ++l;
                const std::int64_t both = static_cast<std::int64_t>(l - k);
                tied_both += both * (both - 1) / 2;
                k = l;
            }
            i = j;
        }
    }

    std::int64_t tied_y = 0;
    {
        std::vector<double> sorted_y(y.begin(), y.end());
        std::sort(sorted_y.begin(), sorted_y.end());
        tied_y = tie_pair_count(sorted_y);
    }

    std::vector<double> y_values(y.begin(), y.end());
    std::vector<std::size_t> scratch(n);
    const std::int64_t discordant = count_inversions(order, y_values, scratch, 0, n);

    const std::int64_t concordant_minus_discordant =
        total_pairs - tied_x - tied_y + tied_both - 2 * discordant;
    const std::int64_t den_x = total_pairs - tied_x;
    const std::int64_t den_y = total_pairs - tied_y;
    if (den_x == 0 || den_y == 0) {
        return std::nullopt;
    }
    return static_cast<double>(concordant_minus_discordant) /
           std::sqrt(static_cast<double>(den_x) * static_cast<double>(den_y));
}

CorrelationReport dataset_level_correlations(const std::vector<ScoreTable>& score_tables,
                                             const Dataset& dataset) {
    CorrelationReport report;
    report.dataset_id = dataset.id;

    for (const ScoreTable& table : score_tables) {
        CorrelationRow row;
        row.metric_name = table.metric_name;
        row.aspect_name = table.aspect_name;
        row.n_excluded = table.exclusions.size();

        if (!table.dataset_id.empty() && table.dataset_id != dataset.id) {
            throw InvalidInputError("score table for dataset '" + table.dataset_id +
                                    "' paired with dataset '" + dataset.id + "'");
        }

        PairedSeries series;
        for (const EvaluationInstance& instance : dataset.instances) {
            const auto it = table.rows.find(instance.id);
            if (it == table.rows.end()) {
                continue;
            }
            const auto human = dataset.mean_human_score(instance, table.aspect_name);
            if (!human) {
                continue;
            }
            series.instance_ids.push_back(instance.id);
            series.metric_values.push_back(it->second.value);
            series.human_values.push_back(*human);
        }

        row.n_pairs = series.instance_ids.size();
        if (row.n_pairs < 2) {
            row.note = "fewer than 2 pairs";
        } else {
            row.pearson = pearson(series.metric_values, series.human_values);
            row.spearman = spearman(series.metric_values, series.human_values);
            row.kendall = kendall_tau_b(series.metric_values, series.human_values);
            if (!row.pearson || !row.spearman || !row.kendall) {
                row.note = "zero variance in a series";
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace coaeval
