#include <doctest.h>

#include <cmath>
#include <random>

#include "coaeval/data/dataset.hpp"
#include "coaeval/stats/correlation.hpp"

using namespace coaeval;

namespace {

// Independent oracles: different construction paths than the library.

std::vector<double> oracle_ranks(const std::vector<double>& values) {
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t less = 0, equal = 0;
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (values[j] < values[i]) ++less;
            if (values[j] == values[i]) ++equal;
        }
        ranks[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
    }
    return ranks;
}

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

double oracle_kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
    long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0 && dy == 0) continue;
            if (dx == 0) {
                ++ties_x;
            } else if (dy == 0) {
                ++ties_y;
            } else if (dx * dy > 0) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double den_a = static_cast<double>(concordant + discordant + ties_x);
    const double den_b = static_cast<double>(concordant + discordant + ties_y);
    return static_cast<double>(concordant - discordant) / std::sqrt(den_a * den_b);
}

std::vector<double> random_series(std::mt19937& rng, std::size_t length) {
    // Integer-heavy to force ties, with an occasional half step.
    std::uniform_int_distribution<int> values(1, 6);
    std::bernoulli_distribution half(0.15);
    std::vector<double> out(length);
    for (double& v : out) {
        v = values(rng) + (half(rng) ? 0.5 : 0.0);
    }
    return out;
}

Dataset tiny_dataset(const std::vector<double>& human_means) {
    Dataset dataset;
    dataset.id = "tiny";
    dataset.task = TaskKind::kDialog;
    dataset.aspects.push_back({"overall", "how good?", 1.0, 5.0, 1});
    for (std::size_t i = 0; i < human_means.size(); ++i) {
        EvaluationInstance instance;
        instance.id = "i" + std::to_string(i);
        instance.source = "s";
        instance.hypothesis = "h";
        instance.human_scores["overall"] = {human_means[i]};
        dataset.instances.push_back(std::move(instance));
    }
    return dataset;
}

ScoreTable table_for(const Dataset& dataset, const std::vector<double>& values) {
    ScoreTable table;
    table.dataset_id = dataset.id;
    table.metric_name = "metric";
    table.aspect_name = "overall";
    for (std::size_t i = 0; i < values.size(); ++i) {
        MetricScore score;
        score.instance_id = dataset.instances[i].id;
        score.value = values[i];
        table.rows[score.instance_id] = score;
    }
    return table;
}

}  // namespace

TEST_CASE("pearson known values") {
    CHECK(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) ==
          doctest::Approx(1.0));
    CHECK(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) ==
          doctest::Approx(-1.0));

    const std::vector<double> x{1, 2, 4, 8}, y{2, 3, 5, 9};
    const double expected = oracle_pearson(x, y);
    CHECK(std::abs(*pearson(x, y) - expected) < 1e-12);
    CHECK(expected == doctest::Approx(1.0));  // y is x + 1
}

TEST_CASE("pearson input validation and undefined cases") {
    CHECK_THROWS_AS(pearson(std::vector<double>{1.0}, std::vector<double>{1.0}),
                    InvalidInputError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}),
                    InvalidInputError);
    CHECK(!pearson(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}).has_value());
}

TEST_CASE("spearman known values") {
    CHECK(*spearman(std::vector<double>{1, 2, 5}, std::vector<double>{2, 4, 9}) ==
          doctest::Approx(1.0));
    CHECK(*spearman(std::vector<double>{1, 2, 5}, std::vector<double>{9, 4, 2}) ==
          doctest::Approx(-1.0));

    // Tie-aware case: ranks computed independently, then Pearson.
    const std::vector<double> x{1, 2, 2, 3}, y{1, 3, 2, 4};
    const double expected = oracle_pearson(oracle_ranks(x), oracle_ranks(y));
    CHECK(std::abs(*spearman(x, y) - expected) < 1e-12);
    CHECK(expected == doctest::Approx(3.0 / std::sqrt(10.0)));
    CHECK(!spearman(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}).has_value());
}

TEST_CASE("kendall tau-b known values") {
    CHECK(*kendall_tau_b(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}) ==
          doctest::Approx(1.0));
    CHECK(*kendall_tau_b(std::vector<double>{1, 2, 3}, std::vector<double>{6, 5, 4}) ==
          doctest::Approx(-1.0));
    CHECK(*kendall_tau_b(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}) ==
          doctest::Approx(1.0 / 3.0));
    CHECK(!kendall_tau_b(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}).has_value());
}

TEST_CASE("spearman equals pearson of average ranks on random tie-heavy vectors") {
    std::mt19937 rng(20240817);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t length = 5 + rng() % 56;
        const auto x = random_series(rng, length);
        const auto y = random_series(rng, length);
        const auto via_library = spearman(x, y);
        const auto oracle = pearson(oracle_ranks(x), oracle_ranks(y));
        REQUIRE(via_library.has_value() == oracle.has_value());
        if (via_library) {
            CHECK(std::abs(*via_library - *oracle) < 1e-12);
        }
    }
}

TEST_CASE("kendall tau-b equals the brute-force pair-count oracle exactly") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t length = 5 + rng() % 56;
        const auto x = random_series(rng, length);
        const auto y = random_series(rng, length);
        const auto via_library = kendall_tau_b(x, y);
        if (!via_library) {
            continue;
        }
        CHECK(*via_library == oracle_kendall_tau_b(x, y));
    }
}

TEST_CASE("coefficient invariances and symmetry") {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t length = 5 + rng() % 40;
        const auto x = random_series(rng, length);
        const auto y = random_series(rng, length);

        std::vector<double> y_affine(y.size()), y_monotone(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y_affine[i] = 2.5 * y[i] + 7.0;
            y_monotone[i] = y[i] * y[i] * y[i] + 2.0 * y[i];
        }

        const auto p = pearson(x, y);
        if (p) {
            CHECK(std::abs(*p - *pearson(x, y_affine)) < 1e-12);
            CHECK(std::abs(*p - *pearson(y, x)) < 1e-12);
        }
        const auto s = spearman(x, y);
        if (s) {
            CHECK(std::abs(*s - *spearman(x, y_monotone)) < 1e-12);
            CHECK(std::abs(*s - *spearman(y, x)) < 1e-12);
        }
        const auto k = kendall_tau_b(x, y);
        if (k) {
            CHECK(std::abs(*k - *kendall_tau_b(x, y_monotone)) < 1e-12);
            CHECK(std::abs(*k - *kendall_tau_b(y, x)) < 1e-12);
        }
    }
}

TEST_CASE("average_ranks assigns tied values the mean of their positions") {
    const std::vector<double> values{10, 20, 20, 30};
    const std::vector<double> ranks = average_ranks(values);
    CHECK(ranks == std::vector<double>{1.0, 2.5, 2.5, 4.0});
}

TEST_CASE("dataset_level_correlations pairs by instance id") {
    const Dataset dataset = tiny_dataset({1, 2, 3, 4, 5});

    SUBCASE("perfect agreement gives 1.0 everywhere") {
        const ScoreTable table = table_for(dataset, {1, 2, 3, 4, 5});
        const CorrelationReport report = dataset_level_correlations({table}, dataset);
        REQUIRE(report.rows.size() == 1);
        CHECK(*report.rows[0].pearson == doctest::Approx(1.0));
        CHECK(*report.rows[0].spearman == doctest::Approx(1.0));
        CHECK(*report.rows[0].kendall == doctest::Approx(1.0));
        CHECK(report.rows[0].n_pairs == 5);
    }

    SUBCASE("constant metric is flagged undefined, never zero") {
        const ScoreTable table = table_for(dataset, {3, 3, 3, 3, 3});
        const CorrelationReport report = dataset_level_correlations({table}, dataset);
        CHECK(!report.rows[0].pearson.has_value());
        CHECK(!report.rows[0].spearman.has_value());
        CHECK(!report.rows[0].kendall.has_value());
        CHECK(report.rows[0].note == "zero variance in a series");
    }

    SUBCASE("exclusions drop out of that metric's pairing only") {
        ScoreTable table = table_for(dataset, {1, 2, 3, 4, 5});
        table.rows.erase("i4");
        table.exclusions.emplace_back("i4", "parse failure");
        const CorrelationReport report = dataset_level_correlations({table}, dataset);
        CHECK(report.rows[0].n_pairs == 4);
        CHECK(report.rows[0].n_excluded == 1);
    }

    SUBCASE("fewer than two pairs is undefined with a reason") {
        ScoreTable table = table_for(dataset, {1});
        const CorrelationReport report = dataset_level_correlations({table}, dataset);
        CHECK(!report.rows[0].pearson.has_value());
        CHECK(report.rows[0].note == "fewer than 2 pairs");
    }

    SUBCASE("foreign dataset id is rejected") {
        ScoreTable table = table_for(dataset, {1, 2, 3, 4, 5});
        table.dataset_id = "other";
        CHECK_THROWS_AS(dataset_level_correlations({table}, dataset), InvalidInputError);
    }
}
