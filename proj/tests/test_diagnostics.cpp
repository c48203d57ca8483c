#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "fieldsum/diagnostics.hpp"

using namespace fieldsum;

TEST_CASE("run_replications: determinism and thread independence") {
    ExperimentPlan plan;
    plan.law = laws::gaussian(1.0);
    plan.dim = 2;
    plan.side = 8;
    plan.regions = {regions::quadrant({0.5, 0.5}), regions::quadrant({1.0, 1.0})};
    plan.replications = 40;
    plan.master_seed = 99;
    plan.threads = 1;

    const auto serial = run_replications(plan);
    plan.threads = 4;
    const auto parallel = run_replications(plan);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t j = 0; j < serial.size(); ++j) {
        REQUIRE(serial[j].raw == parallel[j].raw);
        REQUIRE(serial[j].normalized == parallel[j].normalized);
        REQUIRE(serial[j].seed == parallel[j].seed);
    }

    // any replication reproduces the directly seeded evaluation: slot j depends
    // only on (master seed, j), never on execution order
    for (const std::uint64_t j : {0, 5, 17}) {
        const Field field =
            sample_field(plan.law, plan.dim, plan.side, replication_seed(99, j));
        const ProcessEvaluation direct =
            evaluate_process(field, plan.regions, Normalization::standard);
        REQUIRE(serial[static_cast<std::size_t>(j)].raw == direct.raw);
    }

    ExperimentPlan single = plan;
    single.replications = 1;
    const auto once = run_replications(single);
    REQUIRE(once.size() == 1);
    REQUIRE(once[0].raw == serial[0].raw);
}

TEST_CASE("run_replications: centered laws average to zero and caps are enforced") {
    ExperimentPlan plan;
    plan.law = laws::gaussian(1.0);
    plan.dim = 1;
    plan.side = 64;
    plan.regions = {regions::quadrant({0.5})};
    plan.replications = 2000;
    plan.master_seed = 1234;
    plan.threads = 2;
    const auto evals = run_replications(plan);
    std::vector<double> values;
    values.reserve(evals.size());
    for (const auto& e : evals) values.push_back(e.normalized[0]);
    const double mean = sample_mean(values);
    const double se = std::sqrt(sample_variance(values) / static_cast<double>(values.size()));
    REQUIRE(std::abs(mean) <= 3.0 * se);

    plan.resource_cap = 1000.0;
    REQUIRE_THROWS_WITH(run_replications(plan), Catch::Matchers::Contains("resource cap"));
}

TEST_CASE("report verdict rules") {
    const TestReport pass = make_report("x", 1.02, 1.0, 0.05, std::nullopt, 1, 0.0);
    REQUIRE(pass.verdict == Verdict::pass);
    const TestReport fail = make_report("x", 1.2, 1.0, 0.05, std::nullopt, 1, 0.0);
    REQUIRE(fail.verdict == Verdict::fail);
    const TestReport underpowered = make_report("x", 1.0, 1.0, 0.05, 0.06, 1, 0.0);
    REQUIRE(underpowered.verdict == Verdict::inconclusive);
    const TestReport powered = make_report("x", 1.0, 1.0, 0.05, 0.01, 1, 0.0);
    REQUIRE(powered.verdict == Verdict::pass);
}

TEST_CASE("fidi gaussian test: null passes, degenerate fails") {
    std::vector<double> target_samples;
    CounterRng rng(5005, 0);
    for (int i = 0; i < 500; ++i) target_samples.push_back(0.5 * rng.next_gaussian());
    const TestReport pass = fidi_gaussian_test(target_samples, 0.25, 0.0, 5005);
    REQUIRE(pass.verdict == Verdict::pass);
    REQUIRE(pass.tolerance == Approx(1.36 / std::sqrt(500.0) + 0.03));

    const TestReport fail =
        fidi_gaussian_test(std::vector<double>(500, 0.7), 0.25, 0.0, 1);
    REQUIRE(fail.verdict == Verdict::fail);

    REQUIRE_THROWS_AS(fidi_gaussian_test(std::vector<double>(100, 0.0), 1.0, 0.0, 1),
                      std::invalid_argument);
}

TEST_CASE("KS null calibration: at least 99 of 100 meta-trials pass") {
    int passes = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        std::vector<double> samples;
        CounterRng rng(replication_seed(31415, trial), 1);
        for (int i = 0; i < 300; ++i) samples.push_back(rng.next_gaussian());
        if (fidi_gaussian_test(samples, 1.0, 0.0, trial).verdict == Verdict::pass) ++passes;
    }
    REQUIRE(passes >= 99);
}

TEST_CASE("covariance check on synthetic pairs") {
    std::vector<double> xs, ys;
    CounterRng rng(606, 0);
    for (int i = 0; i < 4000; ++i) {
        xs.push_back(rng.next_gaussian());
        ys.push_back(rng.next_gaussian());
    }
    REQUIRE(covariance_check(xs, ys, 0.0, 0.0, 606).verdict == Verdict::pass);
    REQUIRE(covariance_check(xs, ys, 1.0, 0.0, 606).verdict == Verdict::fail);
    // identical coordinates: covariance equals the variance
    REQUIRE(covariance_check(xs, xs, sample_variance(xs), 1e-9, 606).verdict == Verdict::pass);
}

TEST_CASE("raikov: rademacher control is exact, gaussian concentrates") {
    const RaikovResult control = raikov_check(laws::rademacher(), 1, 1000, 50, 7, 0.95, 1.05);
    REQUIRE(control.norming_squared == 1000.0);
    REQUIRE(control.median_ratio == 1.0);
    REQUIRE(control.outlier_frequency == 0.0);
    REQUIRE(control.report.verdict == Verdict::pass);

    const RaikovResult gauss =
        raikov_check(laws::gaussian(1.0), 2, 100, 200, 8, 0.95, 1.05, 2);
    REQUIRE(std::abs(gauss.median_ratio - 1.0) < 0.05);
    REQUIRE(gauss.report.verdict == Verdict::pass);
}

TEST_CASE("lemma2 oracle: hand-checked cases") {
    // d=1, quadrant(0.5), n=5: only the cell at i=3 differs, a = 0.5
    REQUIRE(lemma2_oracle(regions::quadrant({0.5}), 5, 1.0) ==
            Approx(0.5 / std::sqrt(5.0)).epsilon(1e-12));
    // cell union at its own resolution: weights equal the Gamma indicator
    REQUIRE(lemma2_oracle(regions::cell_union(1, 8, {{2}, {5}}), 8, 1.0) == 0.0);
    // variance scales linearly
    REQUIRE(lemma2_oracle(regions::quadrant({0.5}), 5, 4.0) ==
            Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("lemma2 check: MC agrees with the closed form and shrinks") {
    const std::vector<std::int64_t> ladder = {5, 9, 17};
    const Lemma2Result result = lemma2_check(laws::gaussian(1.0), regions::quadrant({0.5}),
                                             ladder, 400, 2024, 0.3, 2);
    REQUIRE(result.rows.size() == 3);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        REQUIRE(result.rows[i].oracle ==
                Approx(0.5 / std::sqrt(static_cast<double>(ladder[i]))).epsilon(1e-12));
        REQUIRE(std::abs(result.rows[i].mc_estimate - result.rows[i].oracle) <=
                3.0 * result.rows[i].mc_se);
    }
    REQUIRE(result.report.verdict == Verdict::pass);

    REQUIRE_THROWS_AS(lemma2_check(laws::pareto_tail(2.0), regions::quadrant({0.5}), ladder,
                                   100, 1, 0.3),
                      std::invalid_argument);
}

TEST_CASE("exact W_r probabilities") {
    const CounterexampleParams params = counterexample_params(1, 1, 2);
    REQUIRE(wr_exact_probability(params) ==
            Approx(1.0 - std::pow(31.0 / 32.0, 16.0)).epsilon(1e-12));
    for (int r = 2; r <= 6; ++r) {
        const double p = wr_exact_probability(counterexample_params(1, 1, r));
        REQUIRE(p >= 0.35);
        REQUIRE(p <= 0.45);
    }
    // limit 1 - e^{-1/2} as r grows
    REQUIRE(wr_exact_probability(counterexample_params(1, 1, 10)) ==
            Approx(1.0 - std::exp(-0.5)).margin(1e-3));
}

TEST_CASE("the modulus statistic is deterministic on W_r") {
    const CounterexampleParams params = counterexample_params(1, 1, 2);
    Field field;
    field.dim = 1;
    field.side = 16;
    field.law = laws::counterexample_integer(1);
    field.values.assign(16, 1.0);
    field.values[7] = static_cast<double>(params.threshold);  // exactly one exceedance
    const auto region = adaptive_region(field, params);
    REQUIRE(region.has_value());
    const double stat = partial_sum(field, *region) / 4.0;  // n^{d/2} = 4
    REQUIRE(stat >= 0.5);
    REQUIRE(stat == 1.0);  // ceil in k_r only raises the bound: k beta / n^{1/2} = 1
}

TEST_CASE("counterexample experiment at desk scale") {
    const CounterexampleResult result = counterexample_experiment(1, 1, 2, 3, 800, 11, 2);
    REQUIRE(result.rows.size() == 2);
    REQUIRE(result.rows[0].measure == Approx(1.0 / 16.0).epsilon(1e-15));
    REQUIRE(result.rows[1].measure == Approx(1.0 / 64.0).epsilon(1e-15));
    for (const auto& row : result.rows) {
        REQUIRE(row.verdict == Verdict::pass);
        REQUIRE(std::abs(row.frequency - row.oracle) <= 4.0 * row.se);
    }
    REQUIRE(result.report.verdict == Verdict::pass);

    // determinism across thread counts
    const CounterexampleResult repeat = counterexample_experiment(1, 1, 2, 3, 800, 11, 1);
    for (std::size_t i = 0; i < result.rows.size(); ++i)
        REQUIRE(repeat.rows[i].frequency == result.rows[i].frequency);

    REQUIRE_THROWS_WITH(counterexample_experiment(1, 1, 2, 3, 100000000, 11, 1),
                        Catch::Matchers::Contains("resource cap"));
}

TEST_CASE("lemma1 ratio: degenerate and basic configurations") {
    Lemma1Config same;
    same.name = "identical";
    same.law = laws::rademacher();
    same.dim = 1;
    same.class_one = {regions::quadrant({0.5})};
    same.class_two = {regions::quadrant({0.5})};
    const Lemma1Ratio zero = lemma1_ratio(same, 32, 100, 5);
    REQUIRE(zero.psi1_norm == 0.0);
    REQUIRE(zero.k_hat == 0.0);

    Lemma1Config pair;
    pair.name = "pair";
    pair.law = laws::rademacher();
    pair.dim = 1;
    pair.class_one = {regions::quadrant({0.25})};
    pair.class_two = {regions::quadrant({0.75})};
    double low = std::numeric_limits<double>::infinity();
    double high = 0.0;
    for (const std::int64_t n : {16, 32, 64}) {
        const Lemma1Ratio ratio = lemma1_ratio(pair, n, 400, 5);
        REQUIRE(std::isfinite(ratio.k_hat));
        REQUIRE(ratio.k_hat > 0.0);
        low = std::min(low, ratio.k_hat);
        high = std::max(high, ratio.k_hat);
    }
    REQUIRE(high / low < 3.0);

    Lemma1Config bad = pair;
    bad.law = laws::pareto_tail(2.0);
    REQUIRE_THROWS_AS(lemma1_ratio(bad, 16, 100, 5), std::invalid_argument);

    Lemma1Config big = pair;
    big.class_one = enumerate_quadrant_grid(1, 9);   // 10 regions
    big.class_two = enumerate_quadrant_grid(1, 9);   // 100 pairs > 64
    REQUIRE_THROWS_AS(lemma1_ratio(big, 16, 100, 5), std::invalid_argument);
}

TEST_CASE("lemma1 default sweep has the pinned shape") {
    const auto sweep = lemma1_default_sweep();
    REQUIRE(sweep.size() == 12);
    for (const auto& config : sweep)
        REQUIRE(config.class_one.size() * config.class_two.size() <= 64);
}
