#include <catch2/catch.hpp>

#include <cmath>
#include <functional>

#include "fieldsum/law.hpp"

using namespace fieldsum;

namespace {

// Simpson quadrature oracle, independent of the closed forms under test
double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double acc = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("law factories validate their parameters") {
    REQUIRE_THROWS_AS(laws::gaussian(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(laws::gaussian(-1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(laws::pareto_tail(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(laws::counterexample_integer(0), std::invalid_argument);
    REQUIRE_THROWS_AS(laws::md_bounded(laws::rademacher(), 1.0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(laws::md_bounded(laws::rademacher(), -0.1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(laws::md_bounded(laws::rademacher(), 0.5, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(laws::md_bounded(laws::pareto_tail(2.0), 0.5, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(laws::md_bounded(laws::gaussian(2.0), 0.5, 1), std::invalid_argument);
    REQUIRE_NOTHROW(laws::md_bounded(laws::gaussian(1.0), 0.0, 2));
}

TEST_CASE("truncated second moment: rademacher") {
    const Law law = laws::rademacher();
    REQUIRE(truncated_second_moment(law, 2.0) == 1.0);
    REQUIRE(truncated_second_moment(law, 1.0) == 0.0);  // strict |X| < t
    REQUIRE(truncated_second_moment(law, 1.5) == 1.0);
    REQUIRE(truncated_second_moment(law, 0.5) == 0.0);
}

TEST_CASE("truncated second moment: pareto tail") {
    const Law critical = laws::pareto_tail(2.0);
    REQUIRE(truncated_second_moment(critical, std::exp(1.0)) == Approx(2.0).epsilon(1e-12));
    REQUIRE(truncated_second_moment(critical, 1.0) == 0.0);
    REQUIRE(truncated_second_moment(critical, 0.5) == 0.0);

    const Law integrable = laws::pareto_tail(3.0);
    // density 3 x^{-4} on |x| >= 1
    const double oracle =
        simpson([](double x) { return x * x * 3.0 * std::pow(x, -4.0); }, 1.0, 2.0, 4000);
    REQUIRE(truncated_second_moment(integrable, 2.0) == Approx(oracle).epsilon(1e-9));
    REQUIRE(truncated_second_moment(integrable, 2.0) == Approx(1.5).epsilon(1e-12));
}

TEST_CASE("truncated second moment: gaussian vs quadrature") {
    const Law unit = laws::gaussian(1.0);
    const double oracle_unit =
        simpson([](double z) { return z * z * standard_normal_pdf(z); }, -1.0, 1.0, 4000);
    REQUIRE(truncated_second_moment(unit, 1.0) == Approx(oracle_unit).epsilon(1e-10));

    const Law wide = laws::gaussian(4.0);
    const double oracle_wide = simpson(
        [](double x) { return x * x * standard_normal_pdf(x / 2.0) / 2.0; }, -3.0, 3.0, 4000);
    REQUIRE(truncated_second_moment(wide, 3.0) == Approx(oracle_wide).epsilon(1e-10));
}

TEST_CASE("truncated second moment: counterexample integer law") {
    const Law law = laws::counterexample_integer(1);
    // direct finite sum: sum_{k=1}^{3} k^2 (k^{-2} - (k+1)^{-2})
    double oracle = 0.0;
    for (int k = 1; k <= 3; ++k)
        oracle += k * k * (std::pow(k, -2.0) - std::pow(k + 1, -2.0));
    REQUIRE(truncated_second_moment(law, 3.5) == Approx(oracle).epsilon(1e-14));
    REQUIRE(truncated_second_moment(law, 3.5) == Approx(1.7430555555555556).epsilon(1e-12));
    REQUIRE(truncated_second_moment(law, 1.0) == 0.0);
    REQUIRE(truncated_second_moment(law, 3.0) ==
            Approx(oracle - 9.0 * (1.0 / 9.0 - 1.0 / 16.0)).epsilon(1e-12));
}

TEST_CASE("band means vanish for the symmetric marginals") {
    for (const Law& law : {laws::gaussian(1.0), laws::rademacher(), laws::pareto_tail(2.0),
                           laws::counterexample_integer(1)}) {
        REQUIRE(band_mean(law, 0.0, 1.0) == 0.0);
        REQUIRE(band_mean(law, 0.5, 3.0) == 0.0);
    }
    REQUIRE_THROWS_AS(band_mean(laws::rademacher(), 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("second moments") {
    REQUIRE(second_moment(laws::gaussian(2.5)).value() == 2.5);
    REQUIRE(second_moment(laws::rademacher()).value() == 1.0);
    REQUIRE(second_moment(laws::pareto_tail(3.0)).value() == Approx(3.0));
    REQUIRE_FALSE(second_moment(laws::pareto_tail(2.0)).has_value());
    REQUIRE_FALSE(second_moment(laws::counterexample_integer(1)).has_value());
    REQUIRE_FALSE(second_moment(laws::md_bounded(laws::rademacher(), 0.5, 1)).has_value());

    // partial-series oracle for p = 2: sum (2k-1) k^{-3} truncated at K, tail < 2/K
    const auto m2 = second_moment(laws::counterexample_integer(2));
    REQUIRE(m2.has_value());
    double partial = 0.0;
    const int cutoff = 200000;
    for (int k = 1; k <= cutoff; ++k)
        partial += (2.0 * k - 1.0) * std::pow(static_cast<double>(k), -3.0);
    REQUIRE(*m2 == Approx(partial).margin(2.0 / cutoff + 1e-9));
}

TEST_CASE("upper tails") {
    REQUIRE(upper_tail(laws::pareto_tail(2.0), 10.0) == Approx(0.01).epsilon(1e-12));
    REQUIRE(upper_tail(laws::pareto_tail(2.0), 0.5) == 1.0);
    REQUIRE(upper_tail(laws::rademacher(), 0.5) == 1.0);
    REQUIRE(upper_tail(laws::rademacher(), 1.0) == 0.0);
    // P(|X| > 3) = P(|X| >= 4) = 4^{-2} for p = 1
    REQUIRE(upper_tail(laws::counterexample_integer(1), 3.0) == Approx(0.0625).epsilon(1e-12));
    REQUIRE(upper_tail(laws::counterexample_integer(1), 3.5) == Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("i.i.d. moment helpers reject md laws") {
    const Law md = laws::md_bounded(laws::rademacher(), 0.5, 1);
    REQUIRE_THROWS_AS(truncated_second_moment(md, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(upper_tail(md, 1.0), std::invalid_argument);
    CounterRng rng(1, 1);
    REQUIRE_THROWS_AS(draw(md, rng), std::invalid_argument);
}
