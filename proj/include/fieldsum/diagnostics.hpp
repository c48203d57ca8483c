#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fieldsum/counterexample.hpp"
#include "fieldsum/field.hpp"
#include "fieldsum/process.hpp"
#include "fieldsum/region.hpp"
#include "fieldsum/stats.hpp"

namespace fieldsum {

// --- replication engine --------------------------------------------------------

// Index-parallel loop with deterministic output: task i writes slot i, so the
// result is identical for any thread count or scheduling order.
inline void parallel_for_index(int count, int threads, const std::function<void(int)>& task) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard<std::mutex> guard(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int workers = std::min(threads, count);
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct ExperimentPlan {
    Law law;
    int dim = 1;
    std::int64_t side = 1;
    std::vector<Region> regions;
    Normalization normalization = Normalization::standard;
    int replications = 1;
    std::uint64_t master_seed = 0;
    int threads = 1;
    double resource_cap = 4e9;  // limit on n^d * replications
};

inline std::vector<ProcessEvaluation> run_replications(const ExperimentPlan& plan) {
    if (plan.replications < 1) throw std::invalid_argument("plan needs replications >= 1");
    const double load = static_cast<double>(lattice_size(plan.dim, plan.side)) *
                        static_cast<double>(plan.replications);
    if (load > plan.resource_cap)
        throw std::invalid_argument("plan load n^d*R = " + std::to_string(load) +
                                    " exceeds resource cap " + std::to_string(plan.resource_cap));
    double norming_b = 0.0;
    if (plan.normalization == Normalization::norming)
        norming_b = norming_constant(plan.law, plan.dim, plan.side);
    std::vector<ProcessEvaluation> evaluations(static_cast<std::size_t>(plan.replications));
    parallel_for_index(plan.replications, plan.threads, [&](int j) {
        const std::uint64_t seed = replication_seed(plan.master_seed, static_cast<std::uint64_t>(j));
        const Field field = sample_field(plan.law, plan.dim, plan.side, seed);
        evaluations[static_cast<std::size_t>(j)] =
            evaluate_process(field, plan.regions, plan.normalization, norming_b);
    });
    return evaluations;
}

// --- verdicts -------------------------------------------------------------------

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct TestReport {
    std::string statistic;
    double observed = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    std::optional<double> se;
    Verdict verdict = Verdict::fail;
    std::uint64_t seed = 0;
    double runtime_seconds = 0.0;
    std::string note;
};

inline std::string short_number(double x) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%g", x);
    return buffer;
}

// pass iff |observed - target| <= tolerance; a Monte Carlo SE above half the
// tolerance downgrades the verdict to inconclusive (underpowered run)
inline TestReport make_report(std::string statistic, double observed, double target,
                              double tolerance, std::optional<double> se, std::uint64_t seed,
                              double runtime_seconds, std::string note = {}) {
    TestReport report;
    report.statistic = std::move(statistic);
    report.observed = observed;
    report.target = target;
    report.tolerance = tolerance;
    report.se = se;
    report.seed = seed;
    report.runtime_seconds = runtime_seconds;
    report.note = std::move(note);
    if (se && *se > 0.5 * tolerance)
        report.verdict = Verdict::inconclusive;
    else
        report.verdict = std::abs(observed - target) <= tolerance ? Verdict::pass : Verdict::fail;
    return report;
}

// --- fidi / covariance ------------------------------------------------------------

// KS distance of the samples against N(0, variance). Default tolerance is the
// asymptotic 95% KS quantile 1.36/sqrt(R) plus 0.03 finite-n slack.
inline TestReport fidi_gaussian_test(std::span<const double> samples, double variance,
                                     double tolerance, std::uint64_t seed) {
    if (samples.size() < 200)
        throw std::invalid_argument("fidi_gaussian_test needs at least 200 samples");
    Stopwatch clock;
    if (!(tolerance > 0.0))
        tolerance = 1.36 / std::sqrt(static_cast<double>(samples.size())) + 0.03;
    const double d = ks_distance_gaussian({samples.begin(), samples.end()}, variance);
    return make_report("ks_gaussian", d, 0.0, tolerance, std::nullopt, seed, clock.seconds(),
                       "KS distance vs N(0," + short_number(variance) + ")");
}

inline TestReport covariance_check(std::span<const double> xs, std::span<const double> ys,
                                   double target, double extra_tolerance, std::uint64_t seed) {
    Stopwatch clock;
    const CovarianceEstimate est = sample_covariance(xs, ys);
    return make_report("covariance", est.value, target, 3.0 * est.se + extra_tolerance, est.se,
                       seed, clock.seconds());
}

// --- Raikov ratio -----------------------------------------------------------------

struct RaikovResult {
    TestReport report;
    double median_ratio = 0.0;
    double outlier_frequency = 0.0;  // frequency of |ratio - 1| > 0.25
    double norming_squared = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
};

// distribution of U_n^2 / b_n^2; the median must land in [band_lo, band_hi]
inline RaikovResult raikov_check(const Law& law, int dim, std::int64_t side, int replications,
                                 std::uint64_t seed, double band_lo, double band_hi,
                                 int threads = 1) {
    Stopwatch clock;
    RaikovResult result;
    result.norming_squared = norming_constant_squared(law, dim, side);
    std::vector<double> ratios(static_cast<std::size_t>(replications));
    parallel_for_index(replications, threads, [&](int j) {
        const Field field =
            sample_field(law, dim, side, replication_seed(seed, static_cast<std::uint64_t>(j)));
        NeumaierSum squares;
        for (double x : field.values) squares.add(x * x);
        ratios[static_cast<std::size_t>(j)] = squares.value() / result.norming_squared;
    });
    result.median_ratio = sample_median(ratios);
    result.min_ratio = *std::min_element(ratios.begin(), ratios.end());
    result.max_ratio = *std::max_element(ratios.begin(), ratios.end());
    int outliers = 0;
    for (double r : ratios)
        if (std::abs(r - 1.0) > 0.25) ++outliers;
    result.outlier_frequency = static_cast<double>(outliers) / replications;
    result.report = make_report(
        "raikov_median_ratio", result.median_ratio, 0.5 * (band_lo + band_hi),
        0.5 * (band_hi - band_lo), median_standard_error(ratios), seed, clock.seconds(),
        "band [" + short_number(band_lo) + "," + short_number(band_hi) +
            "]; freq(|ratio-1|>0.25) = " + short_number(result.outlier_frequency));
    return result;
}

// --- lemma2: L2 approximation of S_n(A) by the Gamma sum ---------------------------

// closed form for i.i.d. fields: n^{-d/2} || sum a_i X_i ||_2 with
// a_i = lambda(nA meet R_i) - 1{i in Gamma_n(A)}
inline double lemma2_oracle(const Region& region, std::int64_t side, double second_moment_value) {
    const WeightGrid grid = weight_grid(region, side);
    std::vector<char> in_gamma(grid.w.size(), 0);
    for (std::int64_t flat : gamma_set(region, side)) in_gamma[static_cast<std::size_t>(flat)] = 1;
    NeumaierSum squares;
    for (std::size_t i = 0; i < grid.w.size(); ++i) {
        const double a = grid.w[i] - (in_gamma[i] ? 1.0 : 0.0);
        squares.add(a * a);
    }
    return std::sqrt(squares.value() * second_moment_value) /
           std::sqrt(static_cast<double>(grid.w.size()));
}

struct Lemma2Row {
    std::int64_t side = 0;
    double mc_estimate = 0.0;
    double mc_se = 0.0;
    double oracle = 0.0;
};

struct Lemma2Result {
    TestReport report;
    std::vector<Lemma2Row> rows;
};

// Monte Carlo estimate of n^{-d/2} ||S_n(A) - S_{Gamma_n(A)}||_2 along an
// n-ladder, against the closed-form oracle. Verdict: oracle agreement within
// 3 SE at every n, overall decrease across the ladder (within MC slack), and
// final value below `tolerance`.
inline Lemma2Result lemma2_check(const Law& law, const Region& region,
                                 std::span<const std::int64_t> ladder, int replications,
                                 std::uint64_t seed, double tolerance, int threads = 1) {
    const auto m2 = second_moment(law);
    if (!m2) throw std::invalid_argument("lemma2_check needs a law with finite known variance");
    if (ladder.empty()) throw std::invalid_argument("lemma2_check needs a nonempty n-ladder");
    Stopwatch clock;
    Lemma2Result result;
    bool oracle_agreement = true;
    for (std::size_t ni = 0; ni < ladder.size(); ++ni) {
        const std::int64_t n = ladder[ni];
        const auto gamma = gamma_set(region, n);
        std::vector<double> squared_diffs(static_cast<std::size_t>(replications));
        parallel_for_index(replications, threads, [&](int j) {
            const auto stream = static_cast<std::uint64_t>(ni) * replications +
                                static_cast<std::uint64_t>(j);
            const Field field = sample_field(law, region.dim, n, replication_seed(seed, stream));
            NeumaierSum gamma_sum;
            for (std::int64_t flat : gamma)
                gamma_sum.add(field.values[static_cast<std::size_t>(flat)]);
            const double diff = partial_sum(field, region) - gamma_sum.value();
            squared_diffs[static_cast<std::size_t>(j)] = diff * diff;
        });
        const double scale = std::sqrt(static_cast<double>(lattice_size(region.dim, n)));
        const double mean_sq = sample_mean(squared_diffs);
        const double se_sq = std::sqrt(sample_variance(squared_diffs) /
                                       static_cast<double>(replications));
        Lemma2Row row;
        row.side = n;
        row.mc_estimate = std::sqrt(mean_sq) / scale;
        row.mc_se = mean_sq > 0.0 ? se_sq / (2.0 * std::sqrt(mean_sq)) / scale : 0.0;
        row.oracle = lemma2_oracle(region, n, *m2);
        result.rows.push_back(row);
        if (std::abs(row.mc_estimate - row.oracle) > 3.0 * row.mc_se) oracle_agreement = false;
    }
    const Lemma2Row& first = result.rows.front();
    const Lemma2Row& last = result.rows.back();
    const bool decreases = last.mc_estimate <= first.mc_estimate + 3.0 * (first.mc_se + last.mc_se);
    const bool small_final = last.mc_estimate < tolerance;
    TestReport report = make_report("lemma2_l2_approximation", last.mc_estimate, last.oracle,
                                    tolerance, last.mc_se, seed, clock.seconds(),
                                    "oracle agreement at every n + overall ladder decrease");
    report.verdict =
        (oracle_agreement && decreases && small_final) ? Verdict::pass : Verdict::fail;
    result.report = report;
    return result;
}

// --- counter-example / non-tightness experiment --------------------------------------

// exact P(W_r) = P(Binomial(n_r^d, q) >= k_r) with q = beta_r^{-p-1}/2
inline double wr_exact_probability(const CounterexampleParams& params) {
    return binomial_upper_tail(params.lattice_cells, params.exceed_prob, params.cell_count);
}

struct CounterexampleRow {
    int r = 0;
    std::int64_t side = 0;       // n_r
    std::int64_t threshold = 0;  // beta_r
    std::int64_t cell_count = 0; // k_r
    double radius = 0.0;         // eps_r
    double frequency = 0.0;      // f_r of {region exists and modulus >= 1/2}
    double oracle = 0.0;         // exact P(W_r)
    double se = 0.0;             // binomial SE of the oracle at R replications
    double measure = 0.0;        // lambda(A_r) = k_r / n_r^d
    Verdict verdict = Verdict::fail;
};

struct CounterexampleResult {
    TestReport report;
    std::vector<CounterexampleRow> rows;
};

// Simulate the adaptive bad sets: for each r, the frequency of the event
// {A_r(omega) exists and the modulus statistic n_r^{-d/2} S(A_r) reaches 1/2}
// must sit within 4 binomial SEs of the exact oracle, and must stay >= 0.2.
inline CounterexampleResult counterexample_experiment(int p, int d, int r_lo, int r_hi,
                                                      int replications, std::uint64_t seed,
                                                      int threads = 1,
                                                      double resource_cap = 4e9) {
    if (r_lo < 1 || r_hi < r_lo) throw std::invalid_argument("counterexample r-range invalid");
    if (replications < 1) throw std::invalid_argument("counterexample needs replications >= 1");
    double load = 0.0;
    for (int r = r_lo; r <= r_hi; ++r)
        load += static_cast<double>(counterexample_params(p, d, r).lattice_cells) * replications;
    if (load > resource_cap)
        throw std::invalid_argument("counterexample load " + std::to_string(load) +
                                    " exceeds resource cap " + std::to_string(resource_cap));
    Stopwatch clock;
    CounterexampleResult result;
    const Law law = laws::counterexample_integer(p);
    bool all_rows_pass = true;
    double min_frequency = 1.0;
    for (int r = r_lo; r <= r_hi; ++r) {
        const CounterexampleParams params = counterexample_params(p, d, r);
        const Region empty_region = regions::empty(d);
        std::vector<char> hits(static_cast<std::size_t>(replications), 0);
        parallel_for_index(replications, threads, [&](int j) {
            const auto stream = static_cast<std::uint64_t>(r - r_lo) * replications +
                                static_cast<std::uint64_t>(j);
            const Field field = sample_iid_field(law, d, params.side,
                                                 replication_seed(seed, stream));
            const auto bad_set = adaptive_region(field, params);
            if (!bad_set) return;
            const Region classe[2] = {empty_region, *bad_set};
            const double scale = std::sqrt(static_cast<double>(params.lattice_cells));
            const double values[2] = {0.0, partial_sum(field, *bad_set) / scale};
            const double sup = modulus(classe, values, 2.0 * params.radius);
            hits[static_cast<std::size_t>(j)] = sup >= 0.5 ? 1 : 0;
        });
        int count = 0;
        for (char h : hits) count += h;
        CounterexampleRow row;
        row.r = r;
        row.side = params.side;
        row.threshold = params.threshold;
        row.cell_count = params.cell_count;
        row.radius = params.radius;
        row.frequency = static_cast<double>(count) / replications;
        row.oracle = wr_exact_probability(params);
        row.se = std::sqrt(row.oracle * (1.0 - row.oracle) / replications);
        row.measure = static_cast<double>(params.cell_count) /
                      static_cast<double>(params.lattice_cells);
        row.verdict = std::abs(row.frequency - row.oracle) <= 4.0 * row.se ? Verdict::pass
                                                                           : Verdict::fail;
        all_rows_pass = all_rows_pass && row.verdict == Verdict::pass;
        min_frequency = std::min(min_frequency, row.frequency);
        result.rows.push_back(row);
    }
    TestReport report;
    report.statistic = "counterexample_min_frequency";
    report.observed = min_frequency;
    report.target = 0.2;
    report.tolerance = 0.0;
    report.seed = seed;
    report.runtime_seconds = clock.seconds();
    report.note = "one-sided: min_r f_r >= 0.2 and every f_r within 4 SE of the exact oracle";
    report.verdict =
        (all_rows_pass && min_frequency >= 0.2) ? Verdict::pass : Verdict::fail;
    result.report = report;
    return result;
}

// --- lemma1: Orlicz maximal inequality, empirical constant -------------------------

struct Lemma1Config {
    std::string name;
    Law law;
    int dim = 1;
    std::vector<Region> class_one;
    std::vector<Region> class_two;
    double alpha = 0.0;
    double beta = 1.0;
    double tau = 1.0;
};

struct Lemma1Ratio {
    double k_hat = 0.0;       // empirical psi1 norm / bracket
    double psi1_norm = 0.0;
    double bracket = 0.0;
};

// empirical || max_{(A,B)} |Theta_n(A,a,b) - Theta_n(B,a,b)| ||_{psi1} divided by
// the bracket beta tau psi1^{-1}(|G|) + max rho(A,B) psi2^{-1}(|G|)
inline Lemma1Ratio lemma1_ratio(const Lemma1Config& config, std::int64_t side, int replications,
                                std::uint64_t seed, int threads = 1) {
    if (config.class_one.empty() || config.class_two.empty())
        throw std::invalid_argument("lemma1_ratio needs nonempty classes");
    const std::size_t pairs = config.class_one.size() * config.class_two.size();
    if (pairs > 64) throw std::invalid_argument("lemma1_ratio is meant for small classes (|G| <= 64)");
    switch (config.law.kind) {
        case LawKind::rademacher:
        case LawKind::gaussian:
        case LawKind::md_bounded:
            break;
        default:
            throw std::invalid_argument(
                "lemma1_ratio requires a bounded-conditional-variance law");
    }
    const double c_n = std::sqrt(static_cast<double>(lattice_size(config.dim, side)));
    const TruncationPiece piece(config.tau, c_n, config.alpha, config.beta);
    const Centering centering =
        config.law.iid() ? Centering::mean : Centering::conditional_mean;
    std::vector<double> maxima(static_cast<std::size_t>(replications));
    parallel_for_index(replications, threads, [&](int j) {
        const Field field = sample_field(config.law, config.dim, side,
                                         replication_seed(seed, static_cast<std::uint64_t>(j)));
        std::vector<double> theta_one;
        theta_one.reserve(config.class_one.size());
        for (const Region& region : config.class_one)
            theta_one.push_back(truncated_piece_process(field, region, piece, centering));
        double sup = 0.0;
        for (const Region& region : config.class_two) {
            const double theta = truncated_piece_process(field, region, piece, centering);
            for (double t1 : theta_one) sup = std::max(sup, std::abs(t1 - theta));
        }
        maxima[static_cast<std::size_t>(j)] = sup;
    });
    double max_rho = 0.0;
    for (const Region& a : config.class_one)
        for (const Region& b : config.class_two) max_rho = std::max(max_rho, rho(a, b));
    Lemma1Ratio ratio;
    ratio.psi1_norm = luxemburg_norm(maxima, Young::psi1);
    const auto cardinality = static_cast<double>(pairs);
    ratio.bracket = config.beta * config.tau * young_inverse(Young::psi1, cardinality) +
                    max_rho * young_inverse(Young::psi2, cardinality);
    ratio.k_hat = ratio.psi1_norm / ratio.bracket;
    return ratio;
}

// the pinned 12-configuration sweep: 3 admissible laws x 4 class/band/tau variants
inline std::vector<Lemma1Config> lemma1_default_sweep() {
    const std::vector<Region> pair_one = {regions::quadrant({0.25})};
    const std::vector<Region> pair_two = {regions::quadrant({0.75})};
    const std::vector<Region> grid = enumerate_quadrant_grid(1, 7);  // 8 regions, |G| = 64
    const std::vector<std::pair<std::string, Law>> field_laws = {
        {"rademacher", laws::rademacher()},
        {"gaussian", laws::gaussian(1.0)},
        {"md", laws::md_bounded(laws::rademacher(), 0.5, 1)},
    };
    std::vector<Lemma1Config> sweep;
    for (const auto& [label, law] : field_laws) {
        sweep.push_back({label + "_pair_full", law, 1, pair_one, pair_two, 0.0, 1.0, 1.0});
        sweep.push_back({label + "_pair_upper", law, 1, pair_one, pair_two, 0.5, 1.0, 1.0});
        sweep.push_back({label + "_grid_full", law, 1, grid, grid, 0.0, 1.0, 1.0});
        sweep.push_back({label + "_grid_tau_half", law, 1, grid, grid, 0.0, 1.0, 0.5});
    }
    return sweep;
}

struct Lemma1Row {
    std::string config;
    std::int64_t side = 0;
    double k_hat = 0.0;
};

struct Lemma1Result {
    TestReport report;
    std::vector<Lemma1Row> rows;
};

// K-hat across the sweep: finite, uniformly below 50, and stable (max/min < 3)
// across the n-list within every configuration
inline Lemma1Result lemma1_sweep_check(std::span<const Lemma1Config> sweep,
                                       std::span<const std::int64_t> n_list, int replications,
                                       std::uint64_t seed, int threads = 1) {
    if (sweep.empty() || n_list.empty())
        throw std::invalid_argument("lemma1_sweep_check needs configs and an n-list");
    Stopwatch clock;
    Lemma1Result result;
    bool all_finite = true;
    double max_k_hat = 0.0;
    double worst_stability = 1.0;
    for (std::size_t ci = 0; ci < sweep.size(); ++ci) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
            const std::uint64_t sub_seed = mix64(seed + kGolden * (ci * 977 + ni + 1));
            const Lemma1Ratio ratio =
                lemma1_ratio(sweep[ci], n_list[ni], replications, sub_seed, threads);
            result.rows.push_back({sweep[ci].name, n_list[ni], ratio.k_hat});
            all_finite = all_finite && std::isfinite(ratio.k_hat);
            max_k_hat = std::max(max_k_hat, ratio.k_hat);
            lo = std::min(lo, ratio.k_hat);
            hi = std::max(hi, ratio.k_hat);
        }
        if (lo > 0.0) worst_stability = std::max(worst_stability, hi / lo);
    }
    TestReport report;
    report.statistic = "lemma1_k_hat_stability";
    report.observed = worst_stability;
    report.target = 1.0;
    report.tolerance = 2.0;  // max/min < 3
    report.seed = seed;
    report.runtime_seconds = clock.seconds();
    report.note = "max K-hat = " + short_number(max_k_hat) + " (must be finite and <= 50)";
    report.verdict = (all_finite && max_k_hat <= 50.0 && worst_stability < 3.0)
                         ? Verdict::pass
                         : Verdict::fail;
    result.report = report;
    return result;
}

}  // namespace fieldsum
