// fieldsum: configuration-driven experiment runner for set-indexed partial-sum
// processes. Subcommands mirror the experiment kinds; every run writes
// summary.json, one CSV per statistic, and manifest.txt with artifact hashes.
// CSV artifacts are byte-reproducible for a fixed seed, independent of
// --threads.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fieldsum/diagnostics.hpp"
#include "fieldsum/entropy.hpp"
#include "fieldsum/serialize.hpp"
#include "fieldsum/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fieldsum;

namespace {

struct CommonOptions {
    std::string out;
    std::uint64_t seed = 20250808;
    int threads = 0;
    bool dry_run = false;
};

void add_common(CLI::App* sub, CommonOptions& common) {
    sub->fallthrough();  // lets --config (an app-level option) appear after the subcommand
    sub->add_option("--out", common.out,
                    "output directory (default: $FIELDSUM_OUT/<subcommand> or "
                    "fieldsum-out/<subcommand>)");
    sub->add_option("--seed", common.seed, "master seed")->capture_default_str();
    sub->add_option("--threads", common.threads,
                    "worker threads (default: machine parallelism; results are "
                    "independent of this)");
    sub->add_flag("--dry-run", common.dry_run,
                  "print the fully resolved plan and exit without simulating");
}

std::string resolve_out_dir(const CommonOptions& common, const std::string& kind) {
    if (!common.out.empty()) return common.out;
    const char* root = std::getenv("FIELDSUM_OUT");
    return (root != nullptr ? std::string(root) : std::string("fieldsum-out")) + "/" + kind;
}

int resolve_threads(const CommonOptions& common) {
    if (common.threads > 0) return common.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

json report_to_json(const TestReport& report) {
    json j;
    j["statistic"] = report.statistic;
    j["observed"] = report.observed;
    j["target"] = report.target;
    j["tolerance"] = report.tolerance;
    if (report.se)
        j["se"] = *report.se;
    else
        j["se"] = nullptr;
    j["verdict"] = to_string(report.verdict);
    j["seed"] = report.seed;
    if (!report.note.empty()) j["note"] = report.note;
    return j;
}

// summary.json (plan echo, verdicts, timings) + manifest.txt (hashes of the
// deterministic CSV artifacts; summary.json carries wall-clock timings and is
// deliberately outside the hash manifest)
int finish_run(const std::string& kind, const std::string& dir, const json& plan_echo,
               const std::vector<TestReport>& reports, std::vector<std::string> csv_files,
               double total_seconds) {
    json summary;
    summary["experiment"] = kind;
    summary["version"] = kVersion;
    summary["plan"] = plan_echo;
    summary["reports"] = json::array();
    json timing;
    timing["total_seconds"] = total_seconds;
    for (const auto& report : reports) {
        summary["reports"].push_back(report_to_json(report));
        timing[report.statistic + "_seconds"] = report.runtime_seconds;
    }
    std::sort(csv_files.begin(), csv_files.end());
    summary["artifacts"] = csv_files;
    summary["timing"] = timing;
    {
        std::ofstream out(dir + "/summary.json", std::ios::binary);
        out << summary.dump(2) << '\n';
    }
    {
        std::ofstream manifest(dir + "/manifest.txt", std::ios::binary);
        for (const auto& name : csv_files)
            manifest << hash_hex(fnv1a(read_file_bytes(dir + "/" + name))) << "  " << name
                     << '\n';
    }
    for (const auto& report : reports)
        std::cout << to_string(report.verdict) << "  " << report.statistic
                  << "  observed=" << format_double(report.observed)
                  << " target=" << format_double(report.target)
                  << " tolerance=" << format_double(report.tolerance) << '\n';
    bool any_fail = false;
    bool any_inconclusive = false;
    for (const auto& report : reports) {
        any_fail = any_fail || report.verdict == Verdict::fail;
        any_inconclusive = any_inconclusive || report.verdict == Verdict::inconclusive;
    }
    return any_fail ? 2 : (any_inconclusive ? 3 : 0);
}

int emit_dry_run(const json& plan_echo) {
    std::cout << plan_echo.dump(2) << '\n';
    std::cout << "dry-run: no simulation performed\n";
    return 0;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> values;
    for (const auto& part : split(text, ',')) values.push_back(parse_int(part));
    return values;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    for (const auto& part : split(text, ',')) values.push_back(parse_double(part));
    return values;
}

std::pair<int, int> parse_range(const std::string& text) {
    const auto pos = text.find("..");
    if (pos == std::string::npos)
        return {static_cast<int>(parse_int(text)), static_cast<int>(parse_int(text))};
    return {static_cast<int>(parse_int(text.substr(0, pos))),
            static_cast<int>(parse_int(text.substr(pos + 2)))};
}

// --- fclt ---------------------------------------------------------------------

struct FcltOptions {
    CommonOptions common;
    std::string law = "gaussian:1";
    int dim = 2;
    std::int64_t side = 32;
    std::vector<std::string> regions = {"quadrant:0.5,0.5"};
    int reps = 2000;
    double ks_tolerance = 0.0;  // 0 -> 1.36/sqrt(R) + 0.03
    double cov_tolerance = 0.0;
    bool dump_evals = false;
};

int run_fclt(const FcltOptions& opt) {
    const Law law = parse_law(opt.law);
    std::vector<Region> classe;
    for (const auto& text : opt.regions) classe.push_back(parse_region(text));
    json echo;
    echo["law"] = opt.law;
    echo["d"] = opt.dim;
    echo["n"] = opt.side;
    echo["regions"] = opt.regions;
    echo["reps"] = opt.reps;
    echo["ks_tolerance"] = opt.ks_tolerance;
    echo["cov_tolerance"] = opt.cov_tolerance;
    echo["dump_evals"] = opt.dump_evals;
    echo["seed"] = opt.common.seed;
    echo["threads"] = resolve_threads(opt.common);
    echo["out"] = resolve_out_dir(opt.common, "fclt");
    if (opt.common.dry_run) return emit_dry_run(echo);

    Stopwatch total;
    for (const auto& region : classe) {
        if (region.dim != opt.dim)
            throw std::invalid_argument("region dimension does not match --d");
        if (!(lebesgue(region) > 0.0))
            throw std::invalid_argument("fclt regions need positive measure");
    }
    const auto m2 = second_moment(law);
    const bool empirical = !m2.has_value();  // md fields: normalize by U_n / n^{d/2}
    ExperimentPlan plan;
    plan.law = law;
    plan.dim = opt.dim;
    plan.side = opt.side;
    plan.regions = classe;
    plan.normalization = empirical ? Normalization::self : Normalization::standard;
    plan.replications = opt.reps;
    plan.master_seed = opt.common.seed;
    plan.threads = resolve_threads(opt.common);
    const auto evals = run_replications(plan);

    const std::string dir = resolve_out_dir(opt.common, "fclt");
    fs::create_directories(dir);
    std::vector<TestReport> reports;
    std::vector<std::string> files;

    if (opt.dump_evals) {
        CsvWriter csv(dir + "/evaluations.csv");
        csv.header({"region", "raw", "normalized", "normalization", "n", "d", "seed"});
        const std::string kind = empirical ? "self" : "standard";
        for (const auto& eval : evals)
            for (std::size_t r = 0; r < classe.size(); ++r)
                csv.row({region_to_string(classe[r]), eval.raw[r], eval.normalized[r], kind,
                         eval.side, static_cast<std::int64_t>(eval.dim),
                         std::to_string(eval.seed)});
        files.push_back("evaluations.csv");
    }
    {
        CsvWriter csv(dir + "/fidi.csv");
        csv.header({"region", "observed_ks", "tolerance", "verdict", "seed"});
        for (std::size_t r = 0; r < classe.size(); ++r) {
            const double lambda = lebesgue(classe[r]);
            const double denom = empirical ? std::sqrt(lambda) : std::sqrt(*m2 * lambda);
            std::vector<double> samples;
            samples.reserve(evals.size());
            for (const auto& eval : evals)
                if (!eval.degenerate) samples.push_back(eval.normalized[r] / denom);
            TestReport report = fidi_gaussian_test(samples, 1.0, opt.ks_tolerance,
                                                   opt.common.seed);
            report.statistic = "ks_" + region_to_string(classe[r]);
            reports.push_back(report);
            csv.row({region_to_string(classe[r]), report.observed, report.tolerance,
                     std::string(to_string(report.verdict)),
                     std::to_string(report.seed)});
        }
        files.push_back("fidi.csv");
    }
    if (classe.size() >= 2) {
        CsvWriter csv(dir + "/covariance.csv");
        csv.header({"region_a", "region_b", "observed", "target", "se", "tolerance", "verdict",
                    "seed"});
        for (std::size_t i = 0; i < classe.size(); ++i) {
            for (std::size_t j = i + 1; j < classe.size(); ++j) {
                std::vector<double> xs, ys;
                for (const auto& eval : evals) {
                    if (eval.degenerate) continue;
                    const double scale = empirical ? 1.0 : std::sqrt(*m2);
                    xs.push_back(eval.normalized[i] / scale);
                    ys.push_back(eval.normalized[j] / scale);
                }
                const double target = intersection_volume(classe[i], classe[j]);
                TestReport report =
                    covariance_check(xs, ys, target, opt.cov_tolerance, opt.common.seed);
                report.statistic = "cov_" + region_to_string(classe[i]) + "_" +
                                   region_to_string(classe[j]);
                reports.push_back(report);
                csv.row({region_to_string(classe[i]), region_to_string(classe[j]),
                         report.observed, report.target, report.se.value_or(0.0),
                         report.tolerance, std::string(to_string(report.verdict)),
                         std::to_string(report.seed)});
            }
        }
        files.push_back("covariance.csv");
    }
    return finish_run("fclt", dir, echo, reports, files, total.seconds());
}

// --- selfnorm ------------------------------------------------------------------

struct SelfnormOptions {
    CommonOptions common;
    std::string law = "pareto_tail:2";
    int dim = 1;
    std::int64_t side = 4096;
    std::vector<std::string> regions = {"quadrant:0.5"};
    int reps = 2000;
    double ks_tolerance = 0.08;
    double t2_tolerance = 0.05;
    int raikov_reps = 0;
    std::int64_t raikov_side = 100000;
    double raikov_lo = 0.8;
    double raikov_hi = 1.25;
};

int run_selfnorm(const SelfnormOptions& opt) {
    const Law law = parse_law(opt.law);
    std::vector<Region> classe;
    for (const auto& text : opt.regions) classe.push_back(parse_region(text));
    json echo;
    echo["law"] = opt.law;
    echo["d"] = opt.dim;
    echo["n"] = opt.side;
    echo["regions"] = opt.regions;
    echo["reps"] = opt.reps;
    echo["ks_tolerance"] = opt.ks_tolerance;
    echo["t2_tolerance"] = opt.t2_tolerance;
    echo["raikov_reps"] = opt.raikov_reps;
    echo["raikov_n"] = opt.raikov_side;
    echo["raikov_band"] = {opt.raikov_lo, opt.raikov_hi};
    echo["seed"] = opt.common.seed;
    echo["threads"] = resolve_threads(opt.common);
    echo["out"] = resolve_out_dir(opt.common, "selfnorm");
    if (opt.common.dry_run) return emit_dry_run(echo);

    Stopwatch total;
    if (!law.iid()) throw std::invalid_argument("selfnorm requires an i.i.d. law");
    const int threads = resolve_threads(opt.common);
    const std::string dir = resolve_out_dir(opt.common, "selfnorm");
    fs::create_directories(dir);
    std::vector<TestReport> reports;
    std::vector<std::string> files;

    std::vector<std::vector<double>> ks_samples(classe.size());
    std::vector<std::vector<double>> t2_samples(classe.size());
    for (auto& v : ks_samples) v.assign(static_cast<std::size_t>(opt.reps), 0.0);
    for (auto& v : t2_samples) v.assign(static_cast<std::size_t>(opt.reps), 0.0);
    parallel_for_index(opt.reps, threads, [&](int j) {
        const Field field = sample_iid_field(law, opt.dim, opt.side,
                                             replication_seed(opt.common.seed,
                                                              static_cast<std::uint64_t>(j)));
        const double u = self_normalizer(field);
        for (std::size_t r = 0; r < classe.size(); ++r) {
            const double lambda = lebesgue(classe[r]);
            ks_samples[r][static_cast<std::size_t>(j)] =
                partial_sum(field, classe[r]) / (u * std::sqrt(lambda));
            t2_samples[r][static_cast<std::size_t>(j)] =
                t_statistics(field, classe[r]).t2_squared;
        }
    });
    {
        CsvWriter ks_csv(dir + "/selfnorm_ks.csv");
        ks_csv.header({"region", "observed_ks", "tolerance", "verdict", "seed"});
        CsvWriter t2_csv(dir + "/selfnorm_t2.csv");
        t2_csv.header({"region", "median_t2_squared", "target", "tolerance", "se", "verdict",
                       "seed"});
        for (std::size_t r = 0; r < classe.size(); ++r) {
            TestReport ks = fidi_gaussian_test(ks_samples[r], 1.0, opt.ks_tolerance,
                                               opt.common.seed);
            ks.statistic = "selfnorm_ks_" + region_to_string(classe[r]);
            reports.push_back(ks);
            ks_csv.row({region_to_string(classe[r]), ks.observed, ks.tolerance,
                        std::string(to_string(ks.verdict)),
                        std::to_string(ks.seed)});

            const double lambda = lebesgue(classe[r]);
            TestReport t2 = make_report(
                "t2_median_" + region_to_string(classe[r]), sample_median(t2_samples[r]),
                lambda, opt.t2_tolerance, median_standard_error(t2_samples[r]),
                opt.common.seed, 0.0);
            reports.push_back(t2);
            t2_csv.row({region_to_string(classe[r]), t2.observed, t2.target, t2.tolerance,
                        t2.se.value_or(0.0), std::string(to_string(t2.verdict)),
                        std::to_string(t2.seed)});
        }
        files.push_back("selfnorm_ks.csv");
        files.push_back("selfnorm_t2.csv");
    }
    if (opt.raikov_reps > 0) {
        const RaikovResult raikov =
            raikov_check(law, opt.dim, opt.raikov_side, opt.raikov_reps,
                         mix64(opt.common.seed + kGolden), opt.raikov_lo, opt.raikov_hi,
                         threads);
        TestReport report = raikov.report;
        report.statistic = "raikov_" + opt.law;
        reports.push_back(report);
        CsvWriter csv(dir + "/raikov.csv");
        csv.header({"law", "n", "d", "median_ratio", "band_lo", "band_hi", "outlier_freq",
                    "norming_squared", "verdict", "seed"});
        csv.row({opt.law, opt.raikov_side, static_cast<std::int64_t>(opt.dim),
                 raikov.median_ratio, opt.raikov_lo, opt.raikov_hi, raikov.outlier_frequency,
                 raikov.norming_squared, std::string(to_string(report.verdict)),
                 std::to_string(report.seed)});
        files.push_back("raikov.csv");
    }
    return finish_run("selfnorm", dir, echo, reports, files, total.seconds());
}

// --- counterexample --------------------------------------------------------------

struct CounterexampleOptions {
    CommonOptions common;
    int p = 1;
    int dim = 1;
    std::string r_range = "2..5";
    int reps = 4000;
};

int run_counterexample(const CounterexampleOptions& opt) {
    json echo;
    echo["p"] = opt.p;
    echo["d"] = opt.dim;
    echo["r"] = opt.r_range;
    echo["reps"] = opt.reps;
    echo["seed"] = opt.common.seed;
    echo["threads"] = resolve_threads(opt.common);
    echo["out"] = resolve_out_dir(opt.common, "counterexample");
    if (opt.common.dry_run) return emit_dry_run(echo);

    Stopwatch total;
    const auto [r_lo, r_hi] = parse_range(opt.r_range);
    const CounterexampleResult result =
        counterexample_experiment(opt.p, opt.dim, r_lo, r_hi, opt.reps, opt.common.seed,
                                  resolve_threads(opt.common));
    const std::string dir = resolve_out_dir(opt.common, "counterexample");
    fs::create_directories(dir);
    CsvWriter csv(dir + "/counterexample.csv");
    csv.header({"r", "n_r", "beta_r", "k_r", "eps_r", "f_r", "oracle", "se", "verdict",
                "measure"});
    for (const auto& row : result.rows)
        csv.row({static_cast<std::int64_t>(row.r), row.side, row.threshold, row.cell_count,
                 row.radius, row.frequency, row.oracle, row.se,
                 std::string(to_string(row.verdict)), row.measure});
    return finish_run("counterexample", dir, echo, {result.report}, {"counterexample.csv"},
                      total.seconds());
}

// --- entropy ----------------------------------------------------------------------

struct EntropyOptions {
    CommonOptions common;
    int p = 1;
    int dim = 1;
    int r_max = 40;
    std::int64_t grid_m = 64;
    std::string eps = "0.5,0.25,0.125";
    int bounds_r_max = 30;
    double increment_tolerance = 1e-3;
    int increment_from = 20;
};

int run_entropy(const EntropyOptions& opt) {
    json echo;
    echo["p"] = opt.p;
    echo["d"] = opt.dim;
    echo["R"] = opt.r_max;
    echo["grid_m"] = opt.grid_m;
    echo["eps"] = opt.eps;
    echo["bounds_r_max"] = opt.bounds_r_max;
    echo["increment_tolerance"] = opt.increment_tolerance;
    echo["increment_from"] = opt.increment_from;
    echo["seed"] = opt.common.seed;
    echo["threads"] = resolve_threads(opt.common);
    echo["out"] = resolve_out_dir(opt.common, "entropy");
    if (opt.common.dry_run) return emit_dry_run(echo);

    Stopwatch total;
    const std::string dir = resolve_out_dir(opt.common, "entropy");
    fs::create_directories(dir);
    std::vector<TestReport> reports;
    std::vector<std::string> files;

    const CounterexampleSeries series = counterexample_series(opt.p, opt.dim, opt.r_max);
    {
        CsvWriter csv(dir + "/entropy_series.csv");
        csv.header({"r", "term", "partial_sum", "majorant"});
        for (std::size_t i = 0; i < series.terms.size(); ++i)
            csv.row({static_cast<std::int64_t>(series.r[i]), series.terms[i],
                     series.partial_sums[i], series.majorant_terms[i]});
        files.push_back("entropy_series.csv");
        double worst_late_term = 0.0;
        for (std::size_t i = 0; i < series.terms.size(); ++i)
            if (series.r[i] >= opt.increment_from)
                worst_late_term = std::max(worst_late_term, series.terms[i]);
        reports.push_back(make_report("series_increments", worst_late_term, 0.0,
                                      opt.increment_tolerance, std::nullopt, opt.common.seed,
                                      0.0,
                                      "max increment for r >= " +
                                          std::to_string(opt.increment_from)));
    }
    {
        CsvWriter csv(dir + "/entropy_bounds.csv");
        csv.header({"r", "simplified", "exact_log_count", "dominates"});
        bool all_dominate = true;
        for (int r = 1; r <= opt.bounds_r_max; ++r) {
            const auto bound = counterexample_entropy_bound(opt.p, opt.dim, r);
            const bool dominates = bound.simplified >= bound.exact_log_count;
            all_dominate = all_dominate && dominates;
            csv.row({static_cast<std::int64_t>(r), bound.simplified, bound.exact_log_count,
                     std::string(dominates ? "yes" : "no")});
        }
        files.push_back("entropy_bounds.csv");
        TestReport report;
        report.statistic = "bounds_domination";
        report.observed = all_dominate ? 1.0 : 0.0;
        report.target = 1.0;
        report.tolerance = 0.0;
        report.seed = opt.common.seed;
        report.verdict = all_dominate ? Verdict::pass : Verdict::fail;
        report.note = "3 d k_r ln n_r >= log(1 + 2 r n_r^{d k_r}) for r <= " +
                      std::to_string(opt.bounds_r_max);
        reports.push_back(report);
    }
    {
        const auto grid = enumerate_quadrant_grid(1, opt.grid_m);
        const EntropyProfile profile = greedy_profile(grid, parse_double_list(opt.eps));
        CsvWriter csv(dir + "/entropy_profile.csv");
        csv.header({"eps", "logN", "source"});
        for (std::size_t i = 0; i < profile.eps.size(); ++i)
            csv.row({profile.eps[i], profile.log_n[i], std::string("greedy_empirical")});
        files.push_back("entropy_profile.csv");
        const EntropyIntegral integral = entropy_integral(profile);
        TestReport report;
        report.statistic = "profile_entropy_integral";
        report.observed = integral.value;
        report.target = integral.value;
        report.tolerance = 0.0;
        report.seed = opt.common.seed;
        report.verdict = std::isfinite(integral.value) ? Verdict::pass : Verdict::fail;
        report.note = "partial integral on [" + format_double(integral.eps_min) +
                      ",1]; finite-R truncation of the class union";
        reports.push_back(report);
    }
    return finish_run("entropy", dir, echo, reports, files, total.seconds());
}

// --- orlicz ------------------------------------------------------------------------

struct OrliczOptions {
    CommonOptions common;
    std::string law = "gaussian:1";
    int reps = 2000;
    double constant = 0.0;  // > 0: constant-sample mode with exact targets
};

int run_orlicz(const OrliczOptions& opt) {
    json echo;
    echo["law"] = opt.law;
    echo["reps"] = opt.reps;
    echo["constant"] = opt.constant;
    echo["seed"] = opt.common.seed;
    echo["threads"] = resolve_threads(opt.common);
    echo["out"] = resolve_out_dir(opt.common, "orlicz");
    if (opt.common.dry_run) return emit_dry_run(echo);

    Stopwatch total;
    const std::string dir = resolve_out_dir(opt.common, "orlicz");
    fs::create_directories(dir);
    std::vector<TestReport> reports;
    CsvWriter csv(dir + "/orlicz.csv");
    csv.header({"psi", "mode", "samples", "norm", "target", "verdict", "seed"});

    if (opt.constant > 0.0) {
        const std::vector<double> samples(static_cast<std::size_t>(opt.reps), opt.constant);
        const double targets[2] = {opt.constant / std::log(2.0),
                                   opt.constant / std::sqrt(std::log(2.0))};
        const char* names[2] = {"psi1", "psi2"};
        const Young psis[2] = {Young::psi1, Young::psi2};
        for (int i = 0; i < 2; ++i) {
            const double norm = luxemburg_norm(samples, psis[i]);
            TestReport report =
                make_report(std::string("orlicz_constant_") + names[i], norm, targets[i],
                            1e-3 * targets[i], std::nullopt, opt.common.seed, 0.0);
            reports.push_back(report);
            csv.row({std::string(names[i]), std::string("constant"),
                     static_cast<std::int64_t>(opt.reps), norm, targets[i],
                     std::string(to_string(report.verdict)),
                     std::to_string(opt.common.seed)});
        }
    } else {
        const Law law = parse_law(opt.law);
        std::vector<double> samples(static_cast<std::size_t>(opt.reps));
        for (int j = 0; j < opt.reps; ++j) {
            CounterRng rng(opt.common.seed, static_cast<std::uint64_t>(j));
            samples[static_cast<std::size_t>(j)] = std::abs(draw(law, rng));
        }
        const char* names[2] = {"psi1", "psi2"};
        const Young psis[2] = {Young::psi1, Young::psi2};
        for (int i = 0; i < 2; ++i) {
            const double norm = luxemburg_norm(samples, psis[i]);
            // homogeneity is the checkable exact property in law mode
            std::vector<double> scaled = samples;
            for (auto& z : scaled) z *= 2.0;
            const double doubled = luxemburg_norm(scaled, psis[i]);
            TestReport report =
                make_report(std::string("orlicz_homogeneity_") + names[i], doubled,
                            2.0 * norm, 1e-6 * std::max(1.0, 2.0 * norm), std::nullopt,
                            opt.common.seed, 0.0);
            reports.push_back(report);
            csv.row({std::string(names[i]), std::string("law"),
                     static_cast<std::int64_t>(opt.reps), norm, 0.0,
                     std::string(to_string(report.verdict)),
                     std::to_string(opt.common.seed)});
        }
    }
    return finish_run("orlicz", dir, echo, reports, {"orlicz.csv"}, total.seconds());
}

// --- lemma2 ------------------------------------------------------------------------

struct Lemma2Options {
    CommonOptions common;
    std::string law = "gaussian:1";
    std::string region = "quadrant:0.7,0.7";
    std::string ladder = "8,16,32,64";
    int reps = 2000;
    double tolerance = 0.35;
};

int run_lemma2(const Lemma2Options& opt) {
    json echo;
    echo["law"] = opt.law;
    echo["region"] = opt.region;
    echo["ladder"] = opt.ladder;
    echo["reps"] = opt.reps;
    echo["tolerance"] = opt.tolerance;
    echo["seed"] = opt.common.seed;
    echo["threads"] = resolve_threads(opt.common);
    echo["out"] = resolve_out_dir(opt.common, "lemma2");
    if (opt.common.dry_run) return emit_dry_run(echo);

    Stopwatch total;
    const Lemma2Result result =
        lemma2_check(parse_law(opt.law), parse_region(opt.region), parse_int_list(opt.ladder),
                     opt.reps, opt.common.seed, opt.tolerance, resolve_threads(opt.common));
    const std::string dir = resolve_out_dir(opt.common, "lemma2");
    fs::create_directories(dir);
    CsvWriter csv(dir + "/lemma2.csv");
    csv.header({"n", "mc_estimate", "mc_se", "oracle"});
    for (const auto& row : result.rows)
        csv.row({row.side, row.mc_estimate, row.mc_se, row.oracle});
    return finish_run("lemma2", dir, echo, {result.report}, {"lemma2.csv"}, total.seconds());
}

// --- lemma1 ------------------------------------------------------------------------

struct Lemma1Options {
    CommonOptions common;
    std::string n_list = "16,32,64";
    int reps = 400;
};

int run_lemma1(const Lemma1Options& opt) {
    json echo;
    echo["n_list"] = opt.n_list;
    echo["reps"] = opt.reps;
    echo["configs"] = 12;
    echo["seed"] = opt.common.seed;
    echo["threads"] = resolve_threads(opt.common);
    echo["out"] = resolve_out_dir(opt.common, "lemma1");
    if (opt.common.dry_run) return emit_dry_run(echo);

    Stopwatch total;
    const auto sweep = lemma1_default_sweep();
    const Lemma1Result result =
        lemma1_sweep_check(sweep, parse_int_list(opt.n_list), opt.reps, opt.common.seed,
                           resolve_threads(opt.common));
    const std::string dir = resolve_out_dir(opt.common, "lemma1");
    fs::create_directories(dir);
    CsvWriter csv(dir + "/lemma1.csv");
    csv.header({"config", "n", "k_hat"});
    for (const auto& row : result.rows) csv.row({row.config, row.side, row.k_hat});
    return finish_run("lemma1", dir, echo, {result.report}, {"lemma1.csv"}, total.seconds());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fieldsum: simulation laboratory for set-indexed partial-sum processes"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key/value config file; [section] per subcommand; "
                                   "command-line flags win");
    app.allow_config_extras(false);

    FcltOptions fclt;
    CLI::App* fclt_cmd = app.add_subcommand(
        "fclt", "fidi Gaussian + covariance checks for the standard-normalized process");
    add_common(fclt_cmd, fclt.common);
    fclt_cmd->add_option("--law", fclt.law)->capture_default_str();
    fclt_cmd->add_option("--d", fclt.dim)->capture_default_str();
    fclt_cmd->add_option("--n", fclt.side)->capture_default_str();
    fclt_cmd->add_option("--regions", fclt.regions, "region grammar, repeatable")
        ->capture_default_str();
    fclt_cmd->add_option("--reps", fclt.reps)->capture_default_str();
    fclt_cmd->add_option("--ks-tol", fclt.ks_tolerance,
                         "KS tolerance (0: 1.36/sqrt(R) + 0.03)")
        ->capture_default_str();
    fclt_cmd->add_option("--cov-tol", fclt.cov_tolerance,
                         "extra covariance tolerance on top of 3 SE")
        ->capture_default_str();
    fclt_cmd->add_flag("--dump-evals", fclt.dump_evals,
                       "write per-replication process evaluations to evaluations.csv");

    SelfnormOptions selfnorm;
    CLI::App* selfnorm_cmd = app.add_subcommand(
        "selfnorm", "self-normalized fidi checks, T-statistics and the Raikov ratio");
    add_common(selfnorm_cmd, selfnorm.common);
    selfnorm_cmd->add_option("--law", selfnorm.law)->capture_default_str();
    selfnorm_cmd->add_option("--d", selfnorm.dim)->capture_default_str();
    selfnorm_cmd->add_option("--n", selfnorm.side)->capture_default_str();
    selfnorm_cmd->add_option("--regions", selfnorm.regions)->capture_default_str();
    selfnorm_cmd->add_option("--reps", selfnorm.reps)->capture_default_str();
    selfnorm_cmd->add_option("--ks-tol", selfnorm.ks_tolerance)->capture_default_str();
    selfnorm_cmd->add_option("--t2-tol", selfnorm.t2_tolerance)->capture_default_str();
    selfnorm_cmd->add_option("--raikov-reps", selfnorm.raikov_reps,
                             "replications for the U_n^2/b_n^2 check (0: skip)")
        ->capture_default_str();
    selfnorm_cmd->add_option("--raikov-n", selfnorm.raikov_side)->capture_default_str();
    selfnorm_cmd->add_option("--raikov-lo", selfnorm.raikov_lo)->capture_default_str();
    selfnorm_cmd->add_option("--raikov-hi", selfnorm.raikov_hi)->capture_default_str();

    CounterexampleOptions counterexample;
    CLI::App* counter_cmd = app.add_subcommand(
        "counterexample", "non-tightness experiment with the exact binomial oracle");
    add_common(counter_cmd, counterexample.common);
    counter_cmd->add_option("--p", counterexample.p)->capture_default_str();
    counter_cmd->add_option("--d", counterexample.dim)->capture_default_str();
    counter_cmd->add_option("--r", counterexample.r_range, "stage range, e.g. 2..5")
        ->capture_default_str();
    counter_cmd->add_option("--reps", counterexample.reps)->capture_default_str();

    EntropyOptions entropy;
    CLI::App* entropy_cmd = app.add_subcommand(
        "entropy", "entropy series, bounds and greedy covering profiles");
    add_common(entropy_cmd, entropy.common);
    entropy_cmd->add_option("--p", entropy.p)->capture_default_str();
    entropy_cmd->add_option("--d", entropy.dim)->capture_default_str();
    entropy_cmd->add_option("--R", entropy.r_max)->capture_default_str();
    entropy_cmd->add_option("--grid-m", entropy.grid_m)->capture_default_str();
    entropy_cmd->add_option("--eps", entropy.eps)->capture_default_str();
    entropy_cmd->add_option("--bounds-r-max", entropy.bounds_r_max)->capture_default_str();
    entropy_cmd->add_option("--increment-tol", entropy.increment_tolerance)
        ->capture_default_str();
    entropy_cmd->add_option("--increment-from", entropy.increment_from)->capture_default_str();

    OrliczOptions orlicz;
    CLI::App* orlicz_cmd =
        app.add_subcommand("orlicz", "Luxemburg norm estimator checks");
    add_common(orlicz_cmd, orlicz.common);
    orlicz_cmd->add_option("--law", orlicz.law)->capture_default_str();
    orlicz_cmd->add_option("--reps", orlicz.reps)->capture_default_str();
    orlicz_cmd->add_option("--constant", orlicz.constant,
                           "constant-sample mode with exact targets (0: law mode)")
        ->capture_default_str();

    Lemma2Options lemma2;
    CLI::App* lemma2_cmd = app.add_subcommand(
        "lemma2", "L2 approximation of S_n(A) by the Gamma_n(A) sum along an n-ladder");
    add_common(lemma2_cmd, lemma2.common);
    lemma2_cmd->add_option("--law", lemma2.law)->capture_default_str();
    lemma2_cmd->add_option("--region", lemma2.region)->capture_default_str();
    lemma2_cmd->add_option("--ladder", lemma2.ladder)->capture_default_str();
    lemma2_cmd->add_option("--reps", lemma2.reps)->capture_default_str();
    lemma2_cmd->add_option("--tol", lemma2.tolerance)->capture_default_str();

    Lemma1Options lemma1;
    CLI::App* lemma1_cmd = app.add_subcommand(
        "lemma1", "Orlicz maximal-inequality constant over the 12-configuration sweep");
    add_common(lemma1_cmd, lemma1.common);
    lemma1_cmd->add_option("--n-list", lemma1.n_list)->capture_default_str();
    lemma1_cmd->add_option("--reps", lemma1.reps)->capture_default_str();

    CLI::App* version_cmd = app.add_subcommand("version", "print version and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    }

    try {
        if (*version_cmd) {
            std::cout << "fieldsum " << kVersion << '\n';
            return 0;
        }
        if (*fclt_cmd) return run_fclt(fclt);
        if (*selfnorm_cmd) return run_selfnorm(selfnorm);
        if (*counter_cmd) return run_counterexample(counterexample);
        if (*entropy_cmd) return run_entropy(entropy);
        if (*orlicz_cmd) return run_orlicz(orlicz);
        if (*lemma2_cmd) return run_lemma2(lemma2);
        if (*lemma1_cmd) return run_lemma1(lemma1);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::cerr << "error: no subcommand selected\n";
    return 1;
}
