#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "fieldsum/serialize.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args, const fs::path& workdir) {
    const fs::path log = workdir / "cli_output.log";
    const std::string command = std::string("\"") + FIELDSUM_CLI_PATH + "\" " + args + " > \"" +
                                log.string() + "\" 2>&1";
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    result.output = buffer.str();
    return result;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fieldsum_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) { return fieldsum::read_file_bytes(p.string()); }

}  // namespace

TEST_CASE("cli: version") {
    const fs::path dir = fresh_dir("version");
    const CliResult result = run_cli("version", dir);
    REQUIRE(result.exit_code == 0);
    REQUIRE(result.output.find("fieldsum") != std::string::npos);
}

TEST_CASE("cli: usage errors exit with status 1") {
    const fs::path dir = fresh_dir("usage");
    REQUIRE(run_cli("counterexample --no-such-flag 3", dir).exit_code == 1);
    const CliResult bad_region = run_cli(
        "fclt --regions sphere:0.5 --reps 200 --n 8 --d 1 --out \"" + (dir / "o").string() +
            "\"",
        dir);
    REQUIRE(bad_region.exit_code == 1);
    REQUIRE(bad_region.output.find("sphere") != std::string::npos);
    REQUIRE(run_cli("", dir).exit_code == 1);  // a subcommand is required
}

TEST_CASE("cli: dry run prints the resolved plan and writes nothing") {
    const fs::path dir = fresh_dir("dryrun");
    const fs::path out = dir / "out";
    const CliResult result = run_cli(
        "counterexample --p 1 --d 1 --r 2..3 --reps 50 --seed 9 --dry-run --out \"" +
            out.string() + "\"",
        dir);
    REQUIRE(result.exit_code == 0);
    REQUIRE(result.output.find("dry-run") != std::string::npos);
    REQUIRE(result.output.find("\"reps\": 50") != std::string::npos);
    REQUIRE(result.output.find("\"seed\": 9") != std::string::npos);
    REQUIRE_FALSE(fs::exists(out));
}

TEST_CASE("cli: counterexample schema, determinism and thread independence") {
    const fs::path dir = fresh_dir("counter");
    const std::string base = "counterexample --p 1 --d 1 --r 2..3 --reps 400 --seed 7";
    const fs::path out1 = dir / "run1";
    const fs::path out2 = dir / "run2";
    const fs::path out3 = dir / "run3";
    REQUIRE(run_cli(base + " --threads 1 --out \"" + out1.string() + "\"", dir).exit_code == 0);
    REQUIRE(run_cli(base + " --threads 4 --out \"" + out2.string() + "\"", dir).exit_code == 0);
    REQUIRE(run_cli(base + " --threads 4 --out \"" + out3.string() + "\"", dir).exit_code == 0);

    const std::string csv = slurp(out1 / "counterexample.csv");
    REQUIRE(csv.rfind("r,n_r,beta_r,k_r,eps_r,f_r,oracle,se,verdict,measure\n", 0) == 0);
    REQUIRE(csv == slurp(out2 / "counterexample.csv"));
    REQUIRE(csv == slurp(out3 / "counterexample.csv"));
    REQUIRE(slurp(out1 / "manifest.txt") == slurp(out2 / "manifest.txt"));
    REQUIRE(fs::exists(out1 / "summary.json"));

    // a different seed changes the artifact
    const fs::path out4 = dir / "run4";
    REQUIRE(run_cli("counterexample --p 1 --d 1 --r 2..3 --reps 400 --seed 8 --out \"" +
                        out4.string() + "\"",
                    dir)
                .exit_code == 0);
    REQUIRE(csv != slurp(out4 / "counterexample.csv"));
}

TEST_CASE("cli: fclt smoke run emits fidi and covariance tables") {
    const fs::path dir = fresh_dir("fclt");
    const fs::path out = dir / "out";
    const CliResult result = run_cli(
        "fclt --law gaussian:1 --d 2 --n 16 --regions quadrant:0.5,0.5 --regions "
        "quadrant:1,0.5 --reps 300 --seed 3 --out \"" +
            out.string() + "\"",
        dir);
    REQUIRE(result.exit_code == 0);
    const std::string fidi = slurp(out / "fidi.csv");
    REQUIRE(fidi.rfind("region,observed_ks,tolerance,verdict,seed\n", 0) == 0);
    REQUIRE(slurp(out / "covariance.csv")
                .rfind("region_a,region_b,observed,target,se,tolerance,verdict,seed\n", 0) == 0);
    const std::string manifest = slurp(out / "manifest.txt");
    REQUIRE(manifest.find("fidi.csv") != std::string::npos);
    REQUIRE(manifest.find("covariance.csv") != std::string::npos);
}

TEST_CASE("cli: selfnorm inconclusive verdict surfaces as exit 3") {
    const fs::path dir = fresh_dir("selfnorm_inconclusive");
    const fs::path out = dir / "out";
    // tiny tolerance makes the t2 median check underpowered at R=250
    const CliResult result = run_cli(
        "selfnorm --law pareto_tail:2 --d 1 --n 256 --regions quadrant:0.5 --reps 250 "
        "--t2-tol 0.0005 --seed 5 --out \"" +
            out.string() + "\"",
        dir);
    REQUIRE(result.exit_code == 3);
    REQUIRE(slurp(out / "selfnorm_t2.csv").find("inconclusive") != std::string::npos);
}

TEST_CASE("cli: failing verdict exits with status 2") {
    const fs::path dir = fresh_dir("fail");
    const fs::path out = dir / "out";
    const CliResult result = run_cli(
        "fclt --law gaussian:1 --d 1 --n 16 --regions quadrant:0.5 --reps 300 "
        "--ks-tol 1e-06 --seed 3 --out \"" +
            out.string() + "\"",
        dir);
    REQUIRE(result.exit_code == 2);
    REQUIRE(slurp(out / "fidi.csv").find("fail") != std::string::npos);
}

TEST_CASE("cli: FIELDSUM_OUT provides the default output root") {
    const fs::path dir = fresh_dir("envroot");
    const std::string command = "FIELDSUM_OUT=\"" + (dir / "root").string() + "\" ";
    const fs::path log = dir / "env.log";
    const int status = std::system(
        (command + "\"" + FIELDSUM_CLI_PATH +
         "\" counterexample --p 1 --d 1 --r 2..2 --reps 40 --seed 1 > \"" +
         log.string() + "\" 2>&1")
            .c_str());
    REQUIRE(WIFEXITED(status));
    REQUIRE(WEXITSTATUS(status) == 0);
    REQUIRE(fs::exists(dir / "root" / "counterexample" / "counterexample.csv"));
}

TEST_CASE("cli: evaluations dump carries the process-evaluation schema") {
    const fs::path dir = fresh_dir("evals");
    const fs::path out = dir / "out";
    REQUIRE(run_cli("fclt --law gaussian:1 --d 1 --n 8 --regions quadrant:0.5 --reps 200 "
                    "--dump-evals --seed 3 --out \"" +
                        out.string() + "\"",
                    dir)
                .exit_code == 0);
    const std::string evals = slurp(out / "evaluations.csv");
    REQUIRE(evals.rfind("region,raw,normalized,normalization,n,d,seed\n", 0) == 0);
    // header + one row per replication per region
    REQUIRE(std::count(evals.begin(), evals.end(), '\n') == 201);
    REQUIRE(slurp(out / "manifest.txt").find("evaluations.csv") != std::string::npos);
}

TEST_CASE("cli: the resolved plan round-trips through the config format") {
    const fs::path dir = fresh_dir("roundtrip");
    const std::string flags =
        "counterexample --p 2 --d 1 --r 3..4 --reps 123 --seed 99 --threads 2 --out X";
    const CliResult from_flags = run_cli(flags + " --dry-run", dir);
    REQUIRE(from_flags.exit_code == 0);

    const fs::path cfg = dir / "echo.ini";
    {
        std::ofstream out(cfg);
        out << "[counterexample]\np=2\nd=1\nr=3..4\nreps=123\nseed=99\nthreads=2\nout=X\n";
    }
    const CliResult from_config =
        run_cli("counterexample --config \"" + cfg.string() + "\" --dry-run", dir);
    REQUIRE(from_config.exit_code == 0);
    REQUIRE(from_config.output == from_flags.output);
}

TEST_CASE("cli: config file supplies options, flags win") {
    const fs::path dir = fresh_dir("config");
    const fs::path cfg = dir / "plan.ini";
    {
        std::ofstream out(cfg);
        out << "[counterexample]\n";
        out << "p=1\n";
        out << "d=1\n";
        out << "r=2..2\n";
        out << "reps=60\n";
        out << "seed=12\n";
    }
    const CliResult from_config = run_cli(
        "counterexample --config \"" + cfg.string() + "\" --dry-run", dir);
    REQUIRE(from_config.exit_code == 0);
    REQUIRE(from_config.output.find("\"reps\": 60") != std::string::npos);

    const CliResult overridden = run_cli(
        "counterexample --config \"" + cfg.string() + "\" --reps 77 --dry-run", dir);
    REQUIRE(overridden.exit_code == 0);
    REQUIRE(overridden.output.find("\"reps\": 77") != std::string::npos);

    {
        std::ofstream out(cfg, std::ios::app);
        out << "unknown_key=1\n";
    }
    const CliResult unknown = run_cli(
        "counterexample --config \"" + cfg.string() + "\" --dry-run", dir);
    REQUIRE(unknown.exit_code == 1);
    REQUIRE(unknown.output.find("unknown_key") != std::string::npos);
}
