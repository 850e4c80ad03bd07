#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// Path to the command-line binary, injected by the build.
#ifndef COBRO_BIN
#error "COBRO_BIN must be defined"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

const fs::path kWork = fs::temp_directory_path() / "cobro_cli_test";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Run the binary through the shell, capturing exit code and stdout.
RunResult run(const std::string& args, const std::string& env_prefix = "") {
    fs::create_directories(kWork);
    const fs::path out_file = kWork / "stdout.txt";
    const std::string cmd = env_prefix + std::string(COBRO_BIN) + " " + args + " > " +
                            out_file.string() + " 2> " + (kWork / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_file);
    return r;
}

fs::path write_config(const std::string& name, const std::string& body) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream(p) << body;
    return p;
}

// Small-grid config: fast builds, same three-state chain as the defaults.
std::string small_grid_config(double sigma1 = 0.2, const std::string& alpha = "[0.3, 0.6, 0.9]") {
    std::ostringstream ss;
    ss << "{\n"
       << "  \"market\": { \"r\": 0.05, \"s0_1\": 100.0, \"s0_2\": 120.0, \"sigma1\": "
       << sigma1 << ", \"sigma2\": 0.3 },\n"
       << "  \"regime\": { \"alpha\": " << alpha << " },\n"
       << "  \"fourier\": { \"n1\": 128, \"n\": 128 },\n"
       << "  \"calibration_fourier\": { \"n1\": 128, \"n\": 128 },\n"
       << "  \"paths\": 20000\n"
       << "}\n";
    return ss.str();
}

double price_from(const std::string& stdout_text) {
    double v = 0.0;
    REQUIRE(std::sscanf(stdout_text.c_str(), "price %lf", &v) == 1);
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows.push_back(split_csv_line(line));
    }
    return rows;
}

// CSV text with the wall-clock column blanked, for determinism comparisons.
std::string strip_column(const fs::path& p, size_t col) {
    std::ostringstream ss;
    for (const auto& row : read_csv(p)) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) ss << ',';
            ss << (i == col ? "-" : row[i]);
        }
        ss << '\n';
    }
    return ss.str();
}

} // namespace

TEST_CASE("usage and configuration errors exit with code 2") {
    CHECK(run("").code == 2);                       // missing subcommand
    CHECK(run("frobnicate").code == 2);             // unknown subcommand
    CHECK(run("price --no-such-flag").code == 2);   // unknown flag
    CHECK(run("price --style frisbee").code == 2);  // unknown style
    CHECK(run("price --style call_on_max --method newton").code == 2);
    CHECK(run("price --style call_on_max --method constant:abc").code == 2);
    CHECK(run("simulate --reps 50").code == 2);     // too few replications
    CHECK(run("experiment nope").code == 2);        // unknown experiment
    CHECK(run("--config /no/such/file.json price").code == 2);

    const fs::path bad = write_config("bad_key.cfg", "{ \"bogus_key\": 1 }\n");
    CHECK(run("price --config " + bad.string()).code == 2);

    const fs::path bad2 = write_config("bad_type.cfg", "{ \"seed\": \"yes\" }\n");
    CHECK(run("price --config " + bad2.string()).code == 2);
}

TEST_CASE("unattainable implied correlation exits with code 3") {
    const fs::path cfg = write_config("small.cfg", small_grid_config());
    // A put on the max struck at zero has price zero; no constant correlation
    // can reproduce it.
    const RunResult r =
        run("implied-corr --config " + cfg.string() + " --style put_on_max --strike 0");
    CHECK(r.code == 3);
}

TEST_CASE("degenerate chain equals the constant pricer through the CLI") {
    const fs::path flat =
        write_config("flat.cfg", small_grid_config(0.2, "[0.6, 0.6, 0.6]"));
    const RunResult dyn = run("price --config " + flat.string() +
                              " --style call_on_max --strike 90 --method fourier");
    const RunResult con = run("price --config " + flat.string() +
                              " --style call_on_max --strike 90 --method constant:0.2");
    CHECK(dyn.code == 0);
    CHECK(con.code == 0);
    CHECK(std::abs(price_from(dyn.out) - price_from(con.out)) < 2e-8);
}

TEST_CASE("config overrides change the result") {
    const fs::path a = write_config("mkt_a.cfg", small_grid_config(0.2));
    const fs::path b = write_config("mkt_b.cfg", small_grid_config(0.25));
    const RunResult pa =
        run("price --config " + a.string() + " --style call_on_max --strike 100");
    const RunResult pb =
        run("price --config " + b.string() + " --style call_on_max --strike 100");
    CHECK(pa.code == 0);
    CHECK(pb.code == 0);
    CHECK(std::abs(price_from(pa.out) - price_from(pb.out)) > 0.01);
}

TEST_CASE("Monte Carlo output is reproducible and thread-count independent") {
    const fs::path cfg = write_config("small.cfg", small_grid_config());
    const std::string cmd = "price --config " + cfg.string() +
                            " --style call_on_max --strike 90 --method mc --seed 7";

    const RunResult one = run(cmd, "COBRO_THREADS=1 ");
    const RunResult two = run(cmd, "COBRO_THREADS=1 ");
    const RunResult three = run(cmd, "COBRO_THREADS=3 ");
    CHECK(one.code == 0);
    CHECK(one.out == two.out);  // same seed, same bytes
    CHECK(one.out == three.out); // deterministic reduction across threads

    const RunResult other = run("price --config " + cfg.string() +
                                " --style call_on_max --strike 90 --method mc --seed 8");
    CHECK(other.code == 0);
    CHECK(other.out != one.out);
}

TEST_CASE("simulate writes a deterministic benchmark CSV with exact draw counts") {
    const fs::path out1 = kWork / "sim1";
    const fs::path out2 = kWork / "sim2";
    fs::remove_all(out1);
    fs::remove_all(out2);

    // 100 steps on the default benchmark grid.
    const RunResult cd1 = run("simulate --scheme cd --reps 500 --out " + out1.string(),
                              "COBRO_THREADS=1 ");
    const RunResult cd2 = run("simulate --scheme cd --reps 500 --out " + out2.string(),
                              "COBRO_THREADS=3 ");
    CHECK(cd1.code == 0);
    CHECK(cd2.code == 0);

    const auto rows = read_csv(out1 / "simulate_cd.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"scheme", "mean", "stderr", "rng_draws",
                                              "wall_ms"});
    // Endpoint sampling: n uniforms + 2 normals per replication.
    CHECK(rows[1][3] == "51000");

    // Same bytes up to the wall-clock column, regardless of thread count.
    CHECK(strip_column(out1 / "simulate_cd.csv", 4) ==
          strip_column(out2 / "simulate_cd.csv", 4));

    const RunResult eu = run("simulate --scheme euler --reps 500 --out " + out1.string());
    CHECK(eu.code == 0);
    const auto erows = read_csv(out1 / "simulate_euler.csv");
    REQUIRE(erows.size() == 2);
    // Euler: n uniforms + 2n normals per replication.
    CHECK(erows[1][3] == "150000");
}

TEST_CASE("calibrate recovers the constant correlation of a degenerate chain") {
    // alpha = 0.65 everywhere makes the model a constant-correlation one at
    // rho = 0.3; quotes and objective share the grid, so the fit must land
    // on 0.3 within the stopping band.  The call on the max is the one style
    // whose quotes stay far from zero at every strike of the quote ladder,
    // so the coarse test grid cannot ring any of them negative.
    const fs::path flat =
        write_config("flat65.cfg", small_grid_config(0.2, "[0.65, 0.65, 0.65]"));
    const RunResult r = run("calibrate --config " + flat.string() + " --style call_on_max");
    CHECK(r.code == 0);
    double rho = 0.0;
    int iters = 0;
    REQUIRE(std::sscanf(r.out.c_str(), "rho_star %lf iterations %d", &rho, &iters) == 2);
    CHECK(std::abs(rho - 0.3) < 1e-3);
    CHECK(iters >= 1);
}

TEST_CASE("history-window experiment: ergodic row reprices within one percent") {
    const fs::path out = kWork / "t4";
    fs::remove_all(out);
    const RunResult r = run("experiment table4 --out " + out.string());
    CHECK(r.code == 0);

    const auto rows = read_csv(out / "table4.csv");
    REQUIRE(rows.size() == 6); // header + five clock-loading sets
    CHECK(rows[0].back() == "relative_error");

    // Final row is the flat set (0.6, 0.6, 0.6): its true price is the
    // constant-correlation one, so only estimator noise from the simulated
    // history separates the two columns.
    const auto& last = rows.back();
    CHECK(std::stod(last[0]) == 0.6);
    const double rel = std::stod(last.back());
    CHECK(std::abs(rel) < 0.01);
}
