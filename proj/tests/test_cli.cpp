// End-to-end checks of the command-line tool: spawns the real binary and
// inspects exit codes and outputs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "sicreg/csv.hpp"
#include "sicreg/model_file.hpp"
#include "sicreg/rng.hpp"

using namespace sicreg;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "sicreg_cli_test";

int run(const std::string& args, const std::string& stdout_file = "") {
    std::ostringstream cmd;
    cmd << '"' << SICREG_CLI_PATH << "\" " << args;
    if (!stdout_file.empty())
        cmd << " > " << (kDir / stdout_file) << " 2>/dev/null";
    else
        cmd << " > /dev/null 2>&1";
    const int status = std::system(cmd.str().c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

long count_lines(const std::string& s) {
    long n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

// 60-row training table: x1 drives mean and variance, x2 is noise, x3 weak.
void write_training_csv(const fs::path& path) {
    Rng rng(4242);
    std::ofstream out(path);
    out << "x1,x2,x3,y\n";
    for (int i = 0; i < 60; ++i) {
        const double x1 = rng.normal(), x2 = rng.normal(), x3 = rng.normal();
        const double mean = 0.5 + 1.4 * x1 + 0.9 * x3;
        const double sd = std::exp(0.5 * (0.2 + 0.8 * x1));
        const double y = mean + sd * rng.normal();
        out << format_num(x1, 17) << ',' << format_num(x2, 17) << ',' << format_num(x3, 17)
            << ',' << format_num(y, 17) << "\n";
    }
}

struct Fixture {
    Fixture() {
        fs::create_directories(kDir);
        write_training_csv(kDir / "train.csv");
    }
};
const Fixture fixture;

}  // namespace

TEST_CASE("fit writes a model and prints the coefficient table") {
    const int code = run("fit --data " + (kDir / "train.csv").string() + " --response y --out " +
                             (kDir / "model.json").string() + " --steps 60",
                         "fit.out");
    CHECK(code == 0);
    const std::string out = slurp(kDir / "fit.out");
    CHECK(out.find("BIC") != std::string::npos);
    CHECK(out.find("(intercept)") != std::string::npos);
    CHECK(out.find("x1") != std::string::npos);

    const ModelFile m = load_model((kDir / "model.json").string());
    CHECK(m.response == "y");
    CHECK(m.predictors == std::vector<std::string>{"x1", "x2", "x3"});
    CHECK(m.standardized);
    CHECK(!m.spr);
    CHECK(m.beta.size() == 4);
    CHECK(m.train_fingerprint.size() == 16);

    // save -> load -> save is byte-identical
    const std::string text = slurp(kDir / "model.json");
    CHECK(text == to_json(model_from_json(text)));
}

TEST_CASE("fit with --spr suppresses the dispersion tail") {
    const int code = run("fit --data " + (kDir / "train.csv").string() +
                             " --response y --spr --steps 60 --out " +
                             (kDir / "model_spr.json").string(),
                         "fit_spr.out");
    CHECK(code == 0);
    const ModelFile m = load_model((kDir / "model_spr.json").string());
    CHECK(m.spr);
    for (size_t j = 1; j < m.alpha.size(); ++j) CHECK(m.alpha[j] == 0.0);
    CHECK(m.active_alpha == std::vector<int>{0});
}

TEST_CASE("input errors exit with code 2") {
    CHECK(run("fit --data " + (kDir / "train.csv").string() + " --response nope") == 2);
    CHECK(run("fit --data " + (kDir / "missing.csv").string() + " --response y") == 2);
    CHECK(run("fit --response y") == 2);  // missing required option
    CHECK(run("simulate --scenario " + (kDir / "missing.scn").string()) == 2);
}

TEST_CASE("numerical failures exit with code 3") {
    {
        std::ofstream out(kDir / "exact.csv");
        out << "x1,y\n";
        for (int i = 1; i <= 12; ++i) out << i << ',' << 2 * i << "\n";
    }
    CHECK(run("fit --data " + (kDir / "exact.csv").string() + " --response y") == 3);
}

TEST_CASE("path emits one row per step, component and predictor") {
    const int code = run("path --data " + (kDir / "train.csv").string() +
                             " --response y --steps 25 --out " + (kDir / "path.csv").string(),
                         "path.out");
    CHECK(code == 0);
    const std::string csv = slurp(kDir / "path.csv");
    CHECK(count_lines(csv) == 1 + 25 * 2 * 3);
    CHECK(csv.rfind("step,epsilon,component,predictor,value\n", 0) == 0);
    CHECK(csv.find(",location,x1,") != std::string::npos);
    CHECK(csv.find(",dispersion,x3,") != std::string::npos);
}

TEST_CASE("predict matches columns by name and reports coverage") {
    REQUIRE(run("fit --data " + (kDir / "train.csv").string() + " --response y --steps 60 --out " +
                (kDir / "model.json").string()) == 0);

    const int code = run("predict --model " + (kDir / "model.json").string() + " --data " +
                             (kDir / "train.csv").string() + " --actual y --out " +
                             (kDir / "pred.csv").string(),
                         "pred.out");
    CHECK(code == 0);
    const std::string pred = slurp(kDir / "pred.csv");
    CHECK(count_lines(pred) == 1 + 60);
    CHECK(pred.rfind("mean,variance,lower,upper\n", 0) == 0);
    const std::string cover = slurp(kDir / "pred.out");
    CHECK(cover.find("prediction coverage") != std::string::npos);
    CHECK(cover.find("overall") != std::string::npos);

    // permuting the columns does not change the predictions
    {
        const CsvTable t = read_csv((kDir / "train.csv").string());
        std::ofstream out(kDir / "permuted.csv");
        out << "x3,y,x1,x2\n";
        for (long i = 0; i < t.rows(); ++i)
            out << format_num(t.values(i, 2), 17) << ',' << format_num(t.values(i, 3), 17) << ','
                << format_num(t.values(i, 0), 17) << ',' << format_num(t.values(i, 1), 17)
                << "\n";
    }
    CHECK(run("predict --model " + (kDir / "model.json").string() + " --data " +
              (kDir / "permuted.csv").string() + " --out " + (kDir / "pred2.csv").string()) == 0);
    CHECK(slurp(kDir / "pred2.csv") == pred);

    // unknown or missing predictors are a column mismatch
    {
        std::ofstream out(kDir / "extra.csv");
        out << "x1,x2,x3,bogus\n0,0,0,1\n";
    }
    CHECK(run("predict --model " + (kDir / "model.json").string() + " --data " +
              (kDir / "extra.csv").string()) == 2);
    {
        std::ofstream out(kDir / "short.csv");
        out << "x1,x2\n0,0\n";
    }
    CHECK(run("predict --model " + (kDir / "model.json").string() + " --data " +
              (kDir / "short.csv").string()) == 2);
}

TEST_CASE("simulate honors overrides for replicates and sample sizes") {
    {
        std::ofstream out(kDir / "mini.scn");
        out << "covariates = norm norm\n"
            << "beta  = 0 1 0\n"
            << "alpha = 0 0.5 0\n"
            << "n = 500\n"
            << "replicates = 50\n"
            << "seed = 3\n";
    }
    const int code = run("simulate --scenario " + (kDir / "mini.scn").string() +
                             " --reps 4 --n 60 --steps 30 --methods mpr --out " +
                             (kDir / "study.csv").string(),
                         "sim.out");
    CHECK(code == 0);
    const std::string csv = slurp(kDir / "study.csv");
    CHECK(csv.find("\n60,MPR-SIC,") != std::string::npos);
    CHECK(csv.find("500,") == std::string::npos);
    CHECK(csv.find("SPR-SIC") == std::string::npos);
    const std::string text = slurp(kDir / "sim.out");
    CHECK(text.find("replicates=4") != std::string::npos);
}

TEST_CASE("delta-bic emits per-coefficient rows") {
    const int code = run("delta-bic --data " + (kDir / "train.csv").string() +
                             " --response y --steps 60 --component location --predictor x1",
                         "dbic.out");
    CHECK(code == 0);
    const std::string out = slurp(kDir / "dbic.out");
    CHECK(out.rfind("component,predictor,delta_bic\n", 0) == 0);
    CHECK(out.find("location,x1,") != std::string::npos);

    CHECK(run("delta-bic --data " + (kDir / "train.csv").string() +
              " --response y --component location --predictor nope") == 2);
}
