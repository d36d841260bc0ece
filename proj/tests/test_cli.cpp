#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "logheston/cli.hpp"
#include "logheston/schema.hpp"

using namespace logheston;
namespace fs = std::filesystem;

namespace {

const std::string kData = LOGHESTON_DATA_DIR;
const std::string kSchemas = LOGHESTON_SCHEMA_DIR;

RunConfig test_config(const std::string& out) {
    RunConfig c;
    c.vxo_daily = kData + "/vxocls_daily.csv";
    c.vix_daily = kData + "/vixcls_daily.csv";
    c.returns = {{"small_total", kData + "/returns_small_total.csv"},
                 {"large_total", kData + "/returns_large_total.csv"},
                 {"small_price", kData + "/returns_small_price.csv"},
                 {"large_price", kData + "/returns_large_price.csv"}};
    c.reference_stats = kData + "/reference_stats.json";
    c.out = out;
    // light Monte Carlo settings: the full budgets live in the acceptance run
    c.sim_coupling = "independent";
    c.stationary_n = 20000;
    c.stationary_reps = 4;
    c.lln_sizes = {64, 256};
    c.lln_reps = 200;
    c.tail_n = 1000000;
    c.tail_r = 1000;
    c.pm_n = 50000;
    c.pm_batches = 16;
    c.path_sample = 200;
    return c;
}

json slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void expect_valid(const std::string& doc_path, const std::string& schema_name) {
    json doc = slurp(doc_path);
    json schema = slurp(kSchemas + "/" + schema_name + ".schema.json");
    auto errors = validate_schema(doc, schema);
    for (const auto& e : errors) UNSCOPED_INFO(schema_name << ": " << e);
    CHECK(errors.empty());
}

int run(std::vector<std::string> args) {
    std::vector<char*> argv;
    args.insert(args.begin(), "logheston");
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("pipeline end to end on the bundled snapshot") {
    const fs::path out = fs::temp_directory_path() / "logheston_cli_e2e";
    fs::remove_all(out);
    auto cfg = test_config(out.string());

    cmd_ingest(cfg);
    REQUIRE(fs::exists(out / "panel.csv"));
    expect_valid((out / "provenance.json").string(), "provenance");
    json prov = slurp((out / "provenance.json").string());
    CHECK(prov["t"] == 462);
    CHECK(prov["switch_month"] == "1990-03");
    CHECK(prov["first_month"] == "1986-01");
    CHECK(prov["last_month"] == "2024-06");

    cmd_diagnose(cfg);
    expect_valid((out / "diagnostics.json").string(), "diagnostics");
    json diag = slurp((out / "diagnostics.json").string());
    REQUIRE(diag["series"].size() == 4);
    CHECK(fs::exists(out / "qq_small_total_raw.csv"));
    CHECK(fs::exists(out / "qq_large_price_normalized.csv"));
    // normalization tames the raw tails on every series
    for (const auto& [name, s] : diag["series"].items()) {
        CHECK(std::abs(s["normalized"]["excess_kurtosis"].get<double>()) <
              std::abs(s["raw"]["excess_kurtosis"].get<double>()));
    }

    cmd_fit(cfg);
    expect_valid((out / "fit.json").string(), "fit");
    json fit = slurp((out / "fit.json").string());
    CHECK(fit["log_heston_fit"]["scale"] == "log");
    CHECK(fit["heston_fit"]["scale"] == "level");
    CHECK(fit["vg_fit"]["converged"] == true);
    CHECK(fit["returns_fits"].size() == 4);
    REQUIRE(fs::exists(out / "residuals_w.csv"));
    auto w = detail::read_series_csv((out / "residuals_w.csv").string());
    CHECK(w.size() == 461);

    cmd_hill(cfg);
    expect_valid((out / "hill.json").string(), "hill");
    json hill = slurp((out / "hill.json").string());
    CHECK(hill["estimates"]["r"] == 100);
    CHECK(hill["mgf_interval"]["t_max"].get<double>() > 0.0);
    CHECK(fs::exists(out / "hill_curve.csv"));

    cmd_simulate(cfg);
    expect_valid((out / "sim_model.json").string(), "sv_model");
    expect_valid((out / "mc_stationary.json").string(), "mc_report");
    expect_valid((out / "mc_path_moments.json").string(), "mc_report");
    expect_valid((out / "mc_lln_clt.json").string(), "mc_report");
    expect_valid((out / "mc_tail.json").string(), "mc_report");
    std::string path_csv = file_bytes((out / "path_sample.csv").string());
    CHECK(path_csv.substr(0, 4) == "v,q\n");

    cmd_report(cfg);
    expect_valid((out / "report.json").string(), "report");
    json rep = slurp((out / "report.json").string());
    CHECK(rep.contains("all_pass"));
    CHECK(fs::exists(out / "report.txt"));

    expect_valid(cfg.reference_stats, "reference_stats");
    fs::remove_all(out);
}

TEST_CASE("fit output is byte-identical across runs") {
    const fs::path out_a = fs::temp_directory_path() / "logheston_cli_det_a";
    const fs::path out_b = fs::temp_directory_path() / "logheston_cli_det_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    auto ca = test_config(out_a.string());
    auto cb = test_config(out_b.string());
    cmd_ingest(ca);
    cmd_fit(ca);
    cmd_ingest(cb);
    cmd_fit(cb);
    CHECK(file_bytes((out_a / "panel.csv").string()) ==
          file_bytes((out_b / "panel.csv").string()));
    CHECK(file_bytes((out_a / "fit.json").string()) ==
          file_bytes((out_b / "fit.json").string()));
    CHECK(file_bytes((out_a / "residuals_w.csv").string()) ==
          file_bytes((out_b / "residuals_w.csv").string()));
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("stage ordering is enforced through files") {
    const fs::path out = fs::temp_directory_path() / "logheston_cli_order";
    fs::remove_all(out);
    auto cfg = test_config(out.string());
    CHECK_THROWS_AS(cmd_diagnose(cfg), std::invalid_argument);
    CHECK_THROWS_AS(cmd_fit(cfg), std::invalid_argument);
    CHECK_THROWS_AS(cmd_hill(cfg), std::invalid_argument);
    CHECK_THROWS_AS(cmd_simulate(cfg), std::invalid_argument);
    CHECK_THROWS_AS(cmd_report(cfg), std::invalid_argument);
    fs::remove_all(out);
}

TEST_CASE("run_cli maps outcomes to exit codes") {
    const fs::path out = fs::temp_directory_path() / "logheston_cli_codes";
    fs::remove_all(out);

    // usage problems: unknown subcommand, none at all, bad config path
    CHECK(run({"definitely-not-a-command"}) == 1);
    CHECK(run({}) == 1);
    CHECK(run({"--config", "/nonexistent/config.json", "ingest"}) == 1);

    // missing upstream stage output
    CHECK(run({"--out", out.string(), "fit"}) == 1);

    // a refused precondition surfaces as exit 2: exponent outside the
    // innovation law's moment interval
    const fs::path cfg_path = fs::temp_directory_path() / "logheston_u50.json";
    {
        auto cfg = test_config(out.string());
        cmd_ingest(cfg);
        cmd_fit(cfg);
        json j{{"data",
                {{"vxo_daily", cfg.vxo_daily},
                 {"vix_daily", cfg.vix_daily},
                 {"reference_stats", cfg.reference_stats},
                 {"returns", json::object()}}},
               {"out", out.string()},
               {"simulate",
                {{"coupling", "independent"},
                 {"stationary", {{"u", 50.0}, {"n", 1000}, {"reps", 2}}}}}};
        for (const auto& [name, path] : cfg.returns)
            j["data"]["returns"][name] = path;
        std::ofstream f(cfg_path);
        f << j.dump(2);
    }
    CHECK(run({"--config", cfg_path.string(), "simulate"}) == 2);

    fs::remove(cfg_path);
    fs::remove_all(out);
}

TEST_CASE("the installed binary honors help and failure codes") {
    const std::string tool = LOGHESTON_TOOL;
    CHECK(std::system((tool + " --help > /dev/null 2>&1").c_str()) == 0);
    int rc = std::system((tool + " bogus-subcommand > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 1);
}
