// Experiment catalog, presets, and end-to-end artifact generation.

#include <catch2/catch_amalgamated.hpp>

#include <riskbias/experiments.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace riskbias;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("riskbias_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream out;
    out << f.rdbuf();
    return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

bool has_file(const ExperimentResult& result, const std::string& name) {
    return std::find(result.files.begin(), result.files.end(), name) != result.files.end();
}

} // namespace

TEST_CASE("experiment catalog", "[experiments]") {
    const auto& list = experiment_list();
    REQUIRE(list.size() == 9);
    const std::vector<std::string> ids{"fig1", "fig2", "fig3",   "fig4",  "fig5",
                                       "fig6", "fig8", "table1", "table2"};
    for (std::size_t i = 0; i < ids.size(); ++i) {
        CHECK(list[i].id == ids[i]);
        CHECK_FALSE(list[i].caption.empty());
    }
}

TEST_CASE("preset parameter sets", "[experiments]") {
    const Presets& p = presets();
    CHECK(p.gaussian.mu == 0.0);
    CHECK(p.gaussian.sigma == 1.0);
    CHECK(p.gaussian_n == 250);
    CHECK(p.var_level == 0.01);
    CHECK(p.es_level == 0.025);
    CHECK(p.tail_example.u == -1.0);
    CHECK(p.tail_example.xi == 0.05);
    CHECK(p.tail_example.beta == 0.7);
    CHECK(p.tail_example.p == 0.2);
    CHECK(p.tail_n == 50);
    CHECK(p.garch.omega == 1e-4);
    CHECK(p.garch.alpha == 0.1);
    CHECK(p.garch.beta == 0.8);
    CHECK(p.garch_n == 250);
    CHECK(p.evar_level == 0.00145);
    CHECK(p.student_nu == 5.0);

    const auto& ds = gpd_datasets();
    REQUIRE(ds.size() == 3);
    CHECK(ds[0].name == "dataset1");
    CHECK(ds[0].law.u == -0.978);
    CHECK(ds[0].law.xi == 0.212);
    CHECK(ds[0].law.beta == 0.869);
    CHECK(ds[0].alpha == 0.050);
    CHECK(ds[0].n == 50);
    CHECK(ds[1].name == "dataset2");
    CHECK(ds[1].law.u == -2.200);
    CHECK(ds[1].law.xi == 0.388);
    CHECK(ds[1].law.beta == 0.545);
    CHECK(ds[1].alpha == 0.075);
    CHECK(ds[2].name == "dataset3");
    CHECK(ds[2].law.xi == 1.190);  // infinite-mean tail: excluded from shortfall tables
    CHECK(ds[2].alpha == 0.100);
    CHECK(ds[2].n == 42);
}

TEST_CASE("dataset selection parsing", "[experiments]") {
    using riskbias::detail::parse_datasets;
    const std::vector<std::size_t> fallback{0, 1};
    CHECK(parse_datasets("", fallback) == fallback);
    CHECK(parse_datasets("1,3", fallback) == std::vector<std::size_t>{0, 2});
    CHECK(parse_datasets("2", fallback) == std::vector<std::size_t>{1});
    CHECK(parse_datasets("3,2,1", fallback) == std::vector<std::size_t>{2, 1, 0});
    CHECK_THROWS_AS(parse_datasets("4", fallback), ConfigError);
    CHECK_THROWS_AS(parse_datasets("1,,2", fallback), ConfigError);
    CHECK_THROWS_AS(parse_datasets("12", fallback), ConfigError);
    CHECK_THROWS_AS(parse_datasets("one", fallback), ConfigError);
}

TEST_CASE("default horizons", "[experiments]") {
    CHECK(default_scale("fig1") == 20000);
    CHECK(default_scale("fig5") == 5000);
    CHECK(default_scale("fig6") == 0);
    CHECK(default_scale("fig8") == 0);
    CHECK(default_scale("table1") == 20000);
    CHECK(default_scale("table2") == 20000);
}

TEST_CASE("convergence figure writes csv, svg, and manifest", "[experiments]") {
    const char* prev = std::getenv("RISKBIAS_THREADS");
    const std::string saved = prev ? prev : "";

    ExperimentConfig cfg;
    cfg.id = "fig1";
    cfg.scale = 1000;
    cfg.out_dir = fresh_dir("fig1_serial");
    cfg.emit_svg = true;

    setenv("RISKBIAS_THREADS", "1", 1);
    const auto result = run_experiment(cfg);
    CHECK(result.errors.empty());
    CHECK(result.warnings.empty());
    CHECK(has_file(result, "fig1.csv"));
    CHECK(has_file(result, "fig1.svg"));
    CHECK(has_file(result, "manifest.json"));

    const auto csv_lines = lines_of(slurp(fs::path(cfg.out_dir) / "fig1.csv"));
    // comment + header + 4 estimators x 200 checkpoints
    REQUIRE(csv_lines.size() == 802);
    CHECK(csv_lines[0] == "# figure=1");
    CHECK(csv_lines[1] == "m,estimator,statistic,value");
    const std::string body = slurp(fs::path(cfg.out_dir) / "fig1.csv");
    for (const char* label : {"empirical", "plug-in", "unbiased", "true"})
        CHECK(body.find(label) != std::string::npos);

    CHECK(slurp(fs::path(cfg.out_dir) / "fig1.svg").find("<svg") != std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "manifest.json"));
    CHECK(manifest["id"] == "fig1");
    CHECK(manifest["scale"] == 1000);
    CHECK(manifest["bootstrap"] == 10000);
    CHECK(manifest["seed"] == 42);
    CHECK(manifest["version"] == "1.0.0");
    CHECK(manifest["threads"] == 1);
    CHECK(manifest["errors"].empty());
    CHECK(manifest["wall_seconds"].is_number());
    const auto& pj = manifest["presets"];
    CHECK(pj["gaussian"]["mu"].get<double>() == 0.0);
    CHECK(pj["gaussian"]["sigma"].get<double>() == 1.0);
    CHECK(pj["gaussian"]["n"].get<std::size_t>() == 250);
    CHECK(pj["gaussian"]["var_level"].get<double>() == 0.01);
    CHECK(pj["gaussian"]["es_level"].get<double>() == 0.025);
    CHECK(pj["tail_example"]["xi"].get<double>() == 0.05);
    CHECK(pj["tail_example"]["p"].get<double>() == 0.2);
    CHECK(pj["garch"]["omega"].get<double>() == 1e-4);
    CHECK(pj["evar_level"].get<double>() == 0.00145);
    CHECK(pj["student_nu"].get<double>() == 5.0);
    REQUIRE(pj["gpd_datasets"].size() == 3);
    CHECK(pj["gpd_datasets"][0]["name"] == "dataset1");
    CHECK(pj["gpd_datasets"][0]["xi"].get<double>() == 0.212);

    // the same experiment under a different worker count must emit identical bytes
    ExperimentConfig threaded = cfg;
    threaded.out_dir = fresh_dir("fig1_threaded");
    threaded.emit_svg = false;
    setenv("RISKBIAS_THREADS", "8", 1);
    const auto tresult = run_experiment(threaded);
    if (!saved.empty()) setenv("RISKBIAS_THREADS", saved.c_str(), 1);
    else unsetenv("RISKBIAS_THREADS");
    CHECK(tresult.errors.empty());
    CHECK(slurp(fs::path(threaded.out_dir) / "fig1.csv") ==
          slurp(fs::path(cfg.out_dir) / "fig1.csv"));
}

TEST_CASE("tail convergence figure reports its level convention", "[experiments]") {
    ExperimentConfig cfg;
    cfg.id = "fig2";
    cfg.scale = 1000;
    cfg.out_dir = fresh_dir("fig2");
    const auto result = run_experiment(cfg);
    CHECK(result.errors.empty());
    CHECK(has_file(result, "fig2.csv"));
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("caption") != std::string::npos);
}

TEST_CASE("multiplier heat maps", "[experiments]") {
    ExperimentConfig cfg;
    cfg.id = "fig6";
    cfg.bootstrap = 500; // smoke scale
    cfg.out_dir = fresh_dir("fig6");
    cfg.emit_svg = true;
    const auto result = run_experiment(cfg);
    CHECK(result.errors.empty());
    CHECK(has_file(result, "fig6_normal.csv"));
    CHECK(has_file(result, "fig6_gpd.csv"));
    CHECK(has_file(result, "fig6_normal.svg"));
    CHECK(has_file(result, "fig6_gpd.svg"));

    const auto normal = lines_of(slurp(fs::path(cfg.out_dir) / "fig6_normal.csv"));
    REQUIRE(normal.size() == 2 + 25); // 5x5 (mu, sigma) grid
    CHECK(normal[1] == "p1,p2,a");
    CHECK(normal[2].rfind("-2,0.5,", 0) == 0);
    const auto gpd = lines_of(slurp(fs::path(cfg.out_dir) / "fig6_gpd.csv"));
    REQUIRE(gpd.size() == 2 + 55); // 11 shapes x 5 scales
    CHECK(gpd[2].rfind("0,0.5,", 0) == 0);
    for (std::size_t i = 2; i < gpd.size(); ++i) {
        const auto last_comma = gpd[i].rfind(',');
        const double a = std::stod(gpd[i].substr(last_comma + 1));
        CHECK(a > 0.5);
        CHECK(a < 3.0);
    }
}

TEST_CASE("shortfall heat map variant", "[experiments]") {
    ExperimentConfig cfg;
    cfg.id = "fig8";
    cfg.bootstrap = 500;
    cfg.out_dir = fresh_dir("fig8");
    const auto result = run_experiment(cfg);
    CHECK(result.errors.empty());
    CHECK(has_file(result, "fig8_var.csv"));
    CHECK(has_file(result, "fig8_es.csv"));
    const auto es = lines_of(slurp(fs::path(cfg.out_dir) / "fig8_es.csv"));
    REQUIRE(es.size() == 2 + 35); // 7 shapes x 5 scales
}

TEST_CASE("quantile backtest table", "[experiments]") {
    ExperimentConfig cfg;
    cfg.id = "table1";
    cfg.scale = 300;
    cfg.bootstrap = 1500;
    cfg.datasets = "1";
    cfg.emit_breaches = true;
    cfg.out_dir = fresh_dir("table1");
    const auto result = run_experiment(cfg);
    CHECK(result.errors.empty());
    CHECK(has_file(result, "table1.csv"));
    CHECK(has_file(result, "table1_breaches_dataset1.csv"));

    const auto lines = lines_of(slurp(fs::path(cfg.out_dir) / "table1.csv"));
    REQUIRE(lines.size() == 2 + 5); // five estimator rows for one dataset
    CHECK(lines[1] == "dataset,estimator,T,S,NGZ,DM,DM_p,MR,SD");
    CHECK(lines[2].rfind("dataset1,empirical,", 0) == 0);
    CHECK(lines[3].rfind("dataset1,plug-in,", 0) == 0);
    CHECK(lines[4].rfind("dataset1,b-true,", 0) == 0);
    CHECK(lines[5].rfind("dataset1,b,", 0) == 0);
    CHECK(lines[6].rfind("dataset1,true,", 0) == 0);
    // the comparison reference row carries empty score-test cells
    CHECK(lines[4].find(",,") != std::string::npos);
    CHECK(lines[2].find(",,") == std::string::npos);

    const auto breaches = lines_of(slurp(fs::path(cfg.out_dir) /
                                         "table1_breaches_dataset1.csv"));
    REQUIRE(breaches.size() == 2 + 5 * 300);
    CHECK(breaches[1] == "dataset,estimator,t,x,rho,y,breach");
}

TEST_CASE("shortfall backtest table", "[experiments]") {
    ExperimentConfig cfg;
    cfg.id = "table2";
    cfg.scale = 300;
    cfg.bootstrap = 1500;
    cfg.datasets = "1";
    cfg.out_dir = fresh_dir("table2");
    const auto result = run_experiment(cfg);
    CHECK(result.errors.empty());
    CHECK(has_file(result, "table2.csv"));
    const auto lines = lines_of(slurp(fs::path(cfg.out_dir) / "table2.csv"));
    REQUIRE(lines.size() == 2 + 5);
    CHECK(lines[1] == "dataset,estimator,G,MR,SD");
}

TEST_CASE("infinite-mean datasets are rejected for shortfall tables", "[experiments]") {
    ExperimentConfig cfg;
    cfg.id = "table2";
    cfg.scale = 300;
    cfg.datasets = "3";
    cfg.out_dir = fresh_dir("table2_bad");
    const auto result = run_experiment(cfg);
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].find("dataset3") != std::string::npos);
    // the manifest still records the failed run
    CHECK(has_file(result, "manifest.json"));
    CHECK_FALSE(has_file(result, "table2.csv"));
    const auto manifest = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "manifest.json"));
    REQUIRE(manifest["errors"].size() == 1);
}

TEST_CASE("configuration errors are immediate", "[experiments]") {
    ExperimentConfig cfg;
    cfg.id = "fig7";
    cfg.out_dir = fresh_dir("badid");
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);

    cfg.id = "fig1";
    cfg.scale = 999;
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}
