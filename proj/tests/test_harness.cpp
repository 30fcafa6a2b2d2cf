#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "gclab/errors.hpp"
#include "gclab/harness.hpp"

using namespace gclab;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.R = 5.0;
    cfg.T = 5.5;
    cfg.R_ladder = {4.0, 5.0, 5.5};
    cfg.arc_lengths = {6.0, 9.0};
    cfg.samples = 200;
    cfg.closed_lengths = {4.0, 5.5};
    cfg.equidist_lengths = {4.0, 5.5};
    cfg.seed = 42;
    return cfg;
}

std::vector<ExperimentReport> run_all(const ExperimentConfig& cfg) {
    CensusStore store(cfg);
    return {run_census(cfg, store, {4.0, 5.5}), run_pair_stats(cfg, store), run_arc_tails(cfg, store),
            run_closed_tails(cfg, store), run_equidistribution(cfg, store)};
}

std::string temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "gclab_test_harness" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.R = 8.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = ExperimentConfig{};
    cfg.eps_list = {0.01, -1.0};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = ExperimentConfig{};
    cfg.samples = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = ExperimentConfig{};
    cfg.kappa = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("reports are deterministic and independent of the worker count") {
    ExperimentConfig one = small_config();
    one.jobs = 1;
    ExperimentConfig many = small_config();
    many.jobs = 4;
    const auto a = run_all(one), b = run_all(one), c = run_all(many);
    REQUIRE(a.size() == c.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].to_csv() == b[i].to_csv());
        CHECK(a[i].to_json() == b[i].to_json());
        CHECK(a[i].to_csv() == c[i].to_csv());
        CHECK(a[i].to_json() == c[i].to_json());
    }
    // A different seed changes the sampled experiment only.
    ExperimentConfig other = small_config();
    other.seed = 43;
    const auto d = run_all(other);
    CHECK(a[2].rows.size() == d[2].rows.size());
    CHECK(a[2].value("mean_form_over_T2", {{"T", "9"}}) != d[2].value("mean_form_over_T2", {{"T", "9"}}));
}

TEST_CASE("report formats") {
    const ExperimentConfig cfg = small_config();
    CensusStore store(cfg);
    const ExperimentReport r = run_closed_tails(cfg, store);
    const std::string csv = r.to_csv();
    CHECK(csv.rfind("experiment,statistic,params,value\n", 0) == 0);
    CHECK(csv.find("closed_tails,provenance.seed,,42\n") != std::string::npos);
    CHECK(csv.find("closed_tails,provenance.code_version,,gclab-1.0\n") != std::string::npos);
    CHECK(csv.find("closed_tails,count,T=5.5,48\n") != std::string::npos);
    const nlohmann::json j = nlohmann::json::parse(r.to_json());
    CHECK(j["experiment"] == "closed_tails");
    CHECK(j["watermarked"] == false);
    CHECK(j["provenance"]["seed"] == "42");
    CHECK(j["config"]["genus"] == "2");
    CHECK(j["rows"].size() == r.rows.size());

    const std::string dir = temp_dir("formats");
    write_report(r, dir, "csv");
    write_report(r, dir, "json");
    CHECK(slurp(dir + "/closed_tails.csv") == csv);
    CHECK(slurp(dir + "/closed_tails.json") == r.to_json());
    CHECK_FALSE(std::filesystem::exists(dir + "/closed_tails.csv.tmp"));
    CHECK_THROWS_AS(write_report(r, dir, "xml"), Error);
}

TEST_CASE("census store uses and repairs the disk cache") {
    ExperimentConfig cfg = small_config();
    cfg.cache_dir = temp_dir("cache");
    const std::string path = cache_path(cfg.cache_dir, 2, 1.0, 5.5);
    std::size_t n = 0;
    {
        CensusStore store(cfg);
        n = store.get(5.5).size();
    }
    REQUIRE(std::filesystem::exists(path));
    const std::string saved = slurp(path);
    {
        CensusStore store(cfg);
        CHECK(store.get(5.5).size() == n);
    }
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << saved.substr(0, saved.size() / 3);
    }
    {
        CensusStore store(cfg);
        CHECK(store.get(5.5).size() == n);
    }
    CHECK(slurp(path) == saved);
    const Census back = cache_roundtrip(CensusStore(cfg).surface(), path);
    CHECK(back.size() == n);
}

TEST_CASE("incomplete censuses are refused unless allowed") {
    ExperimentConfig cfg = small_config();
    cfg.tile_budget = 10;
    {
        CensusStore store(cfg);
        CHECK_THROWS_AS(run_closed_tails(cfg, store), IncompleteCensusError);
    }
    cfg.allow_incomplete = true;
    CensusStore store(cfg);
    const ExperimentReport r = run_closed_tails(cfg, store);
    CHECK(r.watermarked);
    CHECK(r.to_csv().find("provenance.watermark") != std::string::npos);
    CHECK(r.to_csv().find("complete=0") != std::string::npos);
}

TEST_CASE("threshold extremes") {
    ExperimentConfig cfg = small_config();
    CensusStore store(cfg);
    const double c_star = store.surface().c_star();
    const double bound = 1.0 / (store.surface().rho() * store.surface().rho());

    cfg.eps_list = {10.0};
    const ExperimentReport p = run_pair_stats(cfg, store);
    CHECK(p.value("tail_fraction", {{"R", "5"}, {"T", "5.5"}}) == 0.0);
    CHECK(p.value("tail_slope_censored", {}) == 3.0);
    CHECK(p.value("audit_violations", {{"R", "5"}, {"T", "5.5"}}) == 0.0);
    CHECK(p.value("max_normalized", {{"R", "5"}, {"T", "5.5"}}) <= bound);

    cfg.arc_eps = 10.0;
    const ExperimentReport a = run_arc_tails(cfg, store);
    for (const char* T : {"6", "9"}) {
        CHECK(a.value("deviation_fraction", {{"T", T}}) == 0.0);
        CHECK(a.value("max_form_over_T2", {{"T", T}}) < 10.0);
    }

    cfg.closed_eps = bound + c_star + 1e-9;
    const ExperimentReport c = run_closed_tails(cfg, store);
    CHECK(c.value("close_fraction", {{"T", "5.5"}}) == 1.0);

    cfg.boxes = {PhaseBox{DiskPoint(cplx(0.0, 0.0)), 3.0, 0.0, kTwoPi}};
    const ExperimentReport e = run_equidistribution(cfg, store);
    CHECK(std::abs(e.value("box_measure", {{"box", "0"}}) - 1.0) < 2e-5);
    CHECK(e.value("census_occupation", {{"T", "5.5"}, {"box", "0"}}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pair subsampling is seeded") {
    ExperimentConfig cfg = small_config();
    cfg.pair_budget = 500;
    cfg.R_ladder = {5.0};
    CensusStore store(cfg);
    const ExperimentReport a = run_pair_stats(cfg, store), b = run_pair_stats(cfg, store);
    CHECK(a.to_csv() == b.to_csv());
    CHECK(a.value("subsampled", {{"R", "5"}, {"T", "5.5"}}) == 1.0);
    CHECK(a.value("pairs_used", {{"R", "5"}, {"T", "5.5"}}) == 500.0);
    CHECK(a.value("mean_standard_error", {{"R", "5"}, {"T", "5.5"}}) > 0.0);
}

TEST_CASE("Wilson interval and least squares") {
    const WilsonInterval w = wilson(0, 100);
    CHECK(w.lo == 0.0);
    CHECK(w.hi == doctest::Approx(0.036995).epsilon(1e-4));
    const WilsonInterval h = wilson(50, 100);
    CHECK(h.lo == doctest::Approx(0.403832).epsilon(1e-5));
    CHECK(h.hi == doctest::Approx(0.596168).epsilon(1e-5));
    const SlopeFit line = ols_slope({1.0, 2.0, 3.0}, {3.0, 5.0, 7.0});
    CHECK(line.slope == doctest::Approx(2.0));
    CHECK(line.stderr_ == doctest::Approx(0.0));
    CHECK(line.points == 3);
    const SlopeFit noisy = ols_slope({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 1.0, 3.0});
    CHECK(noisy.slope == doctest::Approx(0.9));
    CHECK(noisy.stderr_ == doctest::Approx(std::sqrt(0.7 / 2.0 / 5.0)));
}
