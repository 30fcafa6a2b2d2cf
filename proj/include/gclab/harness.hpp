#pragma once

// Experiments over censuses and sampled arcs, with CSV/JSON reports.
//
// Self-intersection statistics are compared with C* through the intersection
// form of the curve with itself, which sees every double point from both
// branches and so equals twice the number of self-intersection points. Reports
// carry both values.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gclab/census.hpp"
#include "gclab/flow.hpp"
#include "gclab/surface.hpp"

namespace gclab {

inline constexpr const char* kCodeVersion = "gclab-1.0";

struct ExperimentConfig {
    int genus = 2;
    double kappa = 1.0;
    double R = 7.0;
    double T = 7.0;
    std::vector<double> R_ladder{5.0, 6.0, 7.0};  // pair statistics at R = T = ladder value
    std::vector<double> eps_list;                  // absolute; empty means {0.25, 0.5, 1} C*
    std::vector<double> arc_lengths{10.0, 14.0, 18.0};
    int samples = 2000;
    double arc_eps = 0.0;                          // 0 means 0.5 C*
    std::vector<double> closed_lengths{5.0, 6.0, 7.0};
    double closed_eps = 0.0;                       // 0 means C*
    std::vector<double> equidist_lengths{5.0, 7.0};
    std::vector<PhaseBox> boxes = default_box_suite();
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::size_t pair_budget = 10'000'000;
    std::size_t tile_budget = 40'000'000;         // census search limit; beyond it the census is incomplete
    std::string cache_dir;                         // empty: no disk cache
    bool allow_incomplete = false;

    // Throws Error on violated invariants.
    void validate() const;
};

struct ReportRow {
    std::string statistic;
    std::vector<std::pair<std::string, std::string>> params;
    std::string value;
};

struct ExperimentReport {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::pair<std::string, std::string>> provenance;
    std::vector<ReportRow> rows;
    bool watermarked = false;

    void add(std::string statistic, std::vector<std::pair<std::string, std::string>> params, double value);
    void add(std::string statistic, std::vector<std::pair<std::string, std::string>> params, std::int64_t value);
    void add_text(std::string statistic, std::vector<std::pair<std::string, std::string>> params, std::string value);
    // First row matching statistic and all given params; throws if absent.
    double value(const std::string& statistic, const std::vector<std::pair<std::string, std::string>>& params = {}) const;

    std::string to_csv() const;
    std::string to_json() const;
};

// Writes <dir>/<experiment>.<csv|json> atomically.
void write_report(const ExperimentReport& r, const std::string& dir, const std::string& format);

// Builds censuses on demand, reusing memory and the disk cache.
class CensusStore {
public:
    explicit CensusStore(const ExperimentConfig& cfg);
    const SurfaceModel& surface() const { return surface_; }
    // Throws IncompleteCensusError unless incomplete censuses are allowed.
    const Census& get(double T);
    // Identifiers of every census handed out, for provenance.
    std::string ids() const;
    bool any_incomplete() const { return any_incomplete_; }

private:
    ExperimentConfig cfg_;
    SurfaceModel surface_;
    std::map<double, std::unique_ptr<Census>> censuses_;
    bool any_incomplete_ = false;
};

// Parameter values in report rows use 12 significant digits.
std::string format_param(double x);

std::string census_id(const Census& c);
std::string cache_path(const std::string& dir, int genus, double kappa, double T);

ExperimentReport run_census(const ExperimentConfig& cfg, CensusStore& store, const std::vector<double>& lengths);
ExperimentReport run_pair_stats(const ExperimentConfig& cfg, CensusStore& store);
ExperimentReport run_arc_tails(const ExperimentConfig& cfg, CensusStore& store);
ExperimentReport run_closed_tails(const ExperimentConfig& cfg, CensusStore& store);
ExperimentReport run_equidistribution(const ExperimentConfig& cfg, CensusStore& store);

Census cache_roundtrip(const SurfaceModel& s, const std::string& path);

struct WilsonInterval {
    double lo = 0.0, hi = 0.0;
};
WilsonInterval wilson(std::int64_t successes, std::int64_t n, double z = 1.959963984540054);

struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    int points = 0;
};
// Ordinary least squares of y on x; needs at least two points.
SlopeFit ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gclab
