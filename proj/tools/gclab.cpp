#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gclab/errors.hpp"
#include "gclab/harness.hpp"

namespace {

std::vector<gclab::PhaseBox> load_boxes(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw gclab::Error("cannot open box file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw gclab::Error("box file " + path + ": " + e.what());
    }
    if (!j.is_array()) throw gclab::Error("box file must hold a JSON list");
    std::vector<gclab::PhaseBox> boxes;
    for (const auto& b : j) {
        gclab::PhaseBox box;
        box.center = {b.at("center").at(0).get<double>(), b.at("center").at(1).get<double>()};
        box.radius = b.at("radius").get<double>();
        box.theta1 = b.at("theta1").get<double>();
        box.theta2 = b.at("theta2").get<double>();
        boxes.push_back(box);
    }
    return boxes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed geodesic statistics on compact hyperbolic surfaces"};
    app.require_subcommand(1);

    gclab::ExperimentConfig cfg;
    std::string out = ".";
    std::string format = "csv";
    std::vector<double> census_lengths{7.0};
    std::string boxes_file;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", out, "Output directory");
        sub->add_option("--jobs", cfg.jobs, "Worker threads (0: all cores)");
        sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", cfg.seed, "Random seed");
        sub->add_option("--genus", cfg.genus, "Surface genus")->check(CLI::Range(2, 13));
        sub->add_option("--kappa", cfg.kappa, "Curvature magnitude");
        sub->add_option("--cache", cfg.cache_dir, "Census cache directory");
        sub->add_option("--max-tiles", cfg.tile_budget, "Census search limit");
        sub->add_flag("--allow-incomplete", cfg.allow_incomplete, "Run on incomplete censuses and watermark reports");
    };

    auto* census = app.add_subcommand("census", "Enumerate primitive closed geodesics up to a length");
    common(census);
    census->add_option("--max-length,--T", census_lengths, "Length cutoff(s)")->expected(1, -1);

    auto* pairs = app.add_subcommand("pairs", "Normalized intersection statistics over census pairs");
    common(pairs);
    pairs->add_option("--R", cfg.R, "Cutoff for the first curve");
    pairs->add_option("--T", cfg.T, "Cutoff for the second curve");
    pairs->add_option("--eps-list", cfg.eps_list, "Absolute deviation thresholds")->expected(1, -1);
    pairs->add_option("--R-ladder", cfg.R_ladder, "Cutoffs for the tail-slope fit")->expected(1, -1);
    pairs->add_option("--pair-budget", cfg.pair_budget, "Pairs evaluated before subsampling");

    auto* arcs = app.add_subcommand("arc-tails", "Self-intersection deviations of random geodesic arcs");
    common(arcs);
    arcs->add_option("--T-list", cfg.arc_lengths, "Arc lengths")->expected(1, -1);
    arcs->add_option("--samples", cfg.samples, "Arcs per length");
    arcs->add_option("--eps", cfg.arc_eps, "Deviation threshold (default 0.5 C*)");

    auto* closed = app.add_subcommand("closed-tails", "Self-intersection concentration over censuses");
    common(closed);
    closed->add_option("--T-list", cfg.closed_lengths, "Census cutoffs")->expected(1, -1);
    closed->add_option("--eps", cfg.closed_eps, "Deviation threshold (default C*)");

    auto* equi = app.add_subcommand("equidist", "Census occupation of phase-space boxes");
    common(equi);
    equi->add_option("--T", cfg.equidist_lengths, "Census cutoff(s)")->expected(1, -1);
    equi->add_option("--boxes", boxes_file, "JSON list of {center: [re, im], radius, theta1, theta2}");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!boxes_file.empty()) cfg.boxes = load_boxes(boxes_file);
        cfg.validate();
        gclab::CensusStore store(cfg);
        gclab::ExperimentReport report;
        if (*census) report = gclab::run_census(cfg, store, census_lengths);
        else if (*pairs) report = gclab::run_pair_stats(cfg, store);
        else if (*arcs) report = gclab::run_arc_tails(cfg, store);
        else if (*closed) report = gclab::run_closed_tails(cfg, store);
        else report = gclab::run_equidistribution(cfg, store);
        gclab::write_report(report, out, format);
        if (report.watermarked) std::cerr << "warning: report built on an incomplete census\n";
        return 0;
    } catch (const gclab::IncompleteCensusError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 2;
    } catch (const gclab::AuditError& e) {
        std::cerr << "audit failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
