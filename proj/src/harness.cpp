#include "gclab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gclab/errors.hpp"
#include "gclab/intersect.hpp"
#include "gclab/parallel.hpp"
#include "gclab/rng.hpp"

namespace gclab {

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;

std::string fmt(double x) { return format_param(x); }

std::string fmt_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? " " : "") + fmt(xs[i]);
    return out;
}

std::vector<double> resolved_eps(const ExperimentConfig& cfg, double c_star) {
    if (!cfg.eps_list.empty()) return cfg.eps_list;
    return {0.25 * c_star, 0.5 * c_star, c_star};
}

void base_config(const ExperimentConfig& cfg, ExperimentReport& r) {
    // Parallelism and paths do not affect results and are left out, so reports
    // are byte-identical across them.
    r.config = {{"genus", std::to_string(cfg.genus)}, {"kappa", fmt(cfg.kappa)}, {"seed", std::to_string(cfg.seed)},
                {"allow_incomplete", cfg.allow_incomplete ? "1" : "0"}};
}

void finish(const ExperimentConfig& cfg, CensusStore& store, ExperimentReport& r) {
    r.provenance = {{"seed", std::to_string(cfg.seed)}, {"code_version", kCodeVersion}, {"census", store.ids()}};
    if (store.any_incomplete()) {
        r.watermarked = true;
        r.provenance.emplace_back("watermark", "INCOMPLETE CENSUS (--allow-incomplete)");
    }
}

}  // namespace

std::string format_param(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void ExperimentConfig::validate() const {
    if (genus < 2) throw Error("genus must be at least 2");
    if (!(kappa > 0.0)) throw Error("kappa must be positive");
    if (!(R > 0.0) || !(R <= T)) throw Error("need 0 < R <= T");
    for (double e : eps_list)
        if (!(e > 0.0)) throw Error("eps values must be positive");
    if (arc_eps < 0.0 || closed_eps < 0.0) throw Error("eps values must be positive");
    if (samples < 1) throw Error("sample count must be at least 1");
    if (pair_budget < 1) throw Error("pair budget must be at least 1");
    if (tile_budget < 1) throw Error("tile budget must be at least 1");
    for (const auto* list : {&R_ladder, &arc_lengths, &closed_lengths, &equidist_lengths})
        for (double x : *list)
            if (!(x > 0.0)) throw Error("lengths must be positive");
    for (const PhaseBox& b : boxes)
        if (!(b.radius > 0.0) || !(b.angular_width() > 0.0)) throw Error("phase boxes need positive measure");
}

void ExperimentReport::add(std::string statistic, Params params, double value) {
    rows.push_back({std::move(statistic), std::move(params), format_double(value)});
}

void ExperimentReport::add(std::string statistic, Params params, std::int64_t value) {
    rows.push_back({std::move(statistic), std::move(params), std::to_string(value)});
}

void ExperimentReport::add_text(std::string statistic, Params params, std::string value) {
    rows.push_back({std::move(statistic), std::move(params), std::move(value)});
}

double ExperimentReport::value(const std::string& statistic, const Params& params) const {
    for (const ReportRow& row : rows) {
        if (row.statistic != statistic) continue;
        bool match = true;
        for (const auto& p : params)
            match = match && std::find(row.params.begin(), row.params.end(), p) != row.params.end();
        if (match) return std::stod(row.value);
    }
    throw Error("report " + experiment + " has no row " + statistic);
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream out;
    out << "experiment,statistic,params,value\n";
    for (const auto& [k, v] : provenance) out << experiment << ",provenance." << k << ",," << v << "\n";
    for (const auto& [k, v] : config) out << experiment << ",config." << k << ",," << v << "\n";
    for (const ReportRow& row : rows) {
        std::string p;
        for (std::size_t i = 0; i < row.params.size(); ++i)
            p += (i ? ";" : "") + row.params[i].first + "=" + row.params[i].second;
        out << experiment << "," << row.statistic << "," << p << "," << row.value << "\n";
    }
    return out.str();
}

std::string ExperimentReport::to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["watermarked"] = watermarked;
    for (const auto& [k, v] : config) j["config"][k] = v;
    for (const auto& [k, v] : provenance) j["provenance"][k] = v;
    j["rows"] = nlohmann::ordered_json::array();
    for (const ReportRow& row : rows) {
        nlohmann::ordered_json r;
        r["statistic"] = row.statistic;
        r["params"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : row.params) r["params"][k] = v;
        r["value"] = row.value;
        j["rows"].push_back(r);
    }
    return j.dump(2) + "\n";
}

void write_report(const ExperimentReport& r, const std::string& dir, const std::string& format) {
    if (format != "csv" && format != "json") throw Error("format must be csv or json");
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / (r.experiment + "." + format)).string();
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write report " + tmp);
        f << (format == "csv" ? r.to_csv() : r.to_json());
        if (!f) throw Error("failed writing report " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string census_id(const Census& c) {
    return "g=" + std::to_string(c.genus) + ";kappa=" + fmt(c.kappa) + ";T=" + fmt(c.max_length) +
           ";N=" + std::to_string(c.size()) + ";complete=" + (c.complete ? "1" : "0");
}

std::string cache_path(const std::string& dir, int genus, double kappa, double T) {
    return (std::filesystem::path(dir) / ("census_g" + std::to_string(genus) + "_k" + fmt(kappa) + "_T" + fmt(T) + "_" +
                                          kCodeVersion + ".txt"))
        .string();
}

CensusStore::CensusStore(const ExperimentConfig& cfg)
    : cfg_(cfg), surface_(with_computed_systole(build_surface(cfg.genus, cfg.kappa))) {}

const Census& CensusStore::get(double T) {
    auto it = censuses_.find(T);
    if (it == censuses_.end()) {
        std::unique_ptr<Census> c;
        std::string path;
        if (!cfg_.cache_dir.empty()) {
            std::filesystem::create_directories(cfg_.cache_dir);
            path = cache_path(cfg_.cache_dir, cfg_.genus, cfg_.kappa, T);
            if (std::filesystem::exists(path)) {
                try {
                    c = std::make_unique<Census>(load_census(surface_, path));
                    if (c->max_length != T || !c->complete) c.reset();
                } catch (const Error&) {
                    c.reset();  // stale or damaged cache: rebuild and overwrite
                }
            }
        }
        if (!c) {
            CensusOptions opts;
            opts.jobs = cfg_.jobs;
            opts.max_tiles = cfg_.tile_budget;
            c = std::make_unique<Census>(enumerate_census(surface_, T, opts));
            if (!path.empty()) save_census(*c, path);
        }
        it = censuses_.emplace(T, std::move(c)).first;
    }
    if (!it->second->complete) {
        if (!cfg_.allow_incomplete)
            throw IncompleteCensusError("census at T=" + fmt(T) + " is incomplete; rerun with --allow-incomplete");
        any_incomplete_ = true;
    }
    return *it->second;
}

std::string CensusStore::ids() const {
    std::string out;
    for (const auto& [T, c] : censuses_) out += (out.empty() ? "" : " | ") + census_id(*c);
    return out;
}

WilsonInterval wilson(std::int64_t successes, std::int64_t n, double z) {
    if (n <= 0) return {0.0, 1.0};
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    const double nn = static_cast<double>(n);
    const double den = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2.0 * nn)) / den;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / den;
    return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == n ? 1.0 : std::min(1.0, centre + half)};
}

SlopeFit ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    SlopeFit f;
    f.points = static_cast<int>(x.size());
    if (x.size() < 2) return f;
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    f.slope = sxy / sxx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - my - f.slope * (x[i] - mx);
            rss += e * e;
        }
        f.stderr_ = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return f;
}

ExperimentReport run_census(const ExperimentConfig& cfg, CensusStore& store, const std::vector<double>& lengths) {
    cfg.validate();
    ExperimentReport r;
    r.experiment = "census";
    base_config(cfg, r);
    r.config.emplace_back("lengths", fmt_list(lengths));
    const SurfaceModel& s = store.surface();
    r.add("systole", {}, *s.systole());
    r.add("injectivity_radius", {}, s.rho());
    r.add("area", {}, s.area());
    r.add("c_star", {}, s.c_star());
    for (double T : lengths) {
        const Census& c = store.get(T);
        const Params p{{"T", fmt(T)}};
        r.add("count", p, static_cast<std::int64_t>(c.size()));
        r.add("complete", p, static_cast<std::int64_t>(c.complete));
        r.add("epsilon0", p, c.epsilon0);
        std::int64_t at_systole = 0;
        std::size_t longest = 0;
        for (const ClosedGeodesic& g : c.items) {
            if (std::abs(g.length - *s.systole()) < 1e-6) ++at_systole;
            longest = std::max(longest, g.word.size());
        }
        r.add("systole_multiplicity", p, at_systole);
        r.add("max_word_length", p, static_cast<std::int64_t>(longest));
        if (c.complete) r.add("huber_ratio", p, huber_ratio(c));
    }
    finish(cfg, store, r);
    return r;
}

namespace {

struct PairSample {
    std::vector<double> values;
    std::int64_t population = 0;
    bool sampled = false;
};

PairSample pair_values(const SurfaceModel& s, const Census& cr, const Census& ct, const ExperimentConfig& cfg,
                       std::uint64_t stream) {
    PairSample out;
    const std::size_t nr = cr.size(), nt = ct.size();
    out.population = static_cast<std::int64_t>(nr) * static_cast<std::int64_t>(nt);
    if (static_cast<std::size_t>(out.population) <= cfg.pair_budget) {
        out.values.assign(nr * nt, 0.0);
        parallel_for(nr, cfg.jobs, [&](std::size_t i) {
            for (std::size_t j = 0; j < nt; ++j)
                out.values[i * nt + j] = intersection_number(s, cr.items[i], ct.items[j]).normalized;
        });
        return out;
    }
    out.sampled = true;
    Rng rng = Rng::substream(cfg.seed, stream);
    std::vector<std::pair<std::size_t, std::size_t>> picks(cfg.pair_budget);
    for (auto& pk : picks) pk = {rng.below(nr), rng.below(nt)};
    out.values.assign(picks.size(), 0.0);
    parallel_for(picks.size(), cfg.jobs, [&](std::size_t k) {
        out.values[k] = intersection_number(s, cr.items[picks[k].first], ct.items[picks[k].second]).normalized;
    });
    return out;
}

struct PairSummary {
    double mean = 0.0, sd = 0.0, max = 0.0;
    std::vector<double> tails;
    std::int64_t n = 0;
};

PairSummary summarize(const std::vector<double>& v, double c_star, const std::vector<double>& eps) {
    PairSummary s;
    s.n = static_cast<std::int64_t>(v.size());
    s.tails.assign(eps.size(), 0.0);
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) {
        sum += x;
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        std::int64_t c = 0;
        for (double x : v) c += std::abs(x - c_star) >= eps[k];
        s.tails[k] = static_cast<double>(c) / static_cast<double>(v.size());
    }
    return s;
}

}  // namespace

ExperimentReport run_pair_stats(const ExperimentConfig& cfg, CensusStore& store) {
    cfg.validate();
    const SurfaceModel& s = store.surface();
    const double c_star = s.c_star();
    const std::vector<double> eps = resolved_eps(cfg, c_star);
    const double bound = 1.0 / (s.rho() * s.rho());

    ExperimentReport r;
    r.experiment = "pairs";
    base_config(cfg, r);
    r.config.emplace_back("R", fmt(cfg.R));
    r.config.emplace_back("T", fmt(cfg.T));
    r.config.emplace_back("R_ladder", fmt_list(cfg.R_ladder));
    r.config.emplace_back("eps_list", fmt_list(eps));
    r.config.emplace_back("pair_budget", std::to_string(cfg.pair_budget));
    r.add("c_star", {}, c_star);
    r.add("bound_inverse_rho_squared", {}, bound);

    auto report_cell = [&](double R, double T, std::uint64_t stream) {
        const PairSample ps = pair_values(s, store.get(R), store.get(T), cfg, stream);
        const PairSummary sm = summarize(ps.values, c_star, eps);
        const Params p{{"R", fmt(R)}, {"T", fmt(T)}};
        r.add("pairs_total", p, ps.population);
        r.add("pairs_used", p, sm.n);
        r.add("subsampled", p, static_cast<std::int64_t>(ps.sampled));
        r.add("mean_normalized", p, sm.mean);
        r.add("mean_over_c_star", p, sm.mean / c_star);
        r.add("mean_standard_error", p, ps.sampled ? sm.sd / std::sqrt(static_cast<double>(sm.n)) : 0.0);
        r.add("max_normalized", p, sm.max);
        r.add("audit_violations", p, static_cast<std::int64_t>(sm.max > bound * (1.0 + 1e-12)));
        for (std::size_t k = 0; k < eps.size(); ++k) {
            Params pe = p;
            pe.emplace_back("eps", fmt(eps[k]));
            r.add("tail_fraction", pe, sm.tails[k]);
        }
        return sm;
    };

    report_cell(cfg.R, cfg.T, 0);
    std::vector<std::vector<double>> ladder_tails(eps.size());
    for (std::size_t i = 0; i < cfg.R_ladder.size(); ++i) {
        const double R = cfg.R_ladder[i];
        const bool same_cell = R == cfg.R && R == cfg.T;
        const PairSummary sm = same_cell ? summarize(pair_values(s, store.get(R), store.get(R), cfg, 0).values, c_star, eps)
                                         : report_cell(R, R, i + 1);
        for (std::size_t k = 0; k < eps.size(); ++k) ladder_tails[k].push_back(sm.tails[k]);
    }
    for (std::size_t k = 0; k < eps.size(); ++k) {
        std::vector<double> xs, ys;
        std::int64_t censored = 0;
        for (std::size_t i = 0; i < cfg.R_ladder.size(); ++i) {
            if (ladder_tails[k][i] > 0.0) {
                xs.push_back(cfg.R_ladder[i]);
                ys.push_back(std::log(ladder_tails[k][i]));
            } else {
                ++censored;
            }
        }
        const SlopeFit f = ols_slope(xs, ys);
        const Params pe{{"eps", fmt(eps[k])}};
        r.add("tail_slope", pe, f.slope);
        r.add("tail_slope_stderr", pe, f.stderr_);
        r.add("tail_slope_points", pe, static_cast<std::int64_t>(f.points));
        r.add("tail_slope_censored", pe, censored);
    }
    finish(cfg, store, r);
    return r;
}

ExperimentReport run_arc_tails(const ExperimentConfig& cfg, CensusStore& store) {
    cfg.validate();
    const SurfaceModel& s = store.surface();
    const double c_star = s.c_star();
    const double eps = cfg.arc_eps > 0.0 ? cfg.arc_eps : 0.5 * c_star;

    ExperimentReport r;
    r.experiment = "arc_tails";
    base_config(cfg, r);
    r.config.emplace_back("arc_lengths", fmt_list(cfg.arc_lengths));
    r.config.emplace_back("samples", std::to_string(cfg.samples));
    r.config.emplace_back("eps", fmt(eps));
    r.add("c_star", {}, c_star);

    std::vector<double> xs, ys;
    for (std::size_t ti = 0; ti < cfg.arc_lengths.size(); ++ti) {
        const double T = cfg.arc_lengths[ti];
        const std::size_t n = static_cast<std::size_t>(cfg.samples);
        std::vector<std::int64_t> counts(n), chords(n);
        parallel_for(n, cfg.jobs, [&](std::size_t i) {
            Rng rng = Rng::substream(cfg.seed ^ (0x9E3779B97F4A7C15ull * (ti + 1)), i);
            const ArcTrace arc = trace_arc(s, sample_liouville(s, rng), T);
            counts[i] = arc_T_count(s, arc, arc, true);
            chords[i] = static_cast<std::int64_t>(arc.chords.size());
        });
        double sum_pts = 0.0, max_form = 0.0, sum_chords = 0.0;
        std::int64_t dev_form = 0, dev_pts = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pts = static_cast<double>(counts[i]) / (T * T);
            sum_pts += pts;
            max_form = std::max(max_form, 2.0 * pts);
            dev_form += std::abs(2.0 * pts - c_star) >= eps;
            dev_pts += std::abs(pts - c_star) >= eps;
            sum_chords += static_cast<double>(chords[i]);
        }
        const double nn = static_cast<double>(n);
        const double f = static_cast<double>(dev_form) / nn;
        const WilsonInterval ci = wilson(dev_form, static_cast<std::int64_t>(n));
        const Params p{{"T", fmt(T)}};
        r.add("samples", p, static_cast<std::int64_t>(n));
        r.add("mean_form_over_T2", p, 2.0 * sum_pts / nn);
        r.add("mean_form_over_c_star", p, 2.0 * sum_pts / nn / c_star);
        r.add("mean_points_over_T2", p, sum_pts / nn);
        r.add("max_form_over_T2", p, max_form);
        r.add("deviation_fraction", p, f);
        r.add("deviation_ci_low", p, ci.lo);
        r.add("deviation_ci_high", p, ci.hi);
        r.add("deviation_fraction_points", p, static_cast<double>(dev_pts) / nn);
        r.add("mean_chords", p, sum_chords / nn);
        if (f > 0.0) {
            xs.push_back(T);
            ys.push_back(std::log(f));
        }
    }
    const SlopeFit fit = ols_slope(xs, ys);
    r.add("tail_slope", {}, fit.slope);
    r.add("tail_slope_stderr", {}, fit.stderr_);
    r.add("tail_slope_points", {}, static_cast<std::int64_t>(fit.points));
    r.add("tail_slope_censored", {}, static_cast<std::int64_t>(cfg.arc_lengths.size()) - fit.points);
    finish(cfg, store, r);
    return r;
}

ExperimentReport run_closed_tails(const ExperimentConfig& cfg, CensusStore& store) {
    cfg.validate();
    const SurfaceModel& s = store.surface();
    const double c_star = s.c_star();
    const double eps = cfg.closed_eps > 0.0 ? cfg.closed_eps : c_star;

    ExperimentReport r;
    r.experiment = "closed_tails";
    base_config(cfg, r);
    r.config.emplace_back("closed_lengths", fmt_list(cfg.closed_lengths));
    r.config.emplace_back("eps", fmt(eps));
    r.add("c_star", {}, c_star);
    for (double T : cfg.closed_lengths) {
        const Census& c = store.get(T);
        std::vector<std::int64_t> self(c.size());
        parallel_for(c.size(), cfg.jobs, [&](std::size_t i) { self[i] = self_intersection(s, c.items[i]); });
        double sum_pts = 0.0;
        std::int64_t close_form = 0, close_pts = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double l = c.items[i].length;
            const double pts = static_cast<double>(self[i]) / (l * l);
            sum_pts += pts;
            close_form += std::abs(2.0 * pts - c_star) < eps;
            close_pts += std::abs(pts - c_star) < eps;
        }
        const double n = std::max<double>(1.0, static_cast<double>(c.size()));
        const Params p{{"T", fmt(T)}};
        r.add("count", p, static_cast<std::int64_t>(c.size()));
        r.add("close_fraction", p, c.size() ? static_cast<double>(close_form) / n : 0.0);
        r.add("close_fraction_points", p, c.size() ? static_cast<double>(close_pts) / n : 0.0);
        r.add("mean_form_over_l2", p, 2.0 * sum_pts / n);
        r.add("mean_points_over_l2", p, sum_pts / n);
    }
    finish(cfg, store, r);
    return r;
}

ExperimentReport run_equidistribution(const ExperimentConfig& cfg, CensusStore& store) {
    cfg.validate();
    const SurfaceModel& s = store.surface();
    ExperimentReport r;
    r.experiment = "equidistribution";
    base_config(cfg, r);
    r.config.emplace_back("lengths", fmt_list(cfg.equidist_lengths));
    r.config.emplace_back("boxes", std::to_string(cfg.boxes.size()));

    std::vector<double> target(cfg.boxes.size());
    for (std::size_t b = 0; b < cfg.boxes.size(); ++b) {
        target[b] = box_measure(s, cfg.boxes[b]);
        r.add("box_measure", {{"box", std::to_string(b)}}, target[b]);
    }
    for (double T : cfg.equidist_lengths) {
        const Census& c = store.get(T);
        std::vector<std::vector<double>> occ(c.size(), std::vector<double>(cfg.boxes.size()));
        parallel_for(c.size(), cfg.jobs, [&](std::size_t i) {
            for (std::size_t b = 0; b < cfg.boxes.size(); ++b) occ[i][b] = occupation_fraction(s, c.items[i], cfg.boxes[b]);
        });
        double mean_dev = 0.0, max_dev = 0.0;
        for (std::size_t b = 0; b < cfg.boxes.size(); ++b) {
            double sum = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) sum += occ[i][b];
            const double avg = c.size() ? sum / static_cast<double>(c.size()) : 0.0;
            const double dev = std::abs(avg - target[b]);
            mean_dev += dev;
            max_dev = std::max(max_dev, dev);
            const Params p{{"T", fmt(T)}, {"box", std::to_string(b)}};
            r.add("census_occupation", p, avg);
            r.add("deviation", p, dev);
        }
        const Params p{{"T", fmt(T)}};
        r.add("count", p, static_cast<std::int64_t>(c.size()));
        r.add("mean_deviation", p, cfg.boxes.empty() ? 0.0 : mean_dev / static_cast<double>(cfg.boxes.size()));
        r.add("max_deviation", p, max_dev);
    }
    finish(cfg, store, r);
    return r;
}

Census cache_roundtrip(const SurfaceModel& s, const std::string& path) { return load_census(s, path); }

}  // namespace gclab
