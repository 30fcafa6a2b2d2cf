#include <cmath>

#include "doctest.h"
#include "gclab/census.hpp"
#include "gclab/errors.hpp"
#include "gclab/flow.hpp"
#include "gclab/intersect.hpp"

using namespace gclab;

namespace {

const SurfaceModel& bolza() {
    static const SurfaceModel s = with_computed_systole(build_surface(2, 1.0));
    return s;
}

bool in_window(double theta, const PhaseBox& b) {
    if (b.angular_width() >= kTwoPi) return true;
    const double x = normalize_angle(theta - b.theta1);
    return x < b.theta2 - b.theta1;
}

// Occupation by fine midpoint sampling along the chords.
double sampled_occupation(const std::vector<Chord>& chords, const PhaseBox& b, double step) {
    double inside = 0.0, total = 0.0;
    for (const Chord& c : chords) {
        const int n = std::max(1, static_cast<int>(std::ceil(c.length / step)));
        const double h = c.length / n;
        for (int k = 0; k < n; ++k) {
            const double t = (k + 0.5) * h;
            if (dist_unit(c.line.point(t), b.center.z()) <= b.radius && in_window(c.line.direction(t), b)) inside += h;
        }
        total += c.length;
    }
    return inside / total;
}

// Mean distance from the centre of a uniform point of the regular 4g-gon:
// in the wedge |phi| <= pi/n the boundary is at tanh R = tanh(d_m) / cos(phi).
double polygon_mean_radius(const SurfaceModel& s) {
    const int steps = 20000;
    const double half = kPi / s.side_count();
    double num = 0.0, den = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double phi = -half + (k + 0.5) * (2.0 * half / steps);
        const double R = std::atanh(std::tanh(s.inradius()) / std::cos(phi));
        num += R * std::cosh(R) - std::sinh(R);
        den += std::cosh(R) - 1.0;
    }
    return num / den;
}

}  // namespace

TEST_CASE("Liouville acceptance rate") {
    const SurfaceModel& s = bolza();
    const double closed = 4.0 * kPi / (2.0 * kPi * (std::cosh(s.vertex_radius()) - 1.0));
    CHECK(liouville_acceptance(s) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(closed == doctest::Approx(0.414).epsilon(0.002));
    // Count acceptances of the same ball proposal directly.
    Rng rng(2024);
    const double c = std::cosh(s.vertex_radius()) - 1.0;
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double r = std::acosh(1.0 + rng.uniform() * c);
        hits += contains(s, std::polar(std::tanh(0.5 * r), kTwoPi * rng.uniform()));
    }
    CHECK(std::abs(static_cast<double>(hits) / n - closed) < 0.02);
}

TEST_CASE("Liouville samples: reproducible, inside, with the right radial law") {
    const SurfaceModel& s = bolza();
    Rng a(5), b(5);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const UnitTangent u = sample_liouville(s, a), v = sample_liouville(s, b);
        CHECK_UNARY(u.base.z() == v.base.z() && u.angle == v.angle);
        if (i % 100 == 0) CHECK(contains(s, u.base.z()));
        sum += dist_unit(0.0, u.base.z());
    }
    CHECK(std::abs(sum / n / polygon_mean_radius(s) - 1.0) < 0.01);
}

TEST_CASE("short arcs are a single chord") {
    const SurfaceModel& s = bolza();
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const UnitTangent v = sample_liouville(s, rng);
        const ArcTrace a = trace_arc(s, v, 1e-6);
        REQUIRE(a.chords.size() == 1);
        CHECK(a.chords[0].length == doctest::Approx(1e-6));
        CHECK(std::abs(a.chords[0].start() - v.base.z()) < 1e-12);
    }
}

TEST_CASE("arc invariants and concatenation") {
    const SurfaceModel& s = bolza();
    for (std::uint64_t i = 0; i < 10000; ++i) {
        Rng rng = Rng::substream(11, i);
        const UnitTangent v = sample_liouville(s, rng);
        const double t1 = 0.5 + 8.0 * rng.uniform(), t2 = 0.5 + 8.0 * rng.uniform();
        const ArcTrace whole = trace_arc(s, v, t1 + t2);
        double sum = 0.0;
        for (const Chord& c : whole.chords) sum += c.length;
        CHECK(std::abs(sum - (t1 + t2)) < 1e-6);
        REQUIRE(whole.transitions.size() + 1 == whole.chords.size());
        for (std::size_t k = 0; k + 1 < whole.chords.size(); ++k) {
            const int side = whole.transitions[k];
            CHECK(std::abs(s.pairing(side)(whole.chords[k].end()) - whole.chords[k + 1].start()) < 1e-8);
        }
        const ArcTrace first = trace_arc(s, v, t1);
        const ArcTrace second = trace_arc(s, first.end(), t2);
        const UnitTangent e1 = whole.end(), e2 = second.end();
        CHECK(std::abs(e1.base.z() - e2.base.z()) < 1e-8);
        CHECK(angular_gap(e1.angle, e2.angle) < 1e-8);
        // Chord boundaries of the whole arc are those of the two pieces.
        std::vector<cplx> ends;
        for (const ArcTrace* a : {&first, &second})
            for (const Chord& c : a->chords)
                if (c.length > 1e-7) ends.push_back(c.end());
        std::size_t matched = 0;
        for (const Chord& c : whole.chords)
            for (const cplx& z : ends) matched += c.length > 1e-7 && std::abs(c.end() - z) < 1e-8;
        CHECK(matched + 1 >= ends.size());
        // Self-crossings split into those of each piece and those between them.
        const std::int64_t total = arc_T_count(s, whole, whole, true);
        CHECK(total == arc_T_count(s, first, first, true) + arc_T_count(s, second, second, true) +
                           arc_T_count(s, first, second, false));
    }
}

TEST_CASE("chord counts stay in the sanity band") {
    // A chord is at most 2 d_v long, which bounds every arc; the mean count
    // lies in [T / d_v, 5 T].
    const SurfaceModel& s = bolza();
    const double T = 20.0;
    Rng rng(8);
    double total = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        const ArcTrace a = trace_arc(s, sample_liouville(s, rng), T);
        CHECK(static_cast<double>(a.chords.size()) >= T / (2.0 * s.vertex_radius()));
        CHECK(static_cast<double>(a.chords.size()) <= 5.0 * T);
        total += static_cast<double>(a.chords.size());
    }
    CHECK(total / n >= T / s.vertex_radius());
    CHECK(total / n <= 5.0 * T);
}

TEST_CASE("curvature scaling of arcs") {
    const SurfaceModel s4 = build_surface(2, 4.0);
    const SurfaceModel& s1 = bolza();
    Rng a(9), b(9);
    for (int i = 0; i < 200; ++i) {
        const UnitTangent u = sample_liouville(s1, a), v = sample_liouville(s4, b);
        CHECK(u.base.z() == v.base.z());
        const ArcTrace x = trace_arc(s1, u, 10.0), y = trace_arc(s4, v, 5.0);
        REQUIRE(x.chords.size() == y.chords.size());
        CHECK(std::abs(x.end().base.z() - y.end().base.z()) < 1e-9);
    }
}

TEST_CASE("occupation of trivial boxes") {
    const SurfaceModel& s = bolza();
    const PhaseBox everything{DiskPoint(cplx(0.0, 0.0)), 3.0, 0.0, kTwoPi};
    const PhaseBox no_directions{DiskPoint(cplx(0.0, 0.0)), 3.0, 1.0, 1.0};
    const PhaseBox far_away{DiskPoint(cplx(0.0, 0.0)), 1e-12, 0.0, kTwoPi};
    Rng rng(4);
    for (int i = 0; i < 500; ++i) {
        const ArcTrace a = trace_arc(s, sample_liouville(s, rng), 15.0);
        CHECK(occupation_fraction(s, a, everything) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(occupation_fraction(s, a, no_directions) == 0.0);
        CHECK(occupation_fraction(s, a, far_away) <= 1e-11);
    }
    // The quadrature converges to the exact area of the polygon.
    CHECK(std::abs(box_measure(s, everything) - 1.0) < 2e-5);
    CHECK(std::abs(box_measure(s, everything, 65536) - 1.0) < 1e-7);
    CHECK(box_measure(s, no_directions) == 0.0);
    const PhaseBox half{DiskPoint(cplx(0.0, 0.0)), 3.0, 0.0, kPi};
    CHECK(box_measure(s, half) == doctest::Approx(0.5 * box_measure(s, everything)).epsilon(1e-12));
}

TEST_CASE("occupation matches fine sampling") {
    const SurfaceModel& s = bolza();
    const std::vector<PhaseBox> boxes = default_box_suite();
    Rng rng(12);
    for (int i = 0; i < 60; ++i) {
        const ArcTrace a = trace_arc(s, sample_liouville(s, rng), 12.0);
        for (const PhaseBox& b : boxes) CHECK(std::abs(occupation_fraction(s, a, b) - sampled_occupation(a.chords, b, 1e-4)) < 1e-3);
    }
}

TEST_CASE("box measure matches Liouville sampling") {
    const SurfaceModel& s = bolza();
    const std::vector<PhaseBox> boxes = default_box_suite();
    std::vector<int> hits(boxes.size(), 0);
    Rng rng(77);
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const UnitTangent v = sample_liouville(s, rng);
        for (std::size_t k = 0; k < boxes.size(); ++k)
            hits[k] += dist_unit(v.base.z(), boxes[k].center.z()) <= boxes[k].radius && in_window(v.angle, boxes[k]);
    }
    for (std::size_t k = 0; k < boxes.size(); ++k) {
        const double p = box_measure(s, boxes[k]);
        const double sigma = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(static_cast<double>(hits[k]) / n - p) < 4.0 * sigma);
    }
}

TEST_CASE("long arcs equidistribute") {
    const SurfaceModel& s = bolza();
    const PhaseBox box = default_box_suite()[0];
    const double target = box_measure(s, box);
    int good = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        Rng rng = Rng::substream(200, i);
        good += std::abs(occupation_fraction(s, trace_arc(s, sample_liouville(s, rng), 200.0), box) - target) <= 0.05;
    }
    CHECK(good >= 90);
}

TEST_CASE("the flow preserves the Liouville measure") {
    // The law of phi^t v for Liouville v and uniform t in [0, T] is the mean
    // occupation measure of the arcs, which integrates t exactly.
    const SurfaceModel& s = bolza();
    const std::vector<PhaseBox> boxes = default_box_suite();
    const int n = 1000;
    std::vector<double> sum(boxes.size(), 0.0), sumsq(boxes.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::substream(300, static_cast<std::uint64_t>(i));
        const ArcTrace a = trace_arc(s, sample_liouville(s, rng), 100.0);
        for (std::size_t k = 0; k < boxes.size(); ++k) {
            const double x = occupation_fraction(s, a, boxes[k]);
            sum[k] += x;
            sumsq[k] += x * x;
        }
    }
    for (std::size_t k = 0; k < boxes.size(); ++k) {
        const double mean = sum[k] / n;
        const double sd = std::sqrt(std::max(0.0, sumsq[k] / n - mean * mean) * n / (n - 1));
        CHECK(std::abs(mean - box_measure(s, boxes[k])) < 3.0 * sd / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("closed geodesic occupation equals its wrap-mode arc") {
    const SurfaceModel& s = bolza();
    const Census c = enumerate_census(s, 6.0);
    for (const ClosedGeodesic& g : c.items)
        for (const PhaseBox& b : default_box_suite())
            CHECK(std::abs(occupation_fraction(s, g, b) - occupation_fraction(s, wrap_arc(s, g), b)) < 1e-9);
}
