#include <cmath>
#include <random>

#include "doctest.h"
#include "gclab/errors.hpp"
#include "gclab/intersect.hpp"
#include "gclab/rng.hpp"
#include "oracles.hpp"

using namespace gclab;

namespace {

const SurfaceModel& bolza() {
    static const SurfaceModel s = with_computed_systole(build_surface(2, 1.0));
    return s;
}

const Census& census_at(double T) {
    static std::map<double, Census> cache;
    auto it = cache.find(T);
    if (it == cache.end()) it = cache.emplace(T, enumerate_census(bolza(), T)).first;
    return it->second;
}

// Diameter through the midpoints of sides k and k + 4, from side k + 4 to side k.
Chord diameter(const SurfaceModel& s, int k) {
    const double theta = kTwoPi * k / s.side_count();
    return {Geodesic::from_tangent(cplx(0.0, 0.0), theta).shifted(-s.inradius()), 2.0 * s.inradius(),
            s.paired_side(k), k, 0.0};
}

bool same_class(const SurfaceModel& s, const ClosedGeodesic& a, const ClosedGeodesic& b) {
    return a.word == b.word || canonical_conjugacy(s, b.word.inverse()).word == a.word;
}

}  // namespace

TEST_CASE("chord crossing basics") {
    const SurfaceModel& s = bolza();
    const std::vector<Chord> one{diameter(s, 0)}, other{diameter(s, 2)}, diag{diameter(s, 1)};
    CHECK(chord_crossings(s, one, one, false).count == 0);
    CHECK(chord_crossings(s, one, other, false).count == 1);
    CHECK(chord_crossings(s, other, one, false).count == 1);
    const std::vector<Chord> three{diameter(s, 0), diameter(s, 1), diameter(s, 2)};
    const CrossingReport r = chord_crossings(s, three, three, true, true);
    // All three meet at the origin: three crossing pairs at one point.
    CHECK(r.count == 3);
    CHECK(r.coincident_points == 3);
    CHECK(r.angles.size() == 3);
    CHECK(r.boundary_events == 0);
    CHECK(chord_crossings(s, one, diag, false).count == 1);
}

TEST_CASE("systole geodesics are simple") {
    for (const ClosedGeodesic& g : census_at(3.06).items) CHECK(self_intersection(bolza(), g) == 0);
}

TEST_CASE("chord crossings agree with axis linking on census(5.5)") {
    const SurfaceModel& s = bolza();
    const Census& c = census_at(5.5);
    double longest = 0.0;
    for (const ClosedGeodesic& g : c.items) longest = std::max(longest, g.unit_length);
    const std::vector<Isometry> ball = oracle::group_ball(s, 2.0 * s.vertex_radius() + 0.3 + longest);
    std::int64_t total = 0;
    for (const ClosedGeodesic& a : c.items)
        for (const ClosedGeodesic& b : c.items) {
            const std::int64_t i = intersection_number(s, a, b).i;
            CHECK(i == oracle::linking_count(s, a, b, ball, same_class(s, a, b)));
            total += i;
        }
    CHECK(total == 1920);
}

TEST_CASE("self-intersections agree with axis linking on census(7)") {
    const SurfaceModel& s = bolza();
    const Census& c = census_at(7.0);
    const std::vector<Isometry> ball = oracle::group_ball(s, 2.0 * s.vertex_radius() + 0.3 + 7.0);
    int simple = 0;
    for (const ClosedGeodesic& g : c.items) {
        const std::int64_t i = self_intersection(s, g);
        CHECK(i == oracle::linking_count(s, g, g, ball, true));
        CHECK(i == self_intersection(s, reversed(s, g)));
        CHECK(intersection_number(s, g, g).i == i);
        CHECK(intersection_number(s, g, reversed(s, g)).i == i);
        simple += i == 0;
    }
    CHECK(simple == 96);
}

TEST_CASE("self-intersection of ab") {
    const SurfaceModel& s = bolza();
    const ClosedGeodesic g = make_closed_geodesic(s, GroupWord::parse("ab"));
    const std::vector<Isometry> ball = oracle::group_ball(s, 2.0 * s.vertex_radius() + 0.3 + g.unit_length);
    const std::int64_t i = self_intersection(s, g);
    CHECK(i == oracle::linking_count(s, g, g, ball, true));
    CHECK(i == 0);  // regression value, confirmed by the linking count
}

TEST_CASE("crossing a curve with its reverse") {
    // Overlapping chords are parallel; each self-intersection point is met
    // from both branches.
    const SurfaceModel& s = bolza();
    for (const ClosedGeodesic& g : census_at(7.0).items) {
        const ClosedGeodesic r = reversed(s, g);
        CHECK(chord_crossings(s, g.chords, r.chords, false).count == 2 * self_intersection(s, g));
    }
}

TEST_CASE("symmetry and the injectivity-radius bound on census(7)") {
    const SurfaceModel& s = bolza();
    const Census& c = census_at(7.0);
    const double bound = 1.0 / (s.rho() * s.rho());
    CHECK(bound == doctest::Approx(0.42798526193465).epsilon(1e-12));
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i; j < c.size(); ++j) {
            const Intersection ab = intersection_number(s, c.items[i], c.items[j]);
            const Intersection ba = intersection_number(s, c.items[j], c.items[i]);
            CHECK(ab.i == ba.i);
            CHECK(ab.normalized <= bound);
            worst = std::max(worst, ab.normalized);
        }
    CHECK(worst == doctest::Approx(0.13359577924010341).epsilon(1e-12));
}

TEST_CASE("intersection counts do not depend on the starting lift") {
    const SurfaceModel& s = bolza();
    const Census& c = census_at(5.5);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const ClosedGeodesic& a = c.items[rng() % c.size()];
        const ClosedGeodesic& b = c.items[rng() % c.size()];
        ClosedGeodesic moved = a;
        moved.chords = chord_decomposition(s, evaluate_word(s, a.word.rotated(rng() % a.word.size())));
        CHECK(intersection_number(s, moved, b).i == intersection_number(s, a, b).i);
        CHECK(self_intersection(s, moved) == self_intersection(s, a));
    }
}

TEST_CASE("wrap-mode arcs reproduce closed self-intersections") {
    const SurfaceModel& s = bolza();
    for (const ClosedGeodesic& g : census_at(7.0).items) {
        const ArcTrace arc = wrap_arc(s, g);
        CHECK(arc_T_count(s, arc, arc, true) == self_intersection(s, g));
    }
}

TEST_CASE("arc counts: short arcs, symmetry, monotonicity") {
    const SurfaceModel& s = bolza();
    for (std::uint64_t i = 0; i < 10000; ++i) {
        Rng rng = Rng::substream(99, i);
        const UnitTangent v = sample_liouville(s, rng);
        const UnitTangent w = sample_liouville(s, rng);
        const double t1 = 1.0 + 9.0 * rng.uniform();
        const double t2 = t1 + 6.0 * rng.uniform();
        const ArcTrace a1 = trace_arc(s, v, t1), a2 = trace_arc(s, v, t2), b = trace_arc(s, w, t1);
        // A self-crossing arc contains a loop, which is at least a systole long.
        if (i % 4 == 0) CHECK(arc_T_count(s, trace_arc(s, v, 0.99 * *s.systole()), trace_arc(s, v, 0.99 * *s.systole()), true) == 0);
        CHECK(arc_T_count(s, a1, a1, true) <= arc_T_count(s, a2, a2, true));
        CHECK(arc_T_count(s, a1, b, false) == arc_T_count(s, b, a1, false));
        CHECK(arc_T_count(s, a1, b, false) <= arc_T_count(s, a2, b, false));
        // Two copies of one arc overlap in parallel and cross at each
        // self-intersection point twice.
        CHECK(arc_T_count(s, a1, a1, false) == 2 * arc_T_count(s, a1, a1, true));
    }
}
