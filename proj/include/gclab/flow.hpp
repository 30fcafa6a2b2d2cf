#pragma once

// Geodesic flow on the unit tangent bundle: Liouville sampling, arc tracing and
// occupation measures.

#include <cstdint>
#include <vector>

#include "gclab/census.hpp"
#include "gclab/hyp.hpp"
#include "gclab/rng.hpp"
#include "gclab/surface.hpp"
#include "gclab/walk.hpp"

namespace gclab {

// Directions are Euclidean angles in the disk at the base point.
struct UnitTangent {
    DiskPoint base;
    double angle = 0.0;
};

struct ArcTrace {
    UnitTangent start;
    double T = 0.0;             // curvature-scaled length
    std::vector<Chord> chords;  // in order, unit-curvature parametrization
    std::vector<int> transitions;  // side exited at the end of each chord but the last
    Isometry cumulative;        // tile reached: the last chord lies in cumulative^-1 of the lift's tile

    UnitTangent end() const;
};

// Ball around a point (curvature-scaled radius) intersected with the domain,
// times the direction window [theta1, theta2) taken counter-clockwise.
struct PhaseBox {
    DiskPoint center;
    double radius = 0.0;
    double theta1 = 0.0;
    double theta2 = kTwoPi;

    double angular_width() const;
};

inline constexpr int kLiouvilleRejectionCap = 1'000'000;

UnitTangent sample_liouville(const SurfaceModel& s, Rng& rng);
double liouville_acceptance(const SurfaceModel& s);

ArcTrace trace_arc(const SurfaceModel& s, const UnitTangent& v, double T);

// Arc of length l(g) traced along g from a point inside one of its chords.
ArcTrace wrap_arc(const SurfaceModel& s, const ClosedGeodesic& g, double fraction = 0.3819660112501051);

// Fraction of the arc's length whose unit tangent lies in the box.
double occupation_fraction(const SurfaceModel& s, const ArcTrace& arc, const PhaseBox& box);
// Same, for the closed geodesic's own chords.
double occupation_fraction(const SurfaceModel& s, const ClosedGeodesic& g, const PhaseBox& box);

// Normalized Liouville measure of the box: angular fraction times
// area(ball and domain) / area(surface), by polar quadrature around the centre.
double box_measure(const SurfaceModel& s, const PhaseBox& box, int angular_steps = 4096);

// Default suite of six boxes used by the equidistribution experiment.
std::vector<PhaseBox> default_box_suite();

}  // namespace gclab
