#pragma once

// Geometric intersection numbers by counting chord crossings inside the
// fundamental polygon.
//
// A crossing point on a polygon side or vertex is seen by several chord pairs.
// It is attributed to the tile into which both curves, pushed slightly to their
// left, cross: the pair is counted iff the pushed crossing point lies in the
// open polygon. If the push runs along a side, the half-open side ownership
// rule decides.

#include <cstdint>
#include <span>
#include <vector>

#include "gclab/census.hpp"
#include "gclab/flow.hpp"
#include "gclab/surface.hpp"
#include "gclab/walk.hpp"

namespace gclab {

struct CrossingReport {
    std::int64_t count = 0;
    std::int64_t degenerate_events = 0;  // counted crossings with angle below 1e-7
    std::int64_t boundary_events = 0;    // crossing points on a side or vertex (counted or not)
    std::int64_t coincident_points = 0;  // pairs of counted crossings within 1e-8 of each other
    std::vector<double> angles;          // filled on request
};

inline constexpr double kTangentAngle = 1e-7;
inline constexpr double kCoincidentTol = 1e-8;

CrossingReport chord_crossings(const SurfaceModel& s, std::span<const Chord> a, std::span<const Chord> b,
                               bool same_list, bool record_angles = false);

struct Intersection {
    std::int64_t i = 0;
    double normalized = 0.0;  // i / (l_a l_b), curvature-scaled lengths
};

// i(a, b). When b is a or a reversed, this is the number of self-intersection
// points of a. Throws AuditError if normalized exceeds 1/rho^2 (when the
// surface knows its systole).
Intersection intersection_number(const SurfaceModel& s, const ClosedGeodesic& a, const ClosedGeodesic& b);

// Number of self-intersection points of g.
std::int64_t self_intersection(const SurfaceModel& s, const ClosedGeodesic& g);

// Transversal crossings of two arcs, or of one arc with itself when same is true.
std::int64_t arc_T_count(const SurfaceModel& s, const ArcTrace& a1, const ArcTrace& a2, bool same);

}  // namespace gclab
