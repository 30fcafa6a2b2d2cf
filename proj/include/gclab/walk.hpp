#pragma once

// Following a geodesic through the tiling by copies of the fundamental polygon.
//
// Ties (a polygon vertex lying on the line) are resolved by pushing the line an
// infinitesimal amount to its left: a vertex within 1e-7 of the line
// counts as lying on its right.

#include <vector>

#include "gclab/hyp.hpp"
#include "gclab/surface.hpp"

namespace gclab {

struct Chord {
    Geodesic line;        // parameter 0 at the chord start
    double length = 0.0;  // unit curvature; zero for corner passes
    int entry_side = -1;  // -1: starts inside the domain
    int exit_side = -1;   // -1: ends inside the domain
    double offset = 0.0;  // walk parameter of the chord start

    cplx start() const { return line.point(0.0); }
    cplx end() const { return line.point(length); }
};

struct Walk {
    std::vector<Chord> chords;
    GroupWord word;       // letters of the tiles crossed into, in order
    double length = 0.0;  // unit curvature
};

// True iff the left-pushed line given by frame meets the open domain.
bool pushed_line_meets(const SurfaceModel& s, const Isometry& frame);

// Follows line from parameter 0 (a point of the closed domain, on entry_side
// unless entry_side is -1) for the given length.
Walk walk_line(const SurfaceModel& s, const Geodesic& line, double length, int entry_side = -1);

// One primitive period of the closed geodesic whose lift is the axis of h,
// starting where the lift through the domain enters it. Throws
// ClassificationError if h is not hyperbolic and DecompositionError if the
// walk does not close up.
Walk trace_closed(const SurfaceModel& s, const Isometry& h);

}  // namespace gclab
