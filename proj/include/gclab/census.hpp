#pragma once

// Primitive oriented closed geodesics up to a length cutoff.

#include <cstddef>
#include <string>
#include <vector>

#include "gclab/hyp.hpp"
#include "gclab/surface.hpp"
#include "gclab/walk.hpp"

namespace gclab {

struct ClosedGeodesic {
    GroupWord word;             // canonical cyclic word (the cutting sequence)
    Isometry iso;               // evaluate_word(word); its axis crosses the domain
    double length = 0.0;        // curvature-scaled
    double unit_length = 0.0;   // at curvature 1
    std::vector<Chord> chords;  // one period, in order
    bool primitive = true;

    double trace() const { return iso.trace(); }
};

// Builds the geodesic of the class named by w (any representative word).
ClosedGeodesic make_closed_geodesic(const SurfaceModel& s, const GroupWord& w);
ClosedGeodesic reversed(const SurfaceModel& s, const ClosedGeodesic& g);

// Chords of the closed geodesic of h, starting from the lift of its axis
// nearest to the origin. Throws DecompositionError if the walk fails to close.
std::vector<Chord> chord_decomposition(const SurfaceModel& s, const Isometry& h);
std::vector<Chord> chord_decomposition(const SurfaceModel& s, const ClosedGeodesic& g);

struct Census {
    int genus = 2;
    double kappa = 1.0;
    double max_length = 0.0;  // curvature-scaled cutoff T
    double epsilon0 = 0.0;    // min l(w)/|w| over cyclically reduced words, |w| <= 6
    bool complete = false;
    std::vector<ClosedGeodesic> items;  // sorted by (length, word)

    std::size_t size() const { return items.size(); }
    // Smallest length, or 0 for an empty census.
    double systole() const { return items.empty() ? 0.0 : items.front().length; }
};

struct CensusOptions {
    unsigned jobs = 1;
    std::size_t max_tiles = 40'000'000;
};

// Every class with length <= T has a conjugate whose axis meets the closed
// domain, and such a conjugate moves the origin by at most
// 2 asinh(cosh(d_v) sinh(T/2)). The search visits all tiles within that radius
// (plus d_v) by breadth-first search over the tiling, so the census is
// complete unless the tile budget runs out.
Census enumerate_census(const SurfaceModel& s, double T, const CensusOptions& opts = {});

// Least l(w)/|w| over all cyclically reduced words of length <= k0 (unit curvature).
double word_length_ratio(const SurfaceModel& s, int k0 = 6);

double find_systole(const SurfaceModel& s);
// Surface with the systole filled in.
SurfaceModel with_computed_systole(const SurfaceModel& s);

// sqrt(kappa) T N(T) / e^{sqrt(kappa) T}. Throws IncompleteCensusError.
double huber_ratio(const Census& c);

// Census cache: header line, one record per line, then a trailer with the
// record count and an FNV-1a checksum. Written to a temporary file and renamed.
void save_census(const Census& c, const std::string& path);
// Throws CacheVersionError (format or surface mismatch), CacheChecksumError or
// CacheParseError.
Census load_census(const SurfaceModel& s, const std::string& path);

std::string format_double(double x);

}  // namespace gclab
