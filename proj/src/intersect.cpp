#include "gclab/intersect.hpp"

#include <algorithm>
#include <cmath>

#include "gclab/errors.hpp"

namespace gclab {

namespace {

constexpr double kOnBoundary = 1e-9;
constexpr double kPushTie = 1e-9;

struct Prepared {
    const Chord* chord;
    Isometry inv;     // inverse frame
    cplx tail, head;  // ideal endpoints of the full line
};

Prepared prepare(const Chord& c) {
    return {&c, c.line.frame().inverse(), c.line.tail(), c.line.head()};
}

cplx unit(double theta) { return std::polar(1.0, theta); }
double dot(cplx u, cplx v) { return u.real() * v.real() + u.imag() * v.imag(); }

bool within_free_ends(const Chord& c, double t) {
    if (c.entry_side < 0 && t < 0.0) return false;
    if (c.exit_side < 0 && t > c.length) return false;
    return true;
}

// Whether the crossing of a and b is attributed to the domain. Sets
// on_boundary when the crossing point lies on a side or vertex.
bool attributed(const SurfaceModel& s, cplx x, double dir_a, double dir_b, bool& on_boundary) {
    on_boundary = false;
    int near[64];
    int n_near = 0;
    for (int i = 0; i < s.side_count(); ++i) {
        const double d = side_distance(s, i, x);
        if (d < -kOnBoundary) return false;
        if (d <= kOnBoundary && n_near < 64) near[n_near++] = i;
    }
    if (n_near == 0) return true;
    on_boundary = true;
    // Push both curves to their left: solve n_a.p = 1, n_b.p = 1.
    const cplx na = unit(dir_a + 0.5 * kPi), nb = unit(dir_b + 0.5 * kPi);
    const double det = na.real() * nb.imag() - na.imag() * nb.real();
    if (std::abs(det) < 1e-300) return false;
    const cplx p((nb.imag() - na.imag()) / det, (na.real() - nb.real()) / det);
    const cplx pd = p / std::abs(p);
    for (int k = 0; k < n_near; ++k) {
        const int i = near[k];
        const Geodesic& side = s.side_line(i);
        const cplx inward = unit(side.direction(side.foot(x)) + 0.5 * kPi);
        const double v = dot(pd, inward);
        if (v < -kPushTie) return false;
        if (v <= kPushTie && !s.owns_side(i)) return false;
    }
    return true;
}

struct Hit {
    bool counted = false;
    bool on_boundary = false;
    cplx point;
    double angle = 0.0;
};

Hit cross(const SurfaceModel& s, const Prepared& a, const Prepared& b) {
    Hit h;
    const cplx w1 = a.inv(b.tail), w2 = a.inv(b.head);
    // Lines sharing an ideal endpoint never cross; this covers equal lines.
    if (std::abs(w1.imag()) < 1e-13 || std::abs(w2.imag()) < 1e-13) return h;
    if ((w1.imag() > 0.0) == (w2.imag() > 0.0)) return h;
    const double xk = w1.real() + (w2.real() - w1.real()) * (w1.imag() / (w1.imag() - w2.imag()));
    const double x = from_klein(cplx(xk, 0.0)).real();
    if (!(std::abs(x) < 1.0)) return h;
    const double ta = 2.0 * std::atanh(x);
    if (!within_free_ends(*a.chord, ta)) return h;
    const cplx p = a.chord->line.frame()(cplx(x, 0.0));
    const Geodesic& lb = b.chord->line;
    const double tb = lb.foot(p);
    if (!within_free_ends(*b.chord, tb)) return h;
    const double da = a.chord->line.direction(ta), db = lb.direction(tb);
    double ang = std::fmod(std::abs(da - db), kPi);
    h.angle = std::min(ang, kPi - ang);
    h.point = p;
    h.counted = attributed(s, p, da, db, h.on_boundary);
    return h;
}

}  // namespace

CrossingReport chord_crossings(const SurfaceModel& s, std::span<const Chord> a, std::span<const Chord> b,
                               bool same_list, bool record_angles) {
    std::vector<Prepared> pa, pb;
    pa.reserve(a.size());
    for (const Chord& c : a) pa.push_back(prepare(c));
    if (!same_list) {
        pb.reserve(b.size());
        for (const Chord& c : b) pb.push_back(prepare(c));
    }
    const std::vector<Prepared>& qb = same_list ? pa : pb;

    CrossingReport r;
    std::vector<cplx> points;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        for (std::size_t j = same_list ? i + 1 : 0; j < qb.size(); ++j) {
            const Hit h = cross(s, pa[i], qb[j]);
            if (h.on_boundary) ++r.boundary_events;
            if (!h.counted) continue;
            ++r.count;
            if (h.angle < kTangentAngle) ++r.degenerate_events;
            if (record_angles) r.angles.push_back(h.angle);
            points.push_back(h.point);
        }
    }
    std::sort(points.begin(), points.end(), [](cplx u, cplx v) { return u.real() < v.real(); });
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size() && points[j].real() - points[i].real() < kCoincidentTol; ++j)
            if (std::abs(points[j] - points[i]) < kCoincidentTol) ++r.coincident_points;
    return r;
}

std::int64_t self_intersection(const SurfaceModel& s, const ClosedGeodesic& g) {
    const std::int64_t i = chord_crossings(s, g.chords, g.chords, true).count;
    if (s.systole()) {
        const double bound = g.length * g.length / (s.rho() * s.rho());
        if (static_cast<double>(i) > bound * (1.0 + 1e-12))
            throw AuditError("self-intersection of " + g.word.str() + " exceeds l^2/rho^2");
    }
    return i;
}

Intersection intersection_number(const SurfaceModel& s, const ClosedGeodesic& a, const ClosedGeodesic& b) {
    Intersection out;
    bool same_curve = a.word == b.word;
    if (!same_curve && std::abs(a.unit_length - b.unit_length) < 1e-9)
        same_curve = canonical_conjugacy(s, b.word.inverse()).word == a.word;
    out.i = same_curve ? chord_crossings(s, a.chords, a.chords, true).count
                       : chord_crossings(s, a.chords, b.chords, false).count;
    out.normalized = static_cast<double>(out.i) / (a.length * b.length);
    if (s.systole()) {
        const double bound = 1.0 / (s.rho() * s.rho());
        if (out.normalized > bound * (1.0 + 1e-12))
            throw AuditError("i(" + a.word.str() + ", " + b.word.str() + ")/(l l) exceeds 1/rho^2");
    }
    return out;
}

std::int64_t arc_T_count(const SurfaceModel& s, const ArcTrace& a1, const ArcTrace& a2, bool same) {
    if (same) return chord_crossings(s, a1.chords, a1.chords, true).count;
    return chord_crossings(s, a1.chords, a2.chords, false).count;
}

}  // namespace gclab
