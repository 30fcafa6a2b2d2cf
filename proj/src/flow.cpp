#include "gclab/flow.hpp"

#include <algorithm>
#include <cmath>

#include "gclab/errors.hpp"

namespace gclab {

UnitTangent ArcTrace::end() const {
    const Chord& c = chords.back();
    return {DiskPoint(c.end()), normalize_angle(c.line.direction(c.length))};
}

double PhaseBox::angular_width() const {
    const double w = theta2 - theta1;
    if (w >= kTwoPi) return kTwoPi;
    return w <= 0.0 ? 0.0 : w;
}

double liouville_acceptance(const SurfaceModel& s) {
    return 2.0 * (2.0 * s.genus() - 2.0) / (2.0 * (std::cosh(s.vertex_radius()) - 1.0));
}

UnitTangent sample_liouville(const SurfaceModel& s, Rng& rng) {
    const double c = std::cosh(s.vertex_radius()) - 1.0;
    for (int attempt = 0; attempt < kLiouvilleRejectionCap; ++attempt) {
        const double r = std::acosh(1.0 + rng.uniform() * c);
        const double phi = kTwoPi * rng.uniform();
        const double theta = kTwoPi * rng.uniform();
        const cplx z = std::polar(std::tanh(0.5 * r), phi);
        if (contains(s, z)) return {DiskPoint(z), theta};
    }
    throw Error("Liouville rejection sampler exceeded its cap");
}

ArcTrace trace_arc(const SurfaceModel& s, const UnitTangent& v, double T) {
    if (!(T > 0.0)) throw Error("arc length must be positive");
    const Geodesic line = Geodesic::from_tangent(v.base.z(), v.angle);
    const Walk w = walk_line(s, line, T / s.scale().factor());
    ArcTrace out;
    out.start = v;
    out.T = T;
    out.chords = w.chords;
    for (std::size_t i = 0; i + 1 < w.chords.size(); ++i) out.transitions.push_back(w.chords[i].exit_side);
    out.cumulative = evaluate_word(s, w.word);
    return out;
}

ArcTrace wrap_arc(const SurfaceModel& s, const ClosedGeodesic& g, double fraction) {
    std::size_t k = 0;
    while (k < g.chords.size() && !(g.chords[k].length > 1e-6)) ++k;
    if (k == g.chords.size()) throw DegenerateError("closed geodesic has no chord to start from");
    const Chord& c = g.chords[k];
    const Geodesic line = c.line.shifted(fraction * c.length);
    UnitTangent v{DiskPoint(line.point(0.0)), normalize_angle(line.direction(0.0))};
    const Walk w = walk_line(s, line, g.unit_length);
    ArcTrace out;
    out.start = v;
    out.T = g.length;
    out.chords = w.chords;
    for (std::size_t i = 0; i + 1 < w.chords.size(); ++i) out.transitions.push_back(w.chords[i].exit_side);
    out.cumulative = evaluate_word(s, w.word);
    return out;
}

namespace {

bool angle_in_window(double theta, const PhaseBox& box) {
    const double w = box.angular_width();
    if (w >= kTwoPi) return true;
    const double d = normalize_angle(theta - box.theta1);
    return d < w;
}

// Time the chord's tangent spends in the box.
double chord_occupation(const Chord& c, const PhaseBox& box, double radius_unit, double cosh_r) {
    if (!(c.length > 0.0)) return 0.0;
    const Isometry& m = c.line.frame();
    const cplx w0 = m.inverse()(box.center.z());
    const double n0 = std::norm(w0);
    const double k = 0.5 * (cosh_r - 1.0) * (1.0 - n0);
    // (1+k) x^2 - 2 Re(w0) x + |w0|^2 - k <= 0 on the real axis.
    const double qa = 1.0 + k, qb = -2.0 * w0.real(), qc = n0 - k;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) return 0.0;
    const double sq = std::sqrt(disc);
    const double x1 = (-qb - sq) / (2.0 * qa), x2 = (-qb + sq) / (2.0 * qa);

    const double x_lo = std::tanh(0.0), x_hi = std::tanh(0.5 * c.length);
    std::vector<double> xs{x_lo, x_hi};
    for (double x : {x1, x2})
        if (x > x_lo && x < x_hi) xs.push_back(x);
    if (box.angular_width() < kTwoPi) {
        // Tangent direction at x is -2 arg(conj(b) x + conj(a)); it equals theta
        // where Im(e^{i theta/2} (conj(b) x + conj(a))) = 0.
        for (double theta : {box.theta1, box.theta2}) {
            const cplx e = std::polar(1.0, 0.5 * theta);
            const double den = (e * std::conj(m.b())).imag();
            if (den == 0.0) continue;
            const double x = -(e * std::conj(m.a())).imag() / den;
            if (x > x_lo && x < x_hi) xs.push_back(x);
        }
    }
    std::sort(xs.begin(), xs.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double ta = 2.0 * std::atanh(xs[i]), tb = 2.0 * std::atanh(xs[i + 1]);
        if (!(tb > ta)) continue;
        const double xm = 0.5 * (xs[i] + xs[i + 1]);
        const bool in_ball = dist_unit(m(cplx(xm, 0.0)), box.center.z()) <= radius_unit;
        if (!in_ball) continue;
        const double theta = -2.0 * std::arg(std::conj(m.b()) * xm + std::conj(m.a()));
        if (angle_in_window(theta, box)) total += tb - ta;
    }
    return total;
}

double occupation(const SurfaceModel& s, const std::vector<Chord>& chords, double unit_length, const PhaseBox& box) {
    if (!(box.radius > 0.0) || box.angular_width() <= 0.0) return 0.0;
    const double r = box.radius / s.scale().factor();
    const double cosh_r = std::cosh(r);
    double total = 0.0;
    for (const Chord& c : chords) total += chord_occupation(c, box, r, cosh_r);
    return std::clamp(total / unit_length, 0.0, 1.0);
}

}  // namespace

double occupation_fraction(const SurfaceModel& s, const ArcTrace& arc, const PhaseBox& box) {
    return occupation(s, arc.chords, arc.T / s.scale().factor(), box);
}

double occupation_fraction(const SurfaceModel& s, const ClosedGeodesic& g, const PhaseBox& box) {
    return occupation(s, g.chords, g.unit_length, box);
}

double box_measure(const SurfaceModel& s, const PhaseBox& box, int angular_steps) {
    if (!(box.radius > 0.0) || box.angular_width() <= 0.0) return 0.0;
    const double R = box.radius / s.scale().factor();
    const cplx c = box.center.z();
    double area = 0.0;
    for (int k = 0; k < angular_steps; ++k) {
        const double phi = kTwoPi * (k + 0.5) / angular_steps;
        const Geodesic ray = Geodesic::from_tangent(c, phi);
        const Isometry inv = ray.frame().inverse();
        double lo = 0.0, hi = R;
        for (int i = 0; i < s.side_count() && lo < hi; ++i) {
            const Geodesic& side = s.side_line(i);
            const cplx e1 = inv(side.tail()), e2 = inv(side.head());
            // Inside is the left of the side; it contains the ray for t > t0
            // or t < t0 depending on which way the side line crosses the ray.
            if ((e1.imag() > 0.0) == (e2.imag() > 0.0)) {
                if (side.signed_distance(c) < 0.0) hi = lo;
                continue;
            }
            const double xk = e1.real() + (e2.real() - e1.real()) * (e1.imag() / (e1.imag() - e2.imag()));
            const double t0 = 2.0 * std::atanh(from_klein(cplx(xk, 0.0)).real());
            if (side.signed_distance(ray.point(t0 + 1.0)) > 0.0)
                lo = std::max(lo, t0);
            else
                hi = std::min(hi, t0);
        }
        if (hi > lo) area += std::cosh(hi) - std::cosh(lo);
    }
    area *= kTwoPi / angular_steps;
    const double unit_area = 2.0 * kPi * (2.0 * s.genus() - 2.0);
    return box.angular_width() / kTwoPi * area / unit_area;
}

std::vector<PhaseBox> default_box_suite() {
    // Window edges avoid the polygon's symmetry directions, along which many
    // short closed geodesics run.
    return {
        {DiskPoint(cplx(0.0, 0.0)), 0.8, 0.3, 3.4},
        {DiskPoint(cplx(0.3, 0.1)), 0.6, 0.5, 2.5},
        {DiskPoint(cplx(-0.2, 0.35)), 0.7, 3.0, 5.5},
        {DiskPoint(cplx(0.0, -0.5)), 0.9, 0.0, kTwoPi},
        {DiskPoint(cplx(0.55, -0.25)), 0.5, 4.0, 6.0},
        {DiskPoint(cplx(-0.45, -0.3)), 1.0, 1.0, 2.0},
    };
}

}  // namespace gclab
