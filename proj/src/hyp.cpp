#include "gclab/hyp.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace gclab {

CurvatureScale::CurvatureScale(double kappa) : kappa_(kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw NumericDomainError("curvature scale kappa must be positive");
    factor_ = 1.0 / std::sqrt(kappa);
}

DiskPoint::DiskPoint(cplx z) : z_(z) {
    if (!(std::abs(z) < 1.0 - kBoundaryEps)) throw NumericDomainError("point is not inside the unit disk");
}

Isometry::Isometry(cplx a, cplx b) {
    const double d = std::norm(a) - std::norm(b);
    if (!(d > 0.0) || !std::isfinite(d)) throw NumericDomainError("isometry with non-positive determinant");
    const double s = 1.0 / std::sqrt(d);
    a_ = a * s;
    b_ = b * s;
}

Isometry Isometry::rotation(double theta) { return Isometry(std::polar(1.0, 0.5 * theta), cplx{}); }

Isometry Isometry::translation(double direction, double distance) {
    return Isometry(cplx(std::cosh(0.5 * distance), 0.0), std::polar(std::sinh(0.5 * distance), direction));
}

Isometry Isometry::moving_origin_to(cplx c) {
    const double s = 1.0 / std::sqrt(1.0 - std::norm(c));
    return Isometry(cplx(s, 0.0), c * s);
}

Isometry Isometry::from_upper_half_plane(double a, double b, double c, double d) {
    // Conjugation by the Cayley transform.
    const cplx A(0.5 * (a + d), 0.5 * (b - c));
    const cplx B(0.5 * (a - d), -0.5 * (b + c));
    return Isometry(A, B);
}

Isometry Isometry::operator*(const Isometry& rhs) const {
    const cplx a = a_ * rhs.a_ + b_ * std::conj(rhs.b_);
    const cplx b = a_ * rhs.b_ + b_ * std::conj(rhs.a_);
    // |a|^2 - |b|^2 loses all accuracy once |a| is large; the unnormalized
    // product is then closer to unimodular than any renormalization.
    if (std::norm(a) < 1e4) return Isometry(a, b);
    return Isometry(a, b, raw_tag{});
}

cplx Isometry::derivative(cplx z) const {
    const cplx w = std::conj(b_) * z + std::conj(a_);
    return 1.0 / (w * w);
}

IsometryKind Isometry::kind() const {
    if (approx_equal(Isometry{}, kClassifyTol)) return IsometryKind::identity;
    const double t = std::abs(trace());
    if (t < 2.0 - kClassifyTol) return IsometryKind::elliptic;
    if (t > 2.0 + kClassifyTol) return IsometryKind::hyperbolic;
    return IsometryKind::parabolic;
}

bool Isometry::approx_equal(const Isometry& o, double tol) const {
    const double same = std::max(std::abs(a_ - o.a_), std::abs(b_ - o.b_));
    const double flip = std::max(std::abs(a_ + o.a_), std::abs(b_ + o.b_));
    return std::min(same, flip) <= tol;
}

Isometry compose(const Isometry& lhs, const Isometry& rhs) { return lhs * rhs; }

IsometryKind classify(const Isometry& m) { return m.kind(); }

DiskPoint apply(const Isometry& m, DiskPoint p) {
    const cplx w = m(p.z());
    if (!(std::abs(w) < 1.0 - kBoundaryEps)) throw NumericDomainError("isometry pushed a point onto the boundary");
    return DiskPoint(w);
}

double dist_unit(cplx p, cplx q) {
    const double r = std::abs(p - q) / std::abs(1.0 - std::conj(p) * q);
    return 2.0 * std::atanh(std::min(r, 1.0));
}

double dist(DiskPoint p, DiskPoint q, const CurvatureScale& scale) { return scale.length(dist_unit(p.z(), q.z())); }

double translation_length(const Isometry& m, const CurvatureScale& scale) {
    if (m.kind() != IsometryKind::hyperbolic) throw ClassificationError("translation length needs a hyperbolic isometry");
    return scale.length(2.0 * std::acosh(std::abs(m.a().real())));
}

double normalize_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

double angular_gap(double a, double b) {
    const double d = normalize_angle(a - b);
    return std::min(d, kTwoPi - d);
}

BoundaryPair::BoundaryPair(double tail, double head) : tail_(normalize_angle(tail)), head_(normalize_angle(head)) {
    if (angular_gap(tail_, head_) <= kAngleSeparation) throw DegenerateError("boundary pair endpoints coincide");
}

BoundaryPair axis(const Isometry& m) {
    if (m.kind() != IsometryKind::hyperbolic) throw ClassificationError("axis needs a hyperbolic isometry");
    const cplx a = m.a();
    const cplx b = m.b();
    // conj(b) z^2 + (conj(a) - a) z - b = 0. With |a|^2 - |b|^2 = 1 the
    // discriminant is 4 (Re a^2 - 1) / conj(b)^2; forming it that way avoids
    // cancelling |b|^2 against (Im a)^2 for long conjugates.
    const double s = std::sqrt(std::max(0.0, a.real() * a.real() - 1.0));
    std::array<cplx, 2> roots{cplx(s, a.imag()) / std::conj(b), cplx(-s, a.imag()) / std::conj(b)};
    for (auto& r : roots) r /= std::abs(r);
    // Attracting fixed point: |m'(z)| < 1.
    const auto contraction = [&](cplx z) { return std::abs(m.derivative(z)); };
    if (contraction(roots[0]) > contraction(roots[1])) std::swap(roots[0], roots[1]);
    return BoundaryPair(std::arg(roots[1]), std::arg(roots[0]));
}

namespace {

// x strictly inside the counter-clockwise arc from `from` to `to`.
bool in_ccw_arc(double x, double from, double to) {
    return normalize_angle(x - from) < normalize_angle(to - from);
}

}  // namespace

bool boundary_linked(const BoundaryPair& a, const BoundaryPair& b) {
    for (double x : {a.tail(), a.head()})
        for (double y : {b.tail(), b.head()})
            if (angular_gap(x, y) <= kAngleSeparation) throw DegenerateError("boundary pairs share an endpoint");
    return in_ccw_arc(b.tail(), a.tail(), a.head()) != in_ccw_arc(b.head(), a.tail(), a.head());
}

Geodesic Geodesic::through(const BoundaryPair& ends) {
    const cplx p = ends.tail_point();
    const cplx q = ends.head_point();
    const cplx s = p + q;
    if (std::abs(s) < 1e-14) return Geodesic(Isometry::rotation(std::arg(q)));
    const double cos_half = 0.5 * std::abs(s);
    const double sin_half = 0.5 * std::abs(p - q);
    const cplx c = std::polar(cos_half / (1.0 + sin_half), std::arg(s));
    // q - p is orthogonal to p + q; unlike arg(s) its direction stays
    // meaningful for lines through the origin.
    return Geodesic(Isometry::moving_origin_to(c) * Isometry::rotation(std::arg(q - p)));
}

Geodesic Geodesic::through(cplx from, cplx to) {
    const Isometry to_from = Isometry::moving_origin_to(from);
    const cplx w = to_from.inverse()(to);
    return Geodesic(to_from * Isometry::rotation(std::arg(w)));
}

Geodesic Geodesic::from_tangent(cplx base, double direction) {
    return Geodesic(Isometry::moving_origin_to(base) * Isometry::rotation(direction));
}

cplx Geodesic::point(double t) const { return frame_(cplx(std::tanh(0.5 * t), 0.0)); }

double Geodesic::direction(double t) const {
    return normalize_angle(std::arg(frame_.derivative(cplx(std::tanh(0.5 * t), 0.0))));
}

BoundaryPair Geodesic::ends() const { return BoundaryPair(std::arg(tail()), std::arg(head())); }

Geodesic Geodesic::shifted(double t) const { return Geodesic(frame_ * Isometry::translation(0.0, t)); }

Geodesic Geodesic::reversed() const { return Geodesic(frame_ * Isometry::rotation(kPi)); }

double Geodesic::signed_distance(cplx z) const {
    const cplx w = frame_.inverse()(z);
    return std::asinh(2.0 * w.imag() / (1.0 - std::norm(w)));
}

double Geodesic::foot(cplx z) const {
    const cplx w = frame_.inverse()(z);
    const double x = from_klein(cplx(to_klein(w).real(), 0.0)).real();
    return 2.0 * std::atanh(x);
}

cplx to_klein(cplx z) { return 2.0 * z / (1.0 + std::norm(z)); }

cplx from_klein(cplx k) { return k / (1.0 + std::sqrt(std::max(0.0, 1.0 - std::norm(k)))); }

Segment::Segment(DiskPoint p, DiskPoint q) : p_(p), q_(q), ends_(0.0, 1.0) {
    if (!(dist_unit(p.z(), q.z()) > 1e-12)) throw DegenerateError("segment endpoints coincide");
    ends_ = Geodesic::through(p.z(), q.z()).ends();
}

namespace {

double cross2(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

bool same_line(const BoundaryPair& a, const BoundaryPair& b) {
    const auto near = [](double x, double y) { return angular_gap(x, y) <= 1e-9; };
    return (near(a.tail(), b.tail()) && near(a.head(), b.head())) ||
           (near(a.tail(), b.head()) && near(a.head(), b.tail()));
}

}  // namespace

SegmentCrossing segment_cross(const Segment& s1, const Segment& s2) {
    SegmentCrossing out;
    const cplx p1 = to_klein(s1.p().z()), q1 = to_klein(s1.q().z());
    const cplx p2 = to_klein(s2.p().z()), q2 = to_klein(s2.q().z());
    const cplx d1 = q1 - p1, d2 = q2 - p2;
    if (same_line(s1.ends(), s2.ends())) {
        // Collinear: report overlap of the two parameter ranges along s1.
        const double len2 = std::norm(d1);
        double u0 = ((p2 - p1) * std::conj(d1)).real() / len2;
        double u1 = ((q2 - p1) * std::conj(d1)).real() / len2;
        if (u0 > u1) std::swap(u0, u1);
        if (u1 > 0.0 && u0 < 1.0) out.kind = CrossKind::parallel;
        return out;
    }
    const double denom = cross2(d1, d2);
    if (std::abs(denom) < 1e-300) return out;
    const double u = cross2(p2 - p1, d2) / denom;
    const double v = cross2(p2 - p1, d1) / denom;
    if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0) return out;
    out.kind = CrossKind::crossing;
    out.point = from_klein(p1 + u * d1);

    const Geodesic g1 = Geodesic::through(s1.p().z(), s1.q().z());
    const Geodesic g2 = Geodesic::through(s2.p().z(), s2.q().z());
    const double a1 = g1.direction(g1.foot(out.point));
    const double a2 = g2.direction(g2.foot(out.point));
    double ang = std::fmod(std::abs(a1 - a2), kTwoPi);
    if (ang > kPi) ang = kTwoPi - ang;
    out.angle = ang;

    constexpr double kEndpointTol = 1e-9;
    const double end_gap = std::min({dist_unit(out.point, s1.p().z()), dist_unit(out.point, s1.q().z()),
                                     dist_unit(out.point, s2.p().z()), dist_unit(out.point, s2.q().z())});
    out.degenerate = ang < 1e-7 || ang > kPi - 1e-7 || end_gap < kEndpointTol;
    return out;
}

}  // namespace gclab
