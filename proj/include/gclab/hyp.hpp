#pragma once

// Hyperbolic-plane primitives in the Poincare disk. Everything here works at
// curvature -1; CurvatureScale converts lengths at reporting boundaries only.

#include <complex>
#include <optional>

#include "gclab/errors.hpp"

namespace gclab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double kClassifyTol = 1e-9;
inline constexpr double kBoundaryEps = 1e-12;
inline constexpr double kAngleSeparation = 1e-10;

// Curvature -kappa. Lengths computed internally at kappa = 1 are multiplied by
// 1/sqrt(kappa) here and nowhere else.
class CurvatureScale {
public:
    explicit CurvatureScale(double kappa = 1.0);
    double kappa() const { return kappa_; }
    double factor() const { return factor_; }
    double length(double unit_length) const { return unit_length * factor_; }

private:
    double kappa_;
    double factor_;
};

// A point of the open unit disk.
class DiskPoint {
public:
    DiskPoint() = default;
    explicit DiskPoint(cplx z);
    DiskPoint(double x, double y) : DiskPoint(cplx(x, y)) {}
    cplx z() const { return z_; }

private:
    cplx z_{0.0, 0.0};
};

enum class IsometryKind { identity, elliptic, parabolic, hyperbolic };

// Orientation-preserving isometry of the disk in SU(1,1) form
//     [[a, b], [conj(b), conj(a)]],  |a|^2 - |b|^2 = 1,
// defined up to an overall sign. Trace is 2 Re(a).
class Isometry {
public:
    Isometry() = default;
    Isometry(cplx a, cplx b);

    static Isometry rotation(double theta);
    // Translation by `distance` along the diameter pointing at angle `direction`.
    static Isometry translation(double direction, double distance);
    // The isometry fixing the ideal point 1 direction: 0 -> c with positive real
    // derivative at 0.
    static Isometry moving_origin_to(cplx c);
    // Real SL(2) matrix acting on the upper half plane, transported to the disk by
    // the Cayley map z -> (z - i)/(z + i).
    static Isometry from_upper_half_plane(double a, double b, double c, double d);

    cplx a() const { return a_; }
    cplx b() const { return b_; }
    double trace() const { return 2.0 * a_.real(); }
    double det() const { return std::norm(a_) - std::norm(b_); }

    Isometry inverse() const { return Isometry(std::conj(a_), -b_, raw_tag{}); }
    Isometry operator*(const Isometry& rhs) const;

    cplx operator()(cplx z) const { return (a_ * z + b_) / (std::conj(b_) * z + std::conj(a_)); }
    cplx derivative(cplx z) const;

    IsometryKind kind() const;
    // Equality as Mobius maps (i.e. up to sign of the matrix).
    bool approx_equal(const Isometry& other, double tol) const;

private:
    struct raw_tag {};
    Isometry(cplx a, cplx b, raw_tag) : a_(a), b_(b) {}

    cplx a_{1.0, 0.0};
    cplx b_{0.0, 0.0};
};

Isometry compose(const Isometry& lhs, const Isometry& rhs);
IsometryKind classify(const Isometry& m);

// Throws NumericDomainError if the image is not inside the disk.
DiskPoint apply(const Isometry& m, DiskPoint p);

double dist(DiskPoint p, DiskPoint q, const CurvatureScale& scale = CurvatureScale{});
double dist_unit(cplx p, cplx q);

// Throws ClassificationError unless m is hyperbolic.
double translation_length(const Isometry& m, const CurvatureScale& scale = CurvatureScale{});

// Repelling (tail) and attracting (head) endpoints of an oriented complete
// geodesic, as angles in [0, 2pi).
class BoundaryPair {
public:
    BoundaryPair(double tail, double head);
    double tail() const { return tail_; }
    double head() const { return head_; }
    cplx tail_point() const { return std::polar(1.0, tail_); }
    cplx head_point() const { return std::polar(1.0, head_); }
    BoundaryPair reversed() const { return {head_, tail_}; }

private:
    double tail_;
    double head_;
};

double normalize_angle(double theta);
double angular_gap(double a, double b);

BoundaryPair axis(const Isometry& m);

// Whether the endpoints of b separate those of a on the circle. Throws
// DegenerateError when two of the four angles coincide.
bool boundary_linked(const BoundaryPair& a, const BoundaryPair& b);

// An oriented complete geodesic together with an arc-length parametrization:
// the point at parameter t is frame(tanh(t/2)), so the real diameter traversed
// from -1 to 1 is carried to the geodesic.
class Geodesic {
public:
    Geodesic() = default;
    explicit Geodesic(const Isometry& frame) : frame_(frame) {}
    static Geodesic through(const BoundaryPair& ends);
    static Geodesic through(cplx from, cplx to);
    static Geodesic from_tangent(cplx base, double direction);

    const Isometry& frame() const { return frame_; }
    cplx point(double t) const;
    // Euclidean direction angle of the unit tangent at parameter t.
    double direction(double t) const;
    cplx tail() const { return frame_(cplx(-1.0, 0.0)); }
    cplx head() const { return frame_(cplx(1.0, 0.0)); }
    BoundaryPair ends() const;
    // Same geodesic, parameter origin moved to t.
    Geodesic shifted(double t) const;
    Geodesic reversed() const;
    Geodesic mapped(const Isometry& m) const { return Geodesic(m * frame_); }
    // Signed distance from z to the geodesic, positive on the left.
    double signed_distance(cplx z) const;
    // Parameter of the orthogonal projection of z.
    double foot(cplx z) const;

private:
    Isometry frame_;
};

// Poincare <-> Klein model conversions. Geodesics are straight chords in the
// Klein model, which makes segment/line intersection linear.
cplx to_klein(cplx z);
cplx from_klein(cplx k);

// Geodesic chord between two interior points.
class Segment {
public:
    Segment(DiskPoint p, DiskPoint q);
    DiskPoint p() const { return p_; }
    DiskPoint q() const { return q_; }
    const BoundaryPair& ends() const { return ends_; }
    double length() const { return dist_unit(p_.z(), q_.z()); }

private:
    DiskPoint p_;
    DiskPoint q_;
    BoundaryPair ends_;
};

enum class CrossKind { none, crossing, parallel };

struct SegmentCrossing {
    CrossKind kind = CrossKind::none;
    cplx point{};
    double angle = 0.0;        // unsigned, in (0, pi)
    bool degenerate = false;   // near-tangent or within 1e-9 of an endpoint
};

SegmentCrossing segment_cross(const Segment& s1, const Segment& s2);

}  // namespace gclab
