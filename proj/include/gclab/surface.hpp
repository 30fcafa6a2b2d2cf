#pragma once

// Genus-g surface built from the regular 4g-gon centred at the origin, each side
// glued to the opposite one. Word arithmetic in the surface group, Dehn
// reduction, and fundamental-domain membership.

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gclab/hyp.hpp"

namespace gclab {

// +k is the k-th generator (1-based), -k its inverse. Text form: 'a'+k-1 and
// 'A'+k-1. Letters are ordered a < b < ... < A < B < ...
using Letter = int;

inline int letter_rank(Letter x) { return x > 0 ? x : 64 - x; }
bool letter_less(Letter x, Letter y);

// Freely reduced word in the generators.
class GroupWord {
public:
    GroupWord() = default;
    explicit GroupWord(std::vector<Letter> letters);
    static GroupWord parse(std::string_view text);

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    std::string str() const;

    GroupWord inverse() const;
    GroupWord power(int k) const;
    GroupWord operator*(const GroupWord& rhs) const;
    // Cyclic rotation starting at position k (no reduction).
    GroupWord rotated(std::size_t k) const;

    bool operator==(const GroupWord&) const = default;
    // Shortlex: shorter first, then lexicographic in letter order.
    std::strong_ordering operator<=>(const GroupWord& rhs) const;

private:
    std::vector<Letter> letters_;
};

// Strips matching first/last letters until the word is cyclically reduced.
GroupWord cyclic_reduce(const GroupWord& w);

// Lexicographically least rotation (the word must be cyclically reduced).
GroupWord least_rotation(const GroupWord& w);

// Smallest u with w = u^k; returns k (1 when w is primitive).
int root_exponent(const GroupWord& w);

class SurfaceModel {
public:
    int genus() const { return genus_; }
    const CurvatureScale& scale() const { return scale_; }
    int side_count() const { return 4 * genus_; }

    // Vertex k sits at angle 2 pi k/(4g) - pi/(4g); side i runs
    // counter-clockwise from vertex i to vertex i+1.
    const std::vector<cplx>& vertices() const { return vertices_; }
    cplx vertex(int k) const { return vertices_[static_cast<std::size_t>(wrap(k))]; }
    // Side i as an oriented geodesic with the polygon on its left.
    const Geodesic& side_line(int i) const { return side_lines_[static_cast<std::size_t>(wrap(i))]; }

    int paired_side(int i) const { return wrap(i + 2 * genus_); }
    // Half-open ownership: a boundary point on side i belongs to the domain iff
    // i < paired_side(i).
    bool owns_side(int i) const { return wrap(i) < paired_side(i); }
    // P_i: maps side i onto side paired_side(i); carries the tile across side i
    // onto the domain.
    const Isometry& pairing(int i) const { return pairings_[static_cast<std::size_t>(wrap(i))]; }

    // Letter whose isometry is pairing(side) and its inverse map.
    Letter side_letter(int side) const;
    int letter_side(Letter x) const;
    const Isometry& letter_isometry(Letter x) const { return pairing(letter_side(x)); }

    const GroupWord& relator() const { return relator_; }

    // Unit-curvature geometry of the polygon.
    double vertex_radius() const { return vertex_radius_; }
    double inradius() const { return inradius_; }
    double interior_angle() const { return kTwoPi / side_count(); }

    // Reported (curvature-scaled) constants.
    double area() const;
    double c_star() const;
    std::optional<double> systole() const { return systole_; }
    // Injectivity radius, systole/2. Throws if the systole is not known yet.
    double rho() const;
    SurfaceModel with_systole(double systole) const;

    int wrap(int i) const {
        const int n = side_count();
        return ((i % n) + n) % n;
    }

private:
    friend SurfaceModel build_surface(int genus, double kappa);

    int genus_ = 2;
    CurvatureScale scale_{};
    std::vector<cplx> vertices_;
    std::vector<Geodesic> side_lines_;
    std::vector<Isometry> pairings_;
    GroupWord relator_;
    double vertex_radius_ = 0.0;
    double inradius_ = 0.0;
    std::optional<double> systole_;
};

SurfaceModel build_surface(int genus, double kappa);

Isometry evaluate_word(const SurfaceModel& s, const GroupWord& w);

// Dehn's algorithm: repeatedly replaces any subword longer than half a relator
// (cyclic rotation of R or R^-1) by the inverse of its shorter complement.
GroupWord dehn_reduce(const SurfaceModel& s, const GroupWord& w);
// Same, treating the word as cyclic.
GroupWord dehn_reduce_cyclic(const SurfaceModel& s, const GroupWord& w);
bool is_trivial(const SurfaceModel& s, const GroupWord& w);

struct ConjugacyClass {
    GroupWord word;      // canonical cyclic word
    bool primitive = true;
    int exponent = 1;    // word = root^exponent
};

// Canonical representative of the conjugacy class of w. Throws
// TrivialClassError when w is trivial in the surface group.
ConjugacyClass canonical_conjugacy(const SurfaceModel& s, const GroupWord& w);

// Signed distance (unit curvature) from z to each side line, positive inside.
double side_distance(const SurfaceModel& s, int side, cplx z);

inline constexpr double kOnSideTol = 1e-11;

bool contains(const SurfaceModel& s, DiskPoint p);
bool contains(const SurfaceModel& s, cplx z);

struct Reduction {
    DiskPoint point;
    Isometry map;   // point = map(original)
};

// Throws ReductionError after 10^4 steps.
Reduction reduce_to_domain(const SurfaceModel& s, DiskPoint p);

}  // namespace gclab
