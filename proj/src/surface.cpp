#include "gclab/surface.hpp"

#include <algorithm>
#include <cmath>

#include "gclab/errors.hpp"

namespace gclab {

bool letter_less(Letter x, Letter y) { return letter_rank(x) < letter_rank(y); }

namespace {

std::vector<Letter> free_reduce(const std::vector<Letter>& in) {
    std::vector<Letter> out;
    out.reserve(in.size());
    for (Letter x : in) {
        if (x == 0) throw Error("letter 0 is not a generator");
        if (!out.empty() && out.back() == -x)
            out.pop_back();
        else
            out.push_back(x);
    }
    return out;
}

}  // namespace

GroupWord::GroupWord(std::vector<Letter> letters) : letters_(free_reduce(letters)) {}

GroupWord GroupWord::parse(std::string_view text) {
    std::vector<Letter> out;
    for (char c : text) {
        if (c >= 'a' && c <= 'z')
            out.push_back(c - 'a' + 1);
        else if (c >= 'A' && c <= 'Z')
            out.push_back(-(c - 'A' + 1));
        else
            throw Error(std::string("invalid letter '") + c + "' in word");
    }
    return GroupWord(std::move(out));
}

std::string GroupWord::str() const {
    std::string s;
    s.reserve(letters_.size());
    for (Letter x : letters_) s.push_back(x > 0 ? static_cast<char>('a' + x - 1) : static_cast<char>('A' - x - 1));
    return s;
}

GroupWord GroupWord::inverse() const {
    std::vector<Letter> out(letters_.rbegin(), letters_.rend());
    for (Letter& x : out) x = -x;
    GroupWord w;
    w.letters_ = std::move(out);
    return w;
}

GroupWord GroupWord::power(int k) const {
    const GroupWord base = k < 0 ? inverse() : *this;
    std::vector<Letter> out;
    for (int i = 0; i < std::abs(k); ++i) out.insert(out.end(), base.letters_.begin(), base.letters_.end());
    return GroupWord(std::move(out));
}

GroupWord GroupWord::operator*(const GroupWord& rhs) const {
    std::vector<Letter> out = letters_;
    out.insert(out.end(), rhs.letters_.begin(), rhs.letters_.end());
    return GroupWord(std::move(out));
}

GroupWord GroupWord::rotated(std::size_t k) const {
    GroupWord w = *this;
    if (!w.letters_.empty())
        std::rotate(w.letters_.begin(), w.letters_.begin() + static_cast<std::ptrdiff_t>(k % w.letters_.size()),
                    w.letters_.end());
    return w;
}

std::strong_ordering GroupWord::operator<=>(const GroupWord& rhs) const {
    if (auto c = letters_.size() <=> rhs.letters_.size(); c != 0) return c;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (auto c = letter_rank(letters_[i]) <=> letter_rank(rhs.letters_[i]); c != 0) return c;
    }
    return std::strong_ordering::equal;
}

GroupWord cyclic_reduce(const GroupWord& w) {
    const auto& l = w.letters();
    std::size_t i = 0, j = l.size();
    while (j - i >= 2 && l[i] == -l[j - 1]) {
        ++i;
        --j;
    }
    return GroupWord(std::vector<Letter>(l.begin() + static_cast<std::ptrdiff_t>(i),
                                         l.begin() + static_cast<std::ptrdiff_t>(j)));
}

GroupWord least_rotation(const GroupWord& w) {
    const std::size_t n = w.size();
    if (n == 0) return w;
    const auto& l = w.letters();
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            const Letter x = l[(k + j) % n], y = l[(best + j) % n];
            if (x == y) continue;
            if (letter_less(x, y)) best = k;
            break;
        }
    }
    return w.rotated(best);
}

int root_exponent(const GroupWord& w) {
    const std::size_t n = w.size();
    const auto& l = w.letters();
    for (std::size_t p = 1; p <= n; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (std::size_t i = p; i < n && ok; ++i) ok = l[i] == l[i - p];
        if (ok) return static_cast<int>(n / p);
    }
    return 1;
}

Letter SurfaceModel::side_letter(int side) const {
    const int i = wrap(side);
    return i < 2 * genus_ ? i + 1 : -(i - 2 * genus_ + 1);
}

int SurfaceModel::letter_side(Letter x) const {
    if (x == 0 || std::abs(x) > 2 * genus_) throw Error("letter outside the generating set");
    return x > 0 ? x - 1 : -x - 1 + 2 * genus_;
}

double SurfaceModel::area() const { return kTwoPi * (2.0 * genus_ - 2.0) / scale_.kappa(); }

double SurfaceModel::c_star() const { return scale_.kappa() / (2.0 * kPi * kPi * (genus_ - 1.0)); }

double SurfaceModel::rho() const {
    if (!systole_) throw Error("systole not computed for this surface");
    return 0.5 * *systole_;
}

SurfaceModel SurfaceModel::with_systole(double systole) const {
    SurfaceModel s = *this;
    s.systole_ = systole;
    return s;
}

SurfaceModel build_surface(int genus, double kappa) {
    if (genus < 2) throw Error("genus must be at least 2");
    if (genus > 13) throw Error("genus above 13 exceeds the letter alphabet");
    SurfaceModel s;
    s.genus_ = genus;
    s.scale_ = CurvatureScale(kappa);
    const int n = 4 * genus;
    const double half = kPi / n;
    const double cot = std::cos(half) / std::sin(half);
    s.vertex_radius_ = std::acosh(cot * cot);
    s.inradius_ = std::acosh(cot);
    const double rv = std::tanh(0.5 * s.vertex_radius_);
    for (int k = 0; k < n; ++k) s.vertices_.push_back(std::polar(rv, kTwoPi * k / n - half));
    for (int i = 0; i < n; ++i)
        s.side_lines_.push_back(Geodesic::through(s.vertices_[static_cast<std::size_t>(i)],
                                                  s.vertices_[static_cast<std::size_t>((i + 1) % n)]));
    for (int i = 0; i < n; ++i)
        s.pairings_.push_back(Isometry::translation(kTwoPi * s.paired_side(i) / n, 2.0 * s.inradius_));

    // Relator from the cycle of sides met while turning around vertex 0.
    const auto nearest_vertex = [&](cplx z) {
        int best = 0;
        for (int k = 1; k < n; ++k)
            if (std::abs(z - s.vertices_[static_cast<std::size_t>(k)]) <
                std::abs(z - s.vertices_[static_cast<std::size_t>(best)]))
                best = k;
        return best;
    };
    std::vector<Letter> cycle;
    int w = 0, side = 0;
    do {
        const int w2 = nearest_vertex(s.pairing(side)(s.vertex(w)));
        cycle.push_back(s.side_letter(side));
        const int t = s.paired_side(side);
        side = (t == w2) ? s.wrap(w2 - 1) : w2;
        w = w2;
    } while (!(w == 0 && side == 0) && cycle.size() <= static_cast<std::size_t>(n));
    GroupWord rel(cycle);
    if (rel.size() != static_cast<std::size_t>(n)) throw Error("vertex cycle did not close");
    const auto is_identity = [](const Isometry& m) { return m.approx_equal(Isometry(), 1e-9); };
    if (!is_identity(evaluate_word(s, rel))) {
        std::reverse(cycle.begin(), cycle.end());
        rel = GroupWord(cycle);
        if (!is_identity(evaluate_word(s, rel))) throw Error("vertex cycle does not give a relation");
    }
    s.relator_ = rel;
    return s;
}

Isometry evaluate_word(const SurfaceModel& s, const GroupWord& w) {
    Isometry m;
    for (Letter x : w.letters()) m = m * s.letter_isometry(x);
    return m;
}

namespace {

std::vector<std::vector<Letter>> relator_rotations(const SurfaceModel& s) {
    std::vector<std::vector<Letter>> out;
    for (const GroupWord& r : {s.relator(), s.relator().inverse()})
        for (std::size_t k = 0; k < r.size(); ++k) out.push_back(r.rotated(k).letters());
    return out;
}

// One Dehn replacement on a linear word; returns false if none applies.
bool dehn_step(const std::vector<std::vector<Letter>>& rots, std::vector<Letter>& w, std::size_t max_match) {
    const std::size_t n = rots.front().size();
    std::size_t best_len = 0, best_pos = 0, best_rot = 0;
    for (std::size_t r = 0; r < rots.size(); ++r) {
        for (std::size_t p = 0; p < w.size(); ++p) {
            std::size_t m = 0;
            while (m < n && p + m < w.size() && m < max_match && w[p + m] == rots[r][m]) ++m;
            if (m > best_len) {
                best_len = m;
                best_pos = p;
                best_rot = r;
            }
        }
    }
    if (2 * best_len <= n) return false;
    std::vector<Letter> repl;
    for (std::size_t j = n; j > best_len; --j) repl.push_back(-rots[best_rot][j - 1]);
    std::vector<Letter> out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(best_pos));
    out.insert(out.end(), repl.begin(), repl.end());
    out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(best_pos + best_len), w.end());
    w = GroupWord(out).letters();
    return true;
}

}  // namespace

GroupWord dehn_reduce(const SurfaceModel& s, const GroupWord& w) {
    const auto rots = relator_rotations(s);
    std::vector<Letter> cur = w.letters();
    while (dehn_step(rots, cur, cur.size())) {
    }
    return GroupWord(cur);
}

GroupWord dehn_reduce_cyclic(const SurfaceModel& s, const GroupWord& w) {
    const auto rots = relator_rotations(s);
    GroupWord cur = cyclic_reduce(dehn_reduce(s, w));
    bool changed = true;
    while (changed && !cur.empty()) {
        changed = false;
        for (std::size_t k = 0; k < cur.size() && !changed; ++k) {
            std::vector<Letter> l = cur.rotated(k).letters();
            if (dehn_step(rots, l, cur.size())) {
                cur = cyclic_reduce(GroupWord(l));
                changed = true;
            }
        }
    }
    return cur;
}

bool is_trivial(const SurfaceModel& s, const GroupWord& w) { return dehn_reduce(s, w).empty(); }

double side_distance(const SurfaceModel& s, int side, cplx z) { return s.side_line(side).signed_distance(z); }

bool contains(const SurfaceModel& s, cplx z) {
    int boundary = -1;
    for (int i = 0; i < s.side_count(); ++i) {
        const double d = side_distance(s, i, z);
        if (d < -kOnSideTol) return false;
        if (d <= kOnSideTol) {
            if (boundary >= 0) return false;  // vertex
            boundary = i;
        }
    }
    return boundary < 0 || s.owns_side(boundary);
}

bool contains(const SurfaceModel& s, DiskPoint p) { return contains(s, p.z()); }

Reduction reduce_to_domain(const SurfaceModel& s, DiskPoint p) {
    cplx z = p.z();
    Isometry g;
    for (int step = 0; step < 10000; ++step) {
        if (contains(s, z)) return {DiskPoint(z), g};
        int pick = -1;
        double worst = 1e300;
        for (int i = 0; i < s.side_count(); ++i) {
            const double d = side_distance(s, i, z);
            const bool violated = d < -kOnSideTol || (d <= kOnSideTol && !s.owns_side(i));
            if (violated && d < worst) {
                worst = d;
                pick = i;
            }
        }
        if (pick < 0) pick = 0;  // vertex: no consistent owner, keep moving until the cap
        g = s.pairing(pick) * g;
        z = s.pairing(pick)(z);
    }
    throw ReductionError("reduction to the fundamental domain did not terminate");
}

}  // namespace gclab
