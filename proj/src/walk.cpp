#include "gclab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "gclab/errors.hpp"

namespace gclab {

namespace {

// Vertex-on-line tolerance for the push rule. Loose enough that lifts computed
// from large conjugates resolve ties the same way as short representatives.
constexpr double kWalkTieTol = 1e-7;

constexpr std::size_t kMaxChords = 50'000'000;

struct Classified {
    std::vector<cplx> w;      // vertices in the frame's coordinates
    std::vector<char> left;   // strictly left of the real axis
};

Classified classify_vertices(const SurfaceModel& s, const Isometry& frame) {
    const Isometry inv = frame.inverse();
    Classified c;
    c.w.reserve(static_cast<std::size_t>(s.side_count()));
    for (const cplx& v : s.vertices()) {
        const cplx w = inv(v);
        c.w.push_back(w);
        c.left.push_back(std::asinh(2.0 * w.imag() / (1.0 - std::norm(w))) > kWalkTieTol ? 1 : 0);
    }
    return c;
}

// Side whose start vertex is on the right and end vertex on the left (or, with
// reversed=true, the other way round); -1 if the pushed line misses the domain.
int transition_side(const Classified& c, bool entering) {
    const int n = static_cast<int>(c.left.size());
    for (int i = 0; i < n; ++i) {
        const bool a = c.left[static_cast<std::size_t>(i)];
        const bool b = c.left[static_cast<std::size_t>((i + 1) % n)];
        if (entering ? (a && !b) : (!a && b)) return i;
    }
    return -1;
}

// Parameter along the real axis where the chord from w1 to w2 crosses it.
double axis_crossing(cplx w1, cplx w2) {
    const cplx k1 = to_klein(w1), k2 = to_klein(w2);
    const double den = k2.imag() - k1.imag();
    const double f = den == 0.0 ? 0.5 : -k1.imag() / den;
    const double xk = k1.real() + f * (k2.real() - k1.real());
    const double x = from_klein(cplx(std::clamp(xk, -1.0 + 1e-16, 1.0 - 1e-16), 0.0)).real();
    return 2.0 * std::atanh(x);
}

double side_param(const SurfaceModel& s, const Classified& c, int side) {
    const int n = s.side_count();
    return axis_crossing(c.w[static_cast<std::size_t>(side)], c.w[static_cast<std::size_t>((side + 1) % n)]);
}

bool same_oriented_line(const Isometry& f, const Isometry& g, double tol) {
    return std::abs(f(cplx(1.0, 0.0)) - g(cplx(1.0, 0.0))) < tol &&
           std::abs(f(cplx(-1.0, 0.0)) - g(cplx(-1.0, 0.0))) < tol;
}

}  // namespace

bool pushed_line_meets(const SurfaceModel& s, const Isometry& frame) {
    const Classified c = classify_vertices(s, frame);
    return transition_side(c, false) >= 0;
}

Walk walk_line(const SurfaceModel& s, const Geodesic& line, double length, int entry_side) {
    Walk out;
    Geodesic cur = line;
    double remaining = length;
    int entry = entry_side;
    while (true) {
        const Classified c = classify_vertices(s, cur.frame());
        const int exit = transition_side(c, false);
        if (exit < 0) throw DegenerateError("geodesic misses the fundamental domain");
        const double t = std::max(0.0, side_param(s, c, exit));
        if (t >= remaining) {
            out.chords.push_back({cur, remaining, entry, -1, out.length});
            out.length += remaining;
            break;
        }
        out.chords.push_back({cur, t, entry, exit, out.length});
        out.length += t;
        remaining -= t;
        entry = s.paired_side(exit);
        cur = Geodesic(s.pairing(exit) * cur.shifted(t).frame());
        if (out.chords.size() > kMaxChords) throw DegenerateError("walk exceeded the chord limit");
    }
    std::vector<Letter> letters;
    for (const Chord& ch : out.chords)
        if (ch.exit_side >= 0) letters.push_back(s.side_letter(s.paired_side(ch.exit_side)));
    out.word = GroupWord(letters);
    return out;
}

Walk trace_closed(const SurfaceModel& s, const Isometry& h) {
    if (classify(h) != IsometryKind::hyperbolic) throw ClassificationError("element is not hyperbolic");
    const double ell = translation_length(h);
    const Geodesic axis_line = Geodesic::through(axis(h));

    // A lift passing through the closed domain.
    Geodesic lift;
    bool found = false;
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
        const double t0 = 0.1234567 * attempt * ell;
        try {
            const Reduction red = reduce_to_domain(s, DiskPoint(axis_line.point(t0)));
            lift = axis_line.shifted(t0).mapped(red.map);
            found = true;
        } catch (const ReductionError&) {
        }
    }
    if (!found) throw DecompositionError("could not place the axis in the fundamental domain");

    // The pushed line may miss the domain when the lift only touches its
    // boundary; try the tiles around it.
    if (!pushed_line_meets(s, lift.frame())) {
        found = false;
        std::deque<Isometry> queue{Isometry()};
        std::vector<cplx> seen{cplx(0.0, 0.0)};
        const double reach = 2.0 * s.vertex_radius() + 1e-6;
        while (!queue.empty() && !found) {
            const Isometry u = queue.front();
            queue.pop_front();
            for (int i = 0; i < s.side_count() && !found; ++i) {
                const Isometry v = u * s.pairing(i);
                const cplx c = v(cplx(0.0, 0.0));
                if (dist_unit(0.0, c) > reach) continue;
                bool dup = false;
                for (const cplx& z : seen) dup = dup || std::abs(z - c) < 1e-9;
                if (dup) continue;
                seen.push_back(c);
                queue.push_back(v);
                const Geodesic cand = lift.mapped(v.inverse());
                if (pushed_line_meets(s, cand.frame())) {
                    lift = cand;
                    found = true;
                }
            }
        }
        if (!found) throw DecompositionError("no tile meets the pushed axis");
    }

    const Classified c0 = classify_vertices(s, lift.frame());
    const int e0 = transition_side(c0, true);
    if (e0 < 0) throw DecompositionError("pushed axis has no entry side");
    const Geodesic start = lift.shifted(side_param(s, c0, e0));

    // Propagated frames drift like e^t, so this pass only finds the cutting
    // sequence and its period; chords are rebuilt from exact rotations below.
    std::vector<Letter> letters;
    std::vector<int> entries, exits;
    Geodesic cur = start;
    int entry = e0;
    double total = 0.0;
    while (true) {
        const Classified c = classify_vertices(s, cur.frame());
        const int exit = transition_side(c, false);
        if (exit < 0) throw DecompositionError("closed walk left the domain");
        const double t = std::max(0.0, side_param(s, c, exit));
        total += t;
        entries.push_back(entry);
        exits.push_back(exit);
        letters.push_back(s.side_letter(s.paired_side(exit)));
        entry = s.paired_side(exit);
        cur = Geodesic(s.pairing(exit) * cur.shifted(t).frame());
        if (entry == e0 && total > 1e-9) {
            const double ratio = ell / total;
            const double k = std::round(ratio);
            if (k >= 1.0 && std::abs(ratio - k) < 1e-6 * ratio && same_oriented_line(cur.frame(), start.frame(), 1e-4))
                break;
        }
        if (total > ell + 1e-6) throw DecompositionError("closed walk did not return to its start");
    }

    Walk out;
    out.word = GroupWord(letters);
    if (out.word.size() != letters.size()) throw DecompositionError("cutting sequence is not reduced");
    const std::size_t n = letters.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Isometry hk = evaluate_word(s, out.word.rotated(k));
        const Geodesic line = Geodesic::through(axis(hk));
        const Classified c = classify_vertices(s, line.frame());
        const int in = transition_side(c, true);
        const int ex = transition_side(c, false);
        if (in != entries[k] || ex != exits[k]) throw DecompositionError("cutting sequence is numerically unstable");
        const double te = side_param(s, c, in);
        const double tx = side_param(s, c, ex);
        out.chords.push_back({line.shifted(te), std::max(0.0, tx - te), in, ex, out.length});
        out.length += out.chords.back().length;
    }
    const double root = translation_length(evaluate_word(s, out.word));
    if (std::abs(out.length - root) > 1e-6) throw DecompositionError("chord lengths do not add up to the period");
    out.length = root;
    return out;
}

ConjugacyClass canonical_conjugacy(const SurfaceModel& s, const GroupWord& w) {
    const GroupWord reduced = dehn_reduce_cyclic(s, w);
    if (reduced.empty()) throw TrivialClassError("word is trivial in the surface group");
    const Isometry h = evaluate_word(s, reduced);
    const Walk walk = trace_closed(s, h);
    const int k = static_cast<int>(std::lround(translation_length(h) / walk.length));
    ConjugacyClass out;
    out.exponent = std::max(1, k);
    out.primitive = out.exponent == 1;
    out.word = least_rotation(walk.word).power(out.exponent);
    return out;
}

}  // namespace gclab
