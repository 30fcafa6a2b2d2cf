#include "gclab/census.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "gclab/errors.hpp"
#include "gclab/parallel.hpp"

namespace gclab {

namespace {

std::vector<Chord> repeat_period(const std::vector<Chord>& period, double period_length, int k) {
    std::vector<Chord> out;
    out.reserve(period.size() * static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r)
        for (Chord c : period) {
            c.offset += r * period_length;
            out.push_back(c);
        }
    return out;
}

ClosedGeodesic from_canonical(const SurfaceModel& s, const GroupWord& word, int exponent) {
    ClosedGeodesic g;
    g.word = word;
    g.iso = evaluate_word(s, word);
    g.unit_length = translation_length(g.iso);
    g.length = s.scale().length(g.unit_length);
    const Walk w = trace_closed(s, g.iso);
    g.chords = repeat_period(w.chords, w.length, exponent);
    g.primitive = exponent == 1;
    return g;
}

// Spatial hash on tile centres; distinct tiles within the search radius are
// orders of magnitude further apart than the cell size.
class CenterIndex {
public:
    explicit CenterIndex(double cell) : cell_(cell) {}

    // Returns false if a centre within tol is already present.
    bool insert(cplx c, std::uint32_t id, const std::vector<cplx>& centers) {
        const std::int64_t ix = cell_of(c.real()), iy = cell_of(c.imag());
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const auto range = map_.equal_range(key(ix + dx, iy + dy));
                for (auto it = range.first; it != range.second; ++it)
                    if (std::abs(centers[it->second] - c) < 0.25 * cell_) return false;
            }
        map_.emplace(key(ix, iy), id);
        return true;
    }

private:
    std::int64_t cell_of(double x) const { return static_cast<std::int64_t>(std::floor(x / cell_)); }
    static std::uint64_t key(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull) ^ static_cast<std::uint64_t>(y);
    }

    double cell_;
    std::unordered_multimap<std::uint64_t, std::uint32_t> map_;
};

struct CensusKey {
    bool operator()(const ClosedGeodesic& a, const ClosedGeodesic& b) const {
        const auto la = std::llround(a.unit_length * 1e9), lb = std::llround(b.unit_length * 1e9);
        if (la != lb) return la < lb;
        return a.word < b.word;
    }
};

}  // namespace

ClosedGeodesic make_closed_geodesic(const SurfaceModel& s, const GroupWord& w) {
    const ConjugacyClass cls = canonical_conjugacy(s, w);
    return from_canonical(s, cls.word, cls.exponent);
}

ClosedGeodesic reversed(const SurfaceModel& s, const ClosedGeodesic& g) {
    return make_closed_geodesic(s, g.word.inverse());
}

std::vector<Chord> chord_decomposition(const SurfaceModel& s, const Isometry& h) {
    const Walk w = trace_closed(s, h);
    const int k = static_cast<int>(std::lround(translation_length(h) / w.length));
    return repeat_period(w.chords, w.length, std::max(1, k));
}

std::vector<Chord> chord_decomposition(const SurfaceModel& s, const ClosedGeodesic& g) {
    return chord_decomposition(s, g.iso);
}

double word_length_ratio(const SurfaceModel& s, int k0) {
    const int r = 2 * s.genus();
    std::vector<Letter> alphabet;
    for (Letter x = 1; x <= r; ++x) alphabet.push_back(x);
    for (Letter x = 1; x <= r; ++x) alphabet.push_back(-x);
    double best = 1e300;
    struct Frame {
        Isometry m;
        Letter first, last;
        int len;
    };
    std::vector<Frame> stack{{Isometry(), 0, 0, 0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.len > 0 && f.first != -f.last) {
            const double tr = std::abs(f.m.trace());
            const double ell = tr > 2.0 ? 2.0 * std::acosh(0.5 * tr) : 0.0;
            best = std::min(best, ell / f.len);
        }
        if (f.len == k0) continue;
        for (Letter x : alphabet) {
            if (x == -f.last) continue;
            stack.push_back({f.m * s.letter_isometry(x), f.len == 0 ? x : f.first, x, f.len + 1});
        }
    }
    return best;
}

Census enumerate_census(const SurfaceModel& s, double T, const CensusOptions& opts) {
    if (!(T > 0.0)) throw Error("census cutoff must be positive");
    Census out;
    out.genus = s.genus();
    out.kappa = s.scale().kappa();
    out.max_length = T;
    out.epsilon0 = word_length_ratio(s, 6);
    out.complete = true;

    const double t_unit = T / s.scale().factor();
    const double dv = s.vertex_radius();
    const double r_disp = 2.0 * std::asinh(std::cosh(dv) * std::sinh(0.5 * t_unit));
    const double r_tile = r_disp + dv + 1e-9;

    std::vector<Isometry> tiles{Isometry()};
    std::vector<cplx> centers{cplx(0.0, 0.0)};
    CenterIndex index(1e-9);
    index.insert(centers[0], 0, centers);
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        for (int j = 0; j < s.side_count(); ++j) {
            const Isometry v = tiles[i] * s.pairing(j);
            const cplx c = v(cplx(0.0, 0.0));
            if (dist_unit(0.0, c) > r_tile) continue;
            if (!index.insert(c, static_cast<std::uint32_t>(centers.size()), centers)) continue;
            tiles.push_back(v);
            centers.push_back(c);
        }
        if (tiles.size() > opts.max_tiles) {
            out.complete = false;
            break;
        }
    }

    const double cosh_dv = std::cosh(dv) * (1.0 + 1e-12) + 1e-12;
    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i < tiles.size(); ++i) {
        const double d = dist_unit(0.0, centers[i]);
        if (d > r_disp + 1e-9) continue;
        const double tr = std::abs(tiles[i].trace());
        if (!(tr > 2.0 + kClassifyTol)) continue;
        const double ell = 2.0 * std::acosh(0.5 * tr);
        if (ell > t_unit * (1.0 + 1e-12)) continue;
        if (std::sinh(0.5 * d) / std::sinh(0.5 * ell) > cosh_dv) continue;
        candidates.push_back(i);
    }

    struct Found {
        GroupWord word;
        bool primitive = false;
        bool failed = false;
    };
    std::vector<Found> found(candidates.size());
    parallel_for(candidates.size(), opts.jobs, [&](std::size_t k) {
        const Isometry& h = tiles[candidates[k]];
        try {
            const Walk w = trace_closed(s, h);
            found[k].primitive = std::abs(translation_length(h) - w.length) < 1e-6;
            found[k].word = least_rotation(w.word);
        } catch (const Error&) {
            found[k].failed = true;
        }
    });

    std::vector<GroupWord> words;
    for (const Found& f : found) {
        if (f.failed) out.complete = false;
        if (f.primitive && !f.failed) words.push_back(f.word);
    }
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());

    out.items.resize(words.size());
    parallel_for(words.size(), opts.jobs, [&](std::size_t k) { out.items[k] = from_canonical(s, words[k], 1); });
    out.items.erase(std::remove_if(out.items.begin(), out.items.end(),
                                   [&](const ClosedGeodesic& g) { return g.length > T; }),
                    out.items.end());
    std::sort(out.items.begin(), out.items.end(), CensusKey{});
    return out;
}

double find_systole(const SurfaceModel& s) {
    // Generators translate by twice the inradius, so the systole is at most that.
    const double bound = s.scale().length(2.0 * s.inradius() + 1e-7);
    const Census c = enumerate_census(s, bound);
    if (!c.complete || c.items.empty()) throw Error("systole search failed");
    return c.systole();
}

SurfaceModel with_computed_systole(const SurfaceModel& s) { return s.with_systole(find_systole(s)); }

double huber_ratio(const Census& c) {
    if (!c.complete) throw IncompleteCensusError("Huber ratio needs a complete census");
    const double x = std::sqrt(c.kappa) * c.max_length;
    return x * static_cast<double>(c.size()) / std::exp(x);
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string header_line(const Census& c) {
    return "GCLAB-CENSUS v1; g=" + std::to_string(c.genus) + "; kappa=" + format_double(c.kappa) +
           "; T=" + format_double(c.max_length) + "; epsilon0=" + format_double(c.epsilon0) +
           "; complete=" + (c.complete ? "1" : "0");
}

double parse_double(const std::string& text) {
    if (text.empty()) throw CacheParseError("empty number in census cache");
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) throw CacheParseError("malformed number '" + text + "' in census cache");
    return v;
}

std::vector<std::string> split(const std::string& line, const std::string& sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(line.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + sep.size();
    }
    return out;
}

}  // namespace

void save_census(const Census& c, const std::string& path) {
    std::string body = header_line(c) + "\n";
    for (const ClosedGeodesic& g : c.items)
        body += g.word.str() + ";" + format_double(g.length) + ";" + format_double(g.trace()) + "\n";
    char trailer[64];
    std::snprintf(trailer, sizeof trailer, "end;%zu;%016" PRIx64 "\n", c.items.size(), fnv1a(body));
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write census cache " + tmp);
        f << body << trailer;
        f.flush();
        if (!f) throw Error("failed writing census cache " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Census load_census(const SurfaceModel& s, const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CacheParseError("cannot open census cache " + path);
    std::vector<std::string> lines;
    std::string line;
    bool ends_with_newline = true;
    while (std::getline(f, line)) {
        lines.push_back(line);
        ends_with_newline = !f.eof();
    }
    if (lines.empty()) throw CacheParseError("empty census cache");

    const std::string magic = "GCLAB-CENSUS ";
    if (lines[0].rfind(magic, 0) != 0) throw CacheParseError("not a census cache");
    const auto fields = split(lines[0].substr(magic.size()), "; ");
    if (fields.empty() || fields[0] != "v1") throw CacheVersionError("unsupported census cache version '" + fields[0] + "'");
    if (fields.size() != 6) throw CacheParseError("malformed census cache header");
    std::map<std::string, std::string> kv;
    for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto eq = fields[i].find('=');
        if (eq == std::string::npos) throw CacheParseError("malformed census cache header field");
        kv[fields[i].substr(0, eq)] = fields[i].substr(eq + 1);
    }
    for (const char* k : {"g", "kappa", "T", "epsilon0", "complete"})
        if (!kv.count(k)) throw CacheParseError(std::string("census cache header lacks ") + k);

    Census c;
    c.genus = static_cast<int>(parse_double(kv["g"]));
    c.kappa = parse_double(kv["kappa"]);
    c.max_length = parse_double(kv["T"]);
    c.epsilon0 = parse_double(kv["epsilon0"]);
    if (kv["complete"] != "0" && kv["complete"] != "1") throw CacheParseError("malformed completeness flag");
    c.complete = kv["complete"] == "1";
    if (c.genus != s.genus() || c.kappa != s.scale().kappa())
        throw CacheVersionError("census cache was built for a different surface");

    if (lines.size() < 2 || !ends_with_newline || lines.back().rfind("end;", 0) != 0)
        throw CacheParseError("census cache is truncated");
    const auto trailer = split(lines.back(), ";");
    if (trailer.size() != 3) throw CacheParseError("malformed census cache trailer");
    const std::size_t count = static_cast<std::size_t>(parse_double(trailer[1]));
    if (count != lines.size() - 2) throw CacheParseError("census cache record count mismatch");

    std::string body;
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) body += lines[i] + "\n";
    char sum[32];
    std::snprintf(sum, sizeof sum, "%016" PRIx64, fnv1a(body));
    if (trailer[2] != sum) throw CacheChecksumError("census cache checksum mismatch");

    c.items.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto rec = split(lines[i + 1], ";");
        if (rec.size() != 3) throw CacheParseError("malformed census cache record");
        GroupWord w;
        try {
            w = GroupWord::parse(rec[0]);
        } catch (const Error&) {
            throw CacheParseError("malformed word in census cache");
        }
        const double length = parse_double(rec[1]);
        const double trace = parse_double(rec[2]);
        ClosedGeodesic& g = c.items[i];
        g = from_canonical(s, w, 1);
        if (least_rotation(trace_closed(s, g.iso).word) != w)
            throw CacheChecksumError("census cache record is not a canonical word");
        if (std::abs(g.length - length) > 1e-12 || std::abs(g.trace() - trace) > 1e-12 * std::max(1.0, std::abs(trace)))
            throw CacheChecksumError("census cache length disagrees with its word");
        g.length = length;
    }
    return c;
}

}  // namespace gclab
