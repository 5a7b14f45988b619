#include "dessin/antifarey.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace dessin {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) {
    double y = x - std::floor(x);
    return (y >= 1.0) ? 0.0 : y;
}

// Signed representative of x modulo 2*pi in (-pi, pi].
double wrap_pi(double x) {
    double y = std::remainder(x, kTwoPi);
    return (y <= -kPi) ? kPi : y;
}

cplx unit(double t) { return std::polar(1.0, kTwoPi * t); }

double full_angle(cplx z) { return frac(std::arg(z) / kTwoPi); }

// Quotient angle of a boundary point, snapping the wrap-around to 0.
double qangle(int n, cplx z) {
    double t = frac(double(n) * full_angle(z));
    return (t > 1.0 - 1e-13) ? 0.0 : t;
}

// 1-based index of the full-circle arc [ (i-1)/n, i/n ) containing z.
int arc_index(int n, cplx z) {
    int k = int(std::floor(full_angle(z) * n));
    return std::min(k, n - 1) + 1;
}

// Anti-Moebius transform z -> (a u + b)/(c u + d), u = s ? conj(z) : z.
struct AM {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};
    bool s = false;

    cplx apply(cplx z) const {
        cplx u = s ? std::conj(z) : z;
        return (a * u + b) / (c * u + d);
    }
    void normalize() {
        double m = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
        if (m > 0.0) {
            a /= m;
            b /= m;
            c /= m;
            d /= m;
        }
    }
};

AM compose(const AM& t1, const AM& t2) {
    cplx a2 = t2.a, b2 = t2.b, c2 = t2.c, d2 = t2.d;
    if (t1.s) {
        a2 = std::conj(a2);
        b2 = std::conj(b2);
        c2 = std::conj(c2);
        d2 = std::conj(d2);
    }
    AM r;
    r.a = t1.a * a2 + t1.b * c2;
    r.b = t1.a * b2 + t1.b * d2;
    r.c = t1.c * a2 + t1.d * c2;
    r.d = t1.c * b2 + t1.d * d2;
    r.s = (t1.s != t2.s);
    return r;
}

AM side_reflection(const AntiFareyConfig& af, int side) {
    cplx c = af.center[side - 1];
    return AM{c, cplx(-1.0), cplx(1.0), -std::conj(c), true};
}

void check_side(const AntiFareyConfig& af, int side) {
    if (side < 1 || side > af.n)
        throw std::invalid_argument("antifarey: side index out of range");
}

}  // namespace

AntiFareyConfig make_antifarey(int d) {
    if (d < 2) throw std::invalid_argument("make_antifarey: need d >= 2");
    AntiFareyConfig af;
    af.d = d;
    af.n = d + 1;
    af.omega = unit(1.0 / af.n);
    af.vertex.resize(af.n);
    for (int m = 0; m < af.n; ++m) af.vertex[m] = unit(double(m) / af.n);
    af.center.resize(af.n);
    af.radius.resize(af.n);
    for (int j = 0; j < af.n; ++j) {
        cplx u = af.vertex[j];
        cplx v = af.vertex[(j + 1) % af.n];
        cplx c = (u + v) / (1.0 + (u * std::conj(v)).real());
        af.center[j] = c;
        af.radius[j] = std::sqrt(std::norm(c) - 1.0);
    }
    return af;
}

cplx reflect_side(const AntiFareyConfig& af, int side, cplx z) {
    check_side(af, side);
    cplx c = af.center[side - 1];
    double r2 = af.radius[side - 1] * af.radius[side - 1];
    return c + r2 / std::conj(z - c);
}

bool admissible(const AntiFareyConfig& af, const SymbolSeq& s) {
    int m = int(s.s.size());
    for (int j = 0; j < m; ++j) {
        if (s.s[j] < 1 || s.s[j] > af.n) return false;
        if (j + 1 < m && s.s[j] == s.s[j + 1]) return false;
    }
    if (s.preperiod >= 0) {
        if (m == 0 || s.preperiod >= m) return false;
        if (s.s[m - 1] == s.s[s.preperiod]) return false;
    }
    return true;
}

double angle_from_symbols(const AntiFareyConfig& af, const SymbolSeq& s,
                          int depth, double* err) {
    if (!admissible(af, s))
        throw std::invalid_argument("angle_from_symbols: inadmissible sequence");
    if (s.s.empty()) {
        if (err) *err = 1.0;
        return 0.0;
    }
    int m = int(s.s.size());
    int period = (s.preperiod >= 0) ? m - s.preperiod : 0;
    auto sym = [&](int j) -> int {
        if (j < m) return s.s[j];
        return s.s[s.preperiod + (j - s.preperiod) % period];
    };

    // Parabolic closed form: a 2-periodic tail over two sides sharing a
    // vertex nests onto that vertex; push it through the prefix exactly.
    if (period == 2 && depth <= 0) {
        int p = s.s[s.preperiod], q = s.s[s.preperiod + 1];
        int shared = -1;
        if (q % af.n + 1 == p || (q == af.n && p == 1) || p % af.n + 1 == q ||
            (p == af.n && q == 1)) {
            // Side i joins vertex[i-1] and vertex[i mod n]; consecutive sides
            // i, i+1 share vertex[i mod n].
            if (p % af.n + 1 == q || (p == af.n && q == 1))
                shared = p % af.n;
            else
                shared = q % af.n;
        }
        if (shared >= 0) {
            cplx z = af.vertex[shared];
            for (int j = s.preperiod - 1; j >= 0; --j)
                z = reflect_side(af, s.s[j], z);
            if (err) *err = 0.0;
            return qangle(af.n, z);
        }
    }

    int cap;
    if (depth > 0)
        cap = depth;
    else if (period > 0)
        cap = 400;
    else
        cap = m;

    AM acc;
    cplx p_prev(0.0, 0.0);
    double diam_est = 2.0;
    for (int j = 0; j < cap; ++j) {
        acc = compose(acc, side_reflection(af, sym(j)));
        acc.normalize();
        cplx p = acc.apply(cplx(0.0, 0.0));
        diam_est = std::abs(p - p_prev);
        p_prev = p;
        if (j > 2 && diam_est < 1e-14) break;
    }
    if (err) *err = std::max(diam_est, 1e-15) * af.n;
    return qangle(af.n, p_prev);
}

SymbolSeq symbols_from_angle(const AntiFareyConfig& af, double theta, int depth) {
    SymbolSeq out;
    if (depth <= 0) return out;
    out.s.reserve(depth);
    cplx z = unit(frac(theta) / af.n);
    int last = 0;
    while (int(out.s.size()) < depth) {
        int vm = -1;
        for (int m = 0; m < af.n; ++m) {
            if (std::abs(z - af.vertex[m]) < 1e-11) {
                vm = m;
                break;
            }
        }
        if (vm >= 0) {
            // The point is (numerically) an ideal vertex: the expansion
            // alternates the two sides meeting there.
            int sa = (vm == 0) ? af.n : vm;
            int sb = vm + 1;
            int first = std::min(sa, sb), second = std::max(sa, sb);
            if (first == last) std::swap(first, second);
            bool flip = false;
            while (int(out.s.size()) < depth) {
                out.s.push_back(flip ? second : first);
                flip = !flip;
            }
            break;
        }
        int i = arc_index(af.n, z);
        if (i == last) {
            // Numerical drift dropped the reflected point back into the arc
            // it came from; snap to the nearer neighboring arc.
            double t = full_angle(z) * af.n;
            double in_arc = t - std::floor(t);
            i = (in_arc < 0.5) ? (i == 1 ? af.n : i - 1) : (i == af.n ? 1 : i + 1);
        }
        out.s.push_back(i);
        last = i;
        z = reflect_side(af, i, z);
        z /= std::abs(z);
    }
    return out;
}

double rd_angle(const AntiFareyConfig& af, double theta) {
    cplx z = unit(frac(theta) / af.n);
    cplx w = reflect_side(af, 1, z);
    w /= std::abs(w);
    return qangle(af.n, w);
}

SymbolSeq sheet_word(const AntiFareyConfig& af, double theta, int depth) {
    SymbolSeq raw = symbols_from_angle(af, theta, depth + 1);
    SymbolSeq out;
    out.s.reserve(depth);
    for (int j = 0; j + 1 < int(raw.s.size()); ++j) {
        int diff = raw.s[j + 1] - raw.s[j];
        out.s.push_back(((diff % af.n + af.n) % af.n) + 1);
    }
    return out;
}

std::vector<double> rd_preimages(const AntiFareyConfig& af, double theta) {
    std::vector<double> out;
    double th = frac(theta);
    for (int m = 0; m < af.n; ++m) {
        cplx w = unit((th + m) / af.n);
        cplx x = reflect_side(af, 1, w);
        x /= std::abs(x);
        double t = full_angle(x);
        if (t > 1.0 - 1e-12) t = 0.0;
        if (t < 1.0 / af.n - 1e-12) out.push_back(frac(af.n * t));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> periodic_angles(const AntiFareyConfig& af, int period) {
    if (period < 1) throw std::invalid_argument("periodic_angles: period < 1");
    auto iterate = [&](double th) {
        for (int j = 0; j < period; ++j) th = rd_angle(af, th);
        return th;
    };
    // Signed circular mismatch rd^p(theta) - theta; roots are the periodic
    // angles.  All roots except 0 lie inside monotone branches, so a dense
    // grid brackets every one of them.
    auto g = [&](double th) {
        double diff = iterate(th) - th;
        diff -= std::round(diff);
        return diff;
    };
    long branches = 1;
    for (int j = 0; j < period; ++j) branches *= af.d;
    long grid = std::max<long>(4000, 60 * branches);
    std::vector<double> found{0.0};
    double g_prev = g(0.0);
    double t_prev = 0.0;
    for (long i = 1; i <= grid; ++i) {
        double t = double(i) / double(grid);
        double gv = g(frac(t));
        // Skip brackets that straddle a branch jump or the +-1/2 wrap.
        if (g_prev == 0.0) {
            if (t_prev > 0.0) found.push_back(t_prev);
        } else if (gv != 0.0 && ((g_prev < 0) != (gv < 0)) &&
                   std::abs(g_prev) + std::abs(gv) < 0.5) {
            double lo = t_prev, hi = t, glo = g_prev;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double gm = g(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((gm < 0) == (glo < 0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            found.push_back(frac(0.5 * (lo + hi)));
        }
        g_prev = gv;
        t_prev = t;
    }
    std::sort(found.begin(), found.end());
    std::vector<double> out;
    for (double t : found) {
        bool dup = false;
        for (double s : out)
            if (std::abs(t - s) < 1e-9 || std::abs(t - s) > 1.0 - 1e-9) dup = true;
        if (!dup) out.push_back(t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dynamical side: sheets, addresses, rays.

namespace {

// Frame for the sheet decomposition of the rank-1 preimage region.  The
// slit leaves the cusp in the direction the horn opens; its sigma-preimages
// are the n walls separating the sheets.  Wall j approaches the ramified
// center along the asymptote psi0 + 2 pi j / n; two walls terminate
// tangentially on the boundary cusp v_b and the rest end at the interior
// preimages of the cusp, a zero of G = sigma - y_c of order v collecting v
// wall ends at exactly 2 pi / v spaced directions.  The piece between the
// two cusp walls carries letter 1 and letters increase clockwise around
// the center, which is the orientation matching the sheet_word letters of
// boundary rays.
struct Precusp {
    cplx w{};                  // interior preimage of the cusp
    double R = 0.0;            // |w - a|
    int v = 1;                 // order of the zero of G here
    double loc = 0.0;          // radius of the wedge lookup around w
    std::vector<double> ray;   // directions of the v wall ends
    std::vector<int> wall;     // asymptote index of each wall end
    std::vector<double> div;   // wedge dividers: rays + radial shadow, sorted
    std::vector<int> wletter;  // letter of wedge (div[i], div[i+1])
    std::vector<int> adj;      // letters of the sheets touching this pin
};

struct SheetFrame {
    double phiL = 0.0;    // image direction of the slit
    double psi0 = 0.0;    // asymptotic wall direction at the center
    double psiref = 0.0;  // mid-sector anchor direction
    double r0 = 0.0;      // anchor radius
    double rsafe = 0.0;   // arc radius below every interior cusp preimage
    cplx slit_dir{};
    int offset = 0;  // raw ccw sector of the piece carrying letter 1
    bool calibrated = false;
    std::vector<Precusp> pins;
    cplx cusp_axis{};  // unit direction from v_b toward the center a
    // Branch transport data.  The polynomial has exactly two finite branch
    // values, the cusp value and the image y_bk of the other vertex color;
    // dragging a fiber around y_bk permutes the branches, so sheet letters
    // are transported to the base fiber along paths that never cross the
    // cut [y_c, y_bk].
    cplx y_bk{};
    bool has_bk = false;
    cplx zbase{};                 // f(a), the common target of transports
    std::vector<cplx> base_fib;   // outer fiber points over zbase
    std::vector<int> base_letter; // their sheet letters (a bijection to 2..n)
    bool cont_ok = false;
};

cplx sheet_g(const SliceConfig& cfg, const DiskParam& dp, cplx w) {
    return cfg.f(eta(dp, w)) - cfg.y_c;
}

struct SheetResult {
    int sector = 0;  // raw counterclockwise sector, 0-based
    double margin = 0.0;
    bool ambiguous = false;
};

// Unwrapped increment of arg(G) along w(t) for t in [t0, t1], refined until
// each step turns by less than ~0.4 pi.  Fails (false) on a near-vanishing
// sample (the path ran into a preimage of the cusp).
template <class PathF>
bool unwrap_arg(const SliceConfig& cfg, const DiskParam& dp, PathF&& path,
                double t0, double t1, int coarse, double floor_g,
                double* delta) {
    auto G = [&](double t) { return sheet_g(cfg, dp, path(t)); };
    double total = 0.0;
    bool ok = true;
    std::function<void(double, cplx, double, cplx, int)> seg =
        [&](double ta, cplx ga, double tb, cplx gb, int depth) {
            if (!ok) return;
            if (std::abs(ga) < floor_g || std::abs(gb) < floor_g) {
                ok = false;
                return;
            }
            double dth = std::arg(gb / ga);
            if (std::abs(dth) < 1.2 || depth >= 48) {
                total += dth;
                return;
            }
            double tm = 0.5 * (ta + tb);
            cplx gm = G(tm);
            seg(ta, ga, tm, gm, depth + 1);
            seg(tm, gm, tb, gb, depth + 1);
        };
    cplx gp = G(t0);
    for (int i = 0; i < coarse && ok; ++i) {
        double ta = t0 + (t1 - t0) * double(i) / coarse;
        double tb = t0 + (t1 - t0) * double(i + 1) / coarse;
        cplx gb = G(tb);
        seg(ta, gp, tb, gb, 0);
        gp = gb;
    }
    *delta = total;
    return ok;
}

// Raw counterclockwise sector of w, counted by continuing arg(G) from the
// mid-sector anchor along a path whose arc runs at a radius below every
// interior cusp preimage (where consecutive walls always bound one sector),
// then radially out to w.
SheetResult sheet_of_raw(const SliceConfig& cfg, const DiskParam& dp,
                         const SheetFrame& fr, cplx w) {
    SheetResult res;
    int n = cfg.d + 1;
    cplx u = w - dp.a;
    double R = std::abs(u);
    if (R < 1e-11 * dp.r) {
        res.ambiguous = true;
        return res;  // ramified center: every sheet meets here
    }
    double phi = std::arg(u);
    double rc = std::min(R, fr.rsafe);
    double floor_g = 1e-13 * std::max(1.0, dp.diam);

    cplx g0 = sheet_g(cfg, dp, dp.a + fr.r0 * std::polar(1.0, fr.psiref));
    double cs = std::fmod(std::arg(g0) - fr.phiL, kTwoPi);
    if (cs < 0) cs += kTwoPi;

    double delta = 0.0;
    bool ok = true;
    if (std::abs(rc - fr.r0) > 1e-15 * dp.r) {
        double d1 = 0.0;
        ok = unwrap_arg(
            cfg, dp,
            [&](double t) { return dp.a + t * std::polar(1.0, fr.psiref); },
            fr.r0, rc, 16, floor_g, &d1);
        delta += d1;
    }
    double dpsi = std::fmod(phi - fr.psiref, kTwoPi);
    if (dpsi < 0) dpsi += kTwoPi;
    if (ok && dpsi > 0.0) {
        double d2 = 0.0;
        int coarse = std::max(8, int(std::ceil(dpsi / (kTwoPi / (8.0 * n)))));
        ok = unwrap_arg(
            cfg, dp,
            [&](double s) {
                return dp.a + rc * std::polar(1.0, fr.psiref + s);
            },
            0.0, dpsi, coarse, floor_g, &d2);
        delta += d2;
    }
    if (ok && R > rc * (1.0 + 1e-15)) {
        double d3 = 0.0;
        ok = unwrap_arg(
            cfg, dp, [&](double t) { return dp.a + t * std::polar(1.0, phi); },
            rc, R, 16, floor_g, &d3);
        delta += d3;
    }
    if (!ok) {
        // Path grazed a preimage of the cusp; fall back to the straight
        // frame.
        double rel = std::fmod(phi - fr.psi0, kTwoPi);
        if (rel < 0) rel += kTwoPi;
        res.sector = int(std::floor(rel / (kTwoPi / n))) % n;
        res.ambiguous = true;
        return res;
    }
    double cend = cs + delta;
    long sec = long(std::floor(cend / kTwoPi));
    res.sector = int(((sec % n) + n) % n);
    res.margin = std::abs(wrap_pi(cend));
    cplx gw = sheet_g(cfg, dp, w);
    if (res.margin < 1e-5 || std::abs(gw) < 1e-9 * std::max(1.0, dp.diam))
        res.ambiguous = true;
    return res;
}

int relabel_raw(const SheetFrame& fr, int raw, int n) {
    return ((fr.offset - raw) % n + n) % n + 1;
}

// G as a holomorphic function of zeta = conj(w), with derivative.
struct JetH {
    cplx h{}, hp{};
};

JetH eval_H(const SliceConfig& cfg, const DiskParam& dp, cplx zeta) {
    cplx q = zeta - std::conj(dp.a);
    cplx x = dp.a + dp.r * dp.r / q;
    JetH out;
    out.h = cfg.f(x) - cfg.y_c;
    out.hp = cfg.df(x) * (-dp.r * dp.r / (q * q));
    return out;
}

// Follow the wall leaving the interior cusp preimage p in direction `dir`
// down to radius rstop and report its angular position there.  Predictor
// along the level curve of arg(G) with |G| increasing (each wall maps
// bijectively onto the slit, so |G| is monotone along it), Newton corrector
// restoring the level.
bool trace_wall(const SliceConfig& cfg, const DiskParam& dp, double phiL,
                const Precusp& p, double dir, double rstop, double* t_end) {
    double h0 = std::min(0.004 * dp.r, 0.1 * (p.R - rstop));
    if (!(h0 > 0.0)) return false;
    cplx zeta = std::conj(p.w + h0 * std::polar(1.0, dir));
    for (int step = 0; step < 6000; ++step) {
        bool onlevel = false;
        for (int it = 0; it < 10; ++it) {
            JetH e = eval_H(cfg, dp, zeta);
            if (!(std::abs(e.h) > 0.0) || !(std::abs(e.hp) > 0.0)) return false;
            double err = wrap_pi(std::arg(e.h) - phiL);
            if (std::abs(err) < 1e-11) {
                onlevel = true;
                break;
            }
            zeta -= cplx(0.0, 1.0) * err * e.h / e.hp;
        }
        cplx w = std::conj(zeta);
        double R = std::abs(w - dp.a);
        if (!onlevel || !std::isfinite(R) || R > 1.5 * dp.r) return false;
        if (R <= rstop) {
            *t_end = std::arg(w - dp.a);
            return true;
        }
        JetH e = eval_H(cfg, dp, zeta);
        cplx u = e.h / e.hp;
        double un = std::abs(u);
        if (!(un > 0.0) || !std::isfinite(un)) return false;
        double s = std::clamp(0.35 * un, 2e-4 * dp.r, 0.02 * dp.r);
        zeta += (s / un) * u;
    }
    return false;
}

std::vector<PreimageInfo> preimage_set(const SliceConfig& cfg,
                                       const DiskParam& dp,
                                       const SheetFrame& fr, cplx z);

SheetFrame make_frame(const SliceConfig& cfg, const DiskParam& dp) {
    SheetFrame fr;
    int n = cfg.d + 1;
    cplx dv = cfg.v_b - dp.a;
    cplx u = -cfg.jets[2] * dv * dv;
    fr.phiL = std::arg(u);
    fr.slit_dir = u / std::abs(u);
    fr.psi0 = (fr.phiL - std::arg(cfg.f.lead())) / double(n);
    fr.psiref = fr.psi0 + kPi / double(n);
    fr.cusp_axis = -dv / std::abs(dv);

    // Interior preimages of the cusp: reflections of the outer roots of
    // f = y_c.  v_b is the double root on the boundary; an outer root of
    // multiplicity v is a vertex of valence v and collects v wall ends.
    Poly g = cfg.f;
    g.c[0] -= cfg.y_c;
    Roots rr = roots(g, 1e-4);
    bool ok = rr.converged;
    double rmin = dp.r;
    int mult_sum = 0;
    if (ok) {
        for (size_t i = 0; i < rr.points.size(); ++i) {
            cplx x = rr.points[i];
            if (std::abs(x - dp.a) <= dp.r * (1.0 + 1e-6)) continue;
            Precusp p;
            p.w = eta(dp, x);
            p.R = std::abs(p.w - dp.a);
            p.v = rr.mult[i];
            mult_sum += p.v;
            // G(w) ~ lam conj(w - w*)^v with
            // lam = (f^(v)(x)/v!) (-(x - a)^2 / r^2)^v.
            Poly der = cfg.f;
            double fact = 1.0;
            for (int k = 0; k < p.v; ++k) {
                der = der.derivative();
                fact *= k + 1;
            }
            cplx lam = der(x) / fact;
            cplx step = -(x - dp.a) * (x - dp.a) / (dp.r * dp.r);
            for (int k = 0; k < p.v; ++k) lam *= step;
            if (!(std::abs(lam) > 0.0)) {
                ok = false;
                break;
            }
            double base = (std::arg(lam) - fr.phiL) / p.v;
            for (int j = 0; j < p.v; ++j)
                p.ray.push_back(wrap_pi(base + kTwoPi * j / p.v));
            fr.pins.push_back(p);
            rmin = std::min(rmin, p.R);
        }
        if (ok) ok = mult_sum == n - 2;
    }
    fr.rsafe = fr.pins.empty() ? 0.45 * dp.r : 0.8 * rmin;
    fr.r0 = std::min(0.05 * dp.r, 0.5 * fr.rsafe);

    for (Precusp& p : fr.pins) {
        double dmin = std::min({p.R, dp.r - p.R, std::abs(p.w - cfg.v_b)});
        for (const Precusp& q : fr.pins)
            if (&q != &p) dmin = std::min(dmin, std::abs(p.w - q.w));
        p.loc = std::clamp(0.5 * dmin, 0.0, 0.25 * dp.r);
    }

    // Tag every traced wall with its asymptote; the two untagged asymptotes
    // are the cusp walls and must be circularly adjacent.  The sector they
    // bound is the central piece, letter 1.
    if (ok) {
        double rstop = std::max(1.3 * fr.r0, 2.5e-2 * dp.r);
        rstop = std::min(rstop, 0.9 * fr.rsafe);
        std::vector<char> hit(n, 0);
        for (Precusp& p : fr.pins) {
            for (double dir : p.ray) {
                double te = 0.0;
                if (!trace_wall(cfg, dp, fr.phiL, p, dir, rstop, &te)) {
                    ok = false;
                    break;
                }
                int bj = -1;
                double best = 1e9;
                for (int j = 0; j < n; ++j) {
                    double off =
                        std::abs(wrap_pi(te - (fr.psi0 + kTwoPi * j / n)));
                    if (off < best) {
                        best = off;
                        bj = j;
                    }
                }
                if (hit[bj]) {
                    ok = false;
                    break;
                }
                hit[bj] = 1;
                p.wall.push_back(bj);
            }
            if (!ok) break;
        }
        if (ok) {
            int j0 = -1, cnt = 0;
            for (int j = 0; j < n; ++j)
                if (!hit[j] && !hit[(j + 1) % n]) {
                    j0 = j;
                    ++cnt;
                }
            ok = cnt == 1;
            if (ok) fr.offset = j0;
        }
        // A wall tagged with asymptote j realizes the seam of index
        // m = n - ((j - j0 - 1) mod n), which separates sheets m and m+1;
        // the sheets touching a pin are the union over its wall ends.
        if (ok) {
            for (Precusp& p : fr.pins) {
                for (int j : p.wall) {
                    int m = n - (((j - fr.offset - 1) % n + n) % n);
                    for (int l : {m, m + 1})
                        if (l >= 2 && l <= n &&
                            std::find(p.adj.begin(), p.adj.end(), l) ==
                                p.adj.end())
                            p.adj.push_back(l);
                }
                std::sort(p.adj.begin(), p.adj.end());
            }
        }
    }
    fr.calibrated = ok;

    // Wedge letters around each pin: dividers are the wall ends plus the
    // radial shadow (behind the pin the path count jumps by the zero order,
    // matching the tiles meeting there), letters read off a mid-wedge
    // representative by the path count.
    for (Precusp& p : fr.pins) {
        p.div = p.ray;
        p.div.push_back(wrap_pi(std::arg(p.w - dp.a)));
        std::sort(p.div.begin(), p.div.end());
        int nv = int(p.div.size());
        for (int i = 0; i < nv; ++i) {
            double lo = p.div[i];
            double hi = i + 1 < nv ? p.div[i + 1] : p.div[0] + kTwoPi;
            cplx rep = p.w + 0.85 * p.loc * std::polar(1.0, 0.5 * (lo + hi));
            SheetResult sr = sheet_of_raw(cfg, dp, fr, rep);
            p.wletter.push_back(relabel_raw(fr, sr.sector, n));
            if (sr.ambiguous) fr.calibrated = false;
        }
    }

    // Second branch value: the common image of the other vertex color,
    // read off the critical points of f away from the cusp value.
    fr.zbase = cfg.f(dp.a);
    {
        double scale = std::max(dp.diam, std::abs(cfg.y_c)) + 1.0;
        Roots cr = roots(cfg.f.derivative(), 1e-4);
        if (cr.converged) {
            cplx acc = 0.0;
            int cnt = 0;
            bool consistent = true;
            for (cplx x : cr.points) {
                cplx v = cfg.f(x);
                if (std::abs(v - cfg.y_c) < 1e-5 * scale) continue;
                if (cnt && std::abs(v - acc / double(cnt)) > 1e-3 * scale)
                    consistent = false;
                acc += v;
                ++cnt;
            }
            if (cnt && consistent) {
                fr.y_bk = acc / double(cnt);
                fr.has_bk = true;
            }
        }
    }

    // Letters of the base fiber, settled by the local classifier where it
    // is most reliable; every other fiber is transported here.
    if (fr.calibrated && fr.has_bk) {
        std::vector<PreimageInfo> bs = preimage_set(cfg, dp, fr, fr.zbase);
        bool good = int(bs.size()) == cfg.d;
        for (int i = 0; good && i < cfg.d; ++i)
            good = bs[i].letter == i + 2 && bs[i].margin > 0.05;
        if (good) {
            for (const PreimageInfo& pi : bs) {
                fr.base_fib.push_back(eta(dp, pi.disk));
                fr.base_letter.push_back(pi.letter);
            }
            fr.cont_ok = true;
        }
    }
    return fr;
}

// Waypoints of a transport path from z to the base that never crosses the
// cut [y_c, y_bk].  The cut domain is the image domain slit from the cusp
// to the interior branch value; it is simply connected, and every path in
// it detours around the y_bk end of the cut, never around the cusp end.
// Points sitting close to the cut get nudged to their own side first.
std::vector<cplx> transport_path(const SheetFrame& fr, cplx yc, cplx z) {
    std::vector<cplx> way;
    way.push_back(z);
    cplx p = yc, q = fr.y_bk;
    cplx t = q - p;
    double L = std::abs(t);
    if (!(L > 0.0)) {
        way.push_back(fr.zbase);
        return way;
    }
    cplx th = t / L;
    auto along = [&](cplx x) { return ((x - p) / th).real(); };
    auto side = [&](cplx x) { return ((x - p) / th).imag(); };
    double delta = 0.08 * L;
    auto clear_pt = [&](cplx x) {
        double s = along(x), h = side(x);
        if (s < -delta || s > L + delta || std::abs(h) >= delta) return x;
        double dir = h >= 0.0 ? 1.0 : -1.0;
        return x + th * cplx(0.0, dir * (delta - std::abs(h)));
    };
    cplx z2 = clear_pt(z);
    cplx b2 = clear_pt(fr.zbase);
    if (z2 != z) way.push_back(z2);
    // Does the straight leg cross or squeeze past the cut?
    auto cross2 = [](cplx a1, cplx a2, cplx b1, cplx b2c) {
        auto orient = [](cplx o, cplx u, cplx v) {
            double c = (u.real() - o.real()) * (v.imag() - o.imag()) -
                       (u.imag() - o.imag()) * (v.real() - o.real());
            return c > 0.0 ? 1 : (c < 0.0 ? -1 : 0);
        };
        return orient(a1, a2, b1) != orient(a1, a2, b2c) &&
               orient(b1, b2c, a1) != orient(b1, b2c, a2);
    };
    auto seg_dist = [](cplx x, cplx a1, cplx a2) {
        cplx u = a2 - a1;
        double uu = std::norm(u);
        double s =
            uu > 0.0
                ? std::clamp(((x - a1) * std::conj(u)).real() / uu, 0.0, 1.0)
                : 0.0;
        return std::abs(x - (a1 + s * u));
    };
    bool tangled = cross2(z2, b2, p, q);
    if (!tangled) {
        // near-miss of the interior end still deserves the arc detour
        tangled = seg_dist(q, z2, b2) < 0.5 * delta;
    }
    if (tangled) {
        double rq = delta;
        double ang1 = std::arg(z2 - q);
        double ang2 = std::arg(b2 - q);
        double angp = std::arg(p - q);
        // keep the radial entry/exit legs off the cut direction
        auto align = [&](double& ang, cplx from) {
            double off = wrap_pi(ang - angp);
            if (std::abs(off) < 0.35) {
                double ang_new = angp + (off >= 0.0 ? 0.5 : -0.5);
                way.push_back(q + std::abs(from - q) *
                                      std::polar(1.0, ang_new));
                ang = ang_new;
            }
        };
        align(ang1, z2);
        double sweep = ang2 - ang1;
        while (sweep <= -kPi) sweep += kTwoPi;
        while (sweep > kPi) sweep -= kTwoPi;
        // choose the sweep that avoids the cut direction
        double relp = angp - ang1;
        while (relp <= -kPi) relp += kTwoPi;
        while (relp > kPi) relp -= kTwoPi;
        bool blocked = sweep >= 0.0 ? (relp > 0.0 && relp < sweep)
                                    : (relp < 0.0 && relp > sweep);
        if (blocked) sweep += sweep >= 0.0 ? -kTwoPi : kTwoPi;
        int steps = std::max(1, int(std::ceil(std::abs(sweep) / 0.4)));
        for (int i = 0; i <= steps; ++i)
            way.push_back(q + rq * std::polar(1.0, ang1 + sweep * i / steps));
        double ang_exit = ang1 + sweep;
        align(ang_exit, b2);
    }
    if (b2 != fr.zbase) way.push_back(b2);
    way.push_back(fr.zbase);
    return way;
}

// Transport of a full fiber along a polyline: at each step the fiber of
// the moved point is matched to the current one by proximity, refining the
// step until the matching is an unambiguous bijection.  Returns for each
// input fiber point the index of the base fiber point it flows to (or -1
// for the point that flows into the disk).
struct Transport {
    bool ok = false;
    bool ambiguous = false;
    double margin = 1.0;
    std::vector<int> dest;
};

Transport transport_fiber(const SliceConfig& cfg, const DiskParam& dp,
                          const SheetFrame& fr, std::vector<cplx> cur,
                          const std::vector<cplx>& way) {
    Transport tr;
    int nf = int(cur.size());
    auto fiber_at = [&](cplx z, std::vector<cplx>* out) {
        Poly g = cfg.f;
        g.c[0] -= z;
        Roots rr = roots(g);
        if (!rr.converged || rr.total() != cfg.f.degree()) return false;
        out->clear();
        for (size_t i = 0; i < rr.points.size(); ++i)
            for (int k = 0; k < rr.mult[i]; ++k) out->push_back(rr.points[i]);
        return int(out->size()) == nf;
    };
    // match new points to cur; true when an unambiguous bijection
    std::vector<cplx> nxt;
    std::vector<int> pick(nf);
    auto match = [&](const std::vector<cplx>& np, bool force, double* crisp) {
        std::vector<char> used(nf, 0);
        bool bij = true;
        double worst = 1.0;
        for (int i = 0; i < nf; ++i) {
            double d1 = 1e300, d2 = 1e300;
            int j1 = -1;
            for (int j = 0; j < nf; ++j) {
                double d = std::abs(cur[i] - np[j]);
                if (d < d1) {
                    d2 = d1;
                    d1 = d;
                    j1 = j;
                } else if (d < d2) {
                    d2 = d;
                }
            }
            pick[i] = j1;
            if (used[j1]) bij = false;
            used[j1] = 1;
            if (!(d1 <= 0.40 * d2)) bij = false;
            worst = std::min(worst, (d2 - d1) / (d2 + d1 + 1e-300));
        }
        if (!bij && force) {
            // greedy assignment by increasing distance
            std::vector<std::tuple<double, int, int>> pairs;
            for (int i = 0; i < nf; ++i)
                for (int j = 0; j < nf; ++j)
                    pairs.push_back({std::abs(cur[i] - np[j]), i, j});
            std::sort(pairs.begin(), pairs.end());
            std::vector<char> ui(nf, 0), uj(nf, 0);
            for (auto& [d, i, j] : pairs) {
                if (ui[i] || uj[j]) continue;
                ui[i] = uj[j] = 1;
                pick[i] = j;
            }
            worst = 0.0;
            bij = true;
        }
        *crisp = worst;
        return bij;
    };
    int budget = 4000;
    for (size_t leg = 0; leg + 1 < way.size(); ++leg) {
        cplx a1 = way[leg], a2 = way[leg + 1];
        double len = std::abs(a2 - a1);
        if (!(len > 0.0)) continue;
        double t = 0.0, dt = 1.0 / 24.0;
        while (t < 1.0) {
            if (--budget < 0) return tr;
            double t2 = std::min(1.0, t + dt);
            if (!fiber_at(a1 + (a2 - a1) * t2, &nxt)) {
                dt *= 0.5;
                if (dt < 1e-7) return tr;
                continue;
            }
            double crisp = 0.0;
            bool forced = dt < 4e-6;
            if (match(nxt, forced, &crisp)) {
                for (int i = 0; i < nf; ++i) cur[i] = nxt[pick[i]];
                if (forced) {
                    tr.ambiguous = true;
                    tr.margin = 0.0;
                } else {
                    tr.margin = std::min(tr.margin, crisp);
                }
                t = t2;
                dt = std::min(dt * 1.5, 1.0 / 24.0);
            } else {
                dt *= 0.5;
            }
        }
    }
    // land on the stored base fiber: the outer points plus the center
    std::vector<cplx> tgt = fr.base_fib;
    tgt.push_back(dp.a);
    if (int(tgt.size()) != nf) return tr;
    double crisp = 0.0;
    bool bij = match(tgt, false, &crisp);
    if (!bij) {
        match(tgt, true, &crisp);
        tr.ambiguous = true;
    }
    tr.margin = std::min(tr.margin, crisp);
    tr.dest.assign(nf, -1);
    for (int i = 0; i < nf; ++i)
        tr.dest[i] = pick[i] < int(fr.base_fib.size()) ? pick[i] : -1;
    tr.ok = true;
    return tr;
}

struct LetterResult {
    int letter = 1;
    double margin = 0.0;
    bool ambiguous = false;
    int raw = -1;
    // Candidate letters with switch costs, for joint assignment among the
    // preimages of one point (which must occupy distinct sheets).
    std::vector<std::pair<int, double>> alt;
};

int cyc_dist(int a, int b, int n) {
    int d = std::abs(a - b) % n;
    return std::min(d, n - d);
}

// Sheet letter of a disk point, with alternatives.  The path count decides
// wherever it resolves; near an interior cusp preimage the precomputed
// wedge takes over when it does not.  Behind a pin (between the pin and
// the boundary) the walls have ended and the true boundary separating the
// flanking sheets is a deeper-rank curve near, but not exactly on, the
// radial shadow the path count uses, so there the flanking letters are
// offered as cheap alternatives; the joint assignment across the sibling
// preimages of one point settles them.  Immediately at the boundary cusp
// only arg(G) resolves the zones.
LetterResult classify_letter(const SliceConfig& cfg, const DiskParam& dp,
                             const SheetFrame& fr, cplx w) {
    int n = cfg.d + 1;
    LetterResult lr;
    for (const Precusp& p : fr.pins) {
        double ad = std::abs(w - p.w);
        if (ad >= p.loc) continue;
        if (ad < 1e-12 * dp.r || p.wletter.empty()) {
            lr.ambiguous = true;
            for (int l : p.adj) lr.alt.push_back({l, 0.05});
            return lr;
        }
        double th = std::arg(w - p.w);
        int nv = int(p.div.size());
        int idx = nv - 1;  // wedge wrapping past the last divider
        for (int i = 0; i < nv; ++i) {
            double lo = p.div[i];
            double hi = i + 1 < nv ? p.div[i + 1] : p.div[0] + kTwoPi;
            double rel = th - lo;
            while (rel < 0) rel += kTwoPi;
            if (rel < hi - lo) {
                idx = i;
                break;
            }
        }
        lr.letter = p.wletter[idx];
        double marg = kPi;
        for (double dvd : p.div)
            marg = std::min(marg, std::abs(std::sin(th - dvd)));
        lr.margin = marg;
        lr.ambiguous = marg < 0.03 || !fr.calibrated;
        for (int l : p.adj)
            if (l != lr.letter)
                lr.alt.push_back({l, std::max(0.02, marg)});
        return lr;
    }
    double dvb = std::abs(w - cfg.v_b);
    if (dvb < 1e-5 * dp.r) {
        cplx gw = sheet_g(cfg, dp, w);
        lr.ambiguous = true;  // scale-limited this close to the cusp
        if (!(std::abs(gw) > 0.0)) {
            lr.letter = 1;
            lr.alt = {{2, 0.05}, {n, 0.05}};
            return lr;
        }
        double crel = wrap_pi(std::arg(gw) - fr.phiL);
        if (std::abs(crel) >= 1.0)
            lr.letter = 1;  // the wedge between the two cusp walls
        else
            lr.letter = crel > 0.0 ? n : 2;
        lr.margin = std::min(std::abs(crel), kPi - std::abs(crel));
        for (int l : {2, n})
            if (l != lr.letter)
                lr.alt.push_back({l, std::max(0.02, lr.margin)});
        return lr;
    }
    SheetResult sh = sheet_of_raw(cfg, dp, fr, w);
    lr.letter = relabel_raw(fr, sh.sector, n);
    lr.margin = sh.margin;
    lr.ambiguous = sh.ambiguous || !fr.calibrated;
    lr.raw = sh.sector;
    double tc = std::arg(w - dp.a);
    double R = std::abs(w - dp.a);
    bool shadow = false;
    for (const Precusp& p : fr.pins) {
        double dt = std::abs(wrap_pi(tc - std::arg(p.w - dp.a)));
        if (dt < 0.35 && R > 0.9 * p.R) {
            for (int l : p.adj)
                if (l != lr.letter)
                    lr.alt.push_back({l, std::max(0.05, dt)});
            shadow = true;
        }
    }
    if (!shadow) {
        for (int l = 2; l <= n; ++l)
            if (l != lr.letter)
                lr.alt.push_back(
                    {l, lr.margin * cyc_dist(l, lr.letter, n) + 0.2});
    }
    return lr;
}

// The d sigma-preimages of one point occupy d distinct sheets, one in
// each of 2..n.  Individual classification can go wrong exactly where
// deep pullbacks concentrate (behind the pins), so when all d preimages
// are in hand the letters are settled jointly: the assignment of distinct
// letters minimizing the total switch cost.
std::vector<PreimageInfo> preimage_set(const SliceConfig& cfg,
                                       const DiskParam& dp,
                                       const SheetFrame& fr, cplx z) {
    std::vector<PreimageInfo> out;
    Poly g = cfg.f;
    g.c[0] -= z;
    Roots rr = roots(g);
    if (!rr.converged || rr.total() != cfg.f.degree()) return out;
    // Monodromy-correct path: transport the whole fiber to the base along
    // a cut-respecting polyline and read the letters off the base fiber.
    if (fr.cont_ok) {
        std::vector<cplx> fib;
        std::vector<int> outer;  // flat indices of the points outside the disk
        for (size_t i = 0; i < rr.points.size(); ++i)
            for (int k = 0; k < rr.mult[i]; ++k) {
                if (std::abs(rr.points[i] - dp.a) > dp.r * (1.0 + 1e-12))
                    outer.push_back(int(fib.size()));
                fib.push_back(rr.points[i]);
            }
        if (int(outer.size()) == cfg.d) {
            std::vector<cplx> way = transport_path(fr, cfg.y_c, z);
            Transport tr = transport_fiber(cfg, dp, fr, fib, way);
            if (tr.ok) {
                std::vector<char> seen(cfg.d + 2, 0);
                bool bijective = true;
                for (int fi : outer) {
                    int dst = tr.dest[fi];
                    if (dst < 0) {
                        bijective = false;
                        break;
                    }
                    int l = fr.base_letter[dst];
                    if (l < 2 || l > cfg.d + 1 || seen[l]) {
                        bijective = false;
                        break;
                    }
                    seen[l] = 1;
                }
                if (bijective) {
                    for (int fi : outer) {
                        PreimageInfo pi;
                        pi.disk = eta(dp, fib[fi]);
                        pi.point = cfg.f(pi.disk);
                        pi.letter = fr.base_letter[tr.dest[fi]];
                        pi.margin = tr.margin;
                        pi.ambiguous = tr.ambiguous;
                        out.push_back(pi);
                    }
                    std::sort(out.begin(), out.end(),
                              [](const PreimageInfo& a, const PreimageInfo& b) {
                                  return a.letter < b.letter;
                              });
                    return out;
                }
            }
        }
    }
    std::vector<LetterResult> lrs;
    for (cplx x : rr.points) {
        if (std::abs(x - dp.a) <= dp.r * (1.0 + 1e-12)) continue;
        cplx w = eta(dp, x);
        LetterResult lr = classify_letter(cfg, dp, fr, w);
        PreimageInfo pi;
        pi.point = cfg.f(w);
        pi.disk = w;
        pi.letter = lr.letter;
        pi.margin = lr.margin;
        pi.ambiguous = lr.ambiguous;
        out.push_back(pi);
        lrs.push_back(std::move(lr));
    }
    int n = cfg.d + 1;
    if (fr.calibrated && int(out.size()) == cfg.d) {
        auto cost = [&](int i, int letter) {
            if (lrs[i].letter == letter) return 0.0;
            for (const auto& [l, c] : lrs[i].alt)
                if (l == letter) return c;
            return 1e3 + cyc_dist(letter, lrs[i].letter, n);
        };
        std::vector<int> perm(cfg.d);
        for (int i = 0; i < cfg.d; ++i) perm[i] = i + 2;
        std::vector<int> best = perm;
        double best_cost = 1e30;
        std::sort(perm.begin(), perm.end());
        do {
            double c = 0.0;
            for (int i = 0; i < cfg.d && c < best_cost; ++i)
                c += cost(i, perm[i]);
            if (c < best_cost) {
                best_cost = c;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (int i = 0; i < cfg.d; ++i) {
            if (out[i].letter != best[i]) {
                out[i].letter = best[i];
                out[i].ambiguous = true;
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const PreimageInfo& a, const PreimageInfo& b) {
                  return a.letter < b.letter;
              });
    return out;
}

std::optional<PreimageInfo> pick_preimage(const SliceConfig& cfg,
                                          const DiskParam& dp,
                                          const SheetFrame& fr, cplx b,
                                          int sheet, std::string* err) {
    std::vector<PreimageInfo> cand = preimage_set(cfg, dp, fr, b);
    if (cand.empty()) {
        if (err) *err = "root finding failed for preimage";
        return std::nullopt;
    }
    const PreimageInfo* best = nullptr;
    for (const PreimageInfo& pi : cand)
        if (pi.letter == sheet && (!best || pi.margin > best->margin))
            best = &pi;
    if (!best) {
        if (err) {
            *err = "no preimage found in sheet " + std::to_string(sheet) +
                   " (saw";
            for (const PreimageInfo& pi : cand)
                *err += " " + std::to_string(pi.letter);
            *err += ")";
        }
        return std::nullopt;
    }
    return *best;
}

}  // namespace

TileAddress tile_address(const AntiFareyConfig& af, const SliceConfig& cfg,
                         const DiskParam& dp, cplx z, int n_escape) {
    if (af.d != cfg.d)
        throw std::invalid_argument("tile_address: degree mismatch");
    TileAddress res;
    res.margin = kPi;
    if (n_escape <= 0) return res;
    SheetFrame fr = make_frame(cfg, dp);
    if (!fr.calibrated) {
        res.ambiguous = true;
        res.note = "wall calibration failed";
    }
    cplx cur = z;
    for (int k = 0; k < n_escape; ++k) {
        SigmaResult sr = sigma(cfg, dp, cur);
        if (sr.tag != SigmaResult::Tag::Value) {
            res.ambiguous = true;
            res.note = "orbit left the domain at step " + std::to_string(k) +
                       (sr.error.empty() ? "" : ": " + sr.error);
            break;
        }
        // The current point is one of the sigma-preimages of its image;
        // letting the whole sibling set settle the letters is more robust
        // than classifying the point alone.
        bool done = false;
        std::vector<PreimageInfo> sibs = preimage_set(cfg, dp, fr, sr.value);
        for (const PreimageInfo& pi : sibs) {
            if (std::abs(pi.disk - sr.preimage) < 1e-6 * dp.r) {
                res.addr.s.push_back(pi.letter);
                res.margin = std::min(res.margin, pi.margin);
                if (pi.ambiguous) res.ambiguous = true;
                done = true;
                break;
            }
        }
        if (!done) {
            LetterResult lr = classify_letter(cfg, dp, fr, sr.preimage);
            res.addr.s.push_back(lr.letter);
            res.margin = std::min(res.margin, lr.margin);
            if (lr.ambiguous) res.ambiguous = true;
        }
        cur = sr.value;
    }
    return res;
}

std::vector<PreimageInfo> sigma_preimages(const AntiFareyConfig& af,
                                          const SliceConfig& cfg,
                                          const DiskParam& dp, cplx z) {
    if (af.d != cfg.d)
        throw std::invalid_argument("sigma_preimages: degree mismatch");
    SheetFrame fr = make_frame(cfg, dp);
    return preimage_set(cfg, dp, fr, z);
}

RayTrace trace_ray(const AntiFareyConfig& af, const SliceConfig& cfg,
                   const DiskParam& dp, double theta, int depth) {
    if (af.d != cfg.d) throw std::invalid_argument("trace_ray: degree mismatch");
    RayTrace rt;
    rt.theta = frac(theta);
    if (depth < 1) return rt;
    SheetFrame fr = make_frame(cfg, dp);
    if (!fr.calibrated) {
        rt.ok = false;
        rt.fail_depth = 0;
        rt.error = "wall calibration failed";
        return rt;
    }
    SymbolSeq word = sheet_word(af, rt.theta, depth);
    cplx base = cfg.f(dp.a);  // image of the polygon center
    rt.points.push_back(base);
    for (int k = 2; k <= depth; ++k) {
        cplx c = base;
        for (int j = k - 2; j >= 0; --j) {
            std::string err;
            auto pre = pick_preimage(cfg, dp, fr, c, word.s[j], &err);
            if (!pre) {
                rt.ok = false;
                rt.fail_depth = k;
                rt.error =
                    err + " (prefix length " + std::to_string(j + 1) + ")";
                return rt;
            }
            c = pre->point;
        }
        rt.points.push_back(c);
    }
    return rt;
}

}  // namespace dessin
