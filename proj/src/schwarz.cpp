#include "dessin/schwarz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace dessin {
namespace {

constexpr double kTau = 6.283185307179586476925286766559;

double absc(cplx z) { return std::abs(z); }

// ---------------------------------------------------------------------------
// Truncated power series in one real/complex variable, orders 0..7.

struct RSer {
    std::array<double, 8> c{};
};

struct CSer {
    std::array<cplx, 8> c{};
};

RSer rmul(const RSer& a, const RSer& b) {
    RSer r;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; i + j < 8; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

CSer cmul(const CSer& a, const CSer& b) {
    CSer r;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; i + j < 8; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

// a(b(t)) for b with zero constant term.
RSer rcompose(const RSer& a, const RSer& b) {
    RSer r;
    r.c[0] = a.c[7];
    for (int k = 6; k >= 0; --k) {
        r = rmul(r, b);
        r.c[0] += a.c[k];
    }
    return r;
}

// sqrt(1 + u) for u with zero constant term.
RSer rsqrt1p(const RSer& u) {
    static const double bin[8] = {1.0,        0.5,          -0.125,
                                  0.0625,     -0.0390625,   0.02734375,
                                  -0.0205078125, 0.01611328125};
    RSer res;
    res.c[0] = 1.0;
    RSer pw = u;
    for (int k = 1; k < 8; ++k) {
        for (int i = 0; i < 8; ++i) res.c[i] += bin[k] * pw.c[i];
        pw = rmul(pw, u);
    }
    return res;
}

// 1 / (1 + u) for u with zero constant term.
RSer rrecip1p(const RSer& u) {
    RSer res;
    res.c[0] = 1.0;
    RSer pw = u;
    double sg = -1.0;
    for (int k = 1; k < 8; ++k) {
        for (int i = 0; i < 8; ++i) res.c[i] += sg * pw.c[i];
        pw = rmul(pw, u);
        sg = -sg;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Boundary sampling shared by make_disk and in_family.

struct BSamples {
    std::vector<double> ts;  // angular offsets from t_b, sorted in [0, 2pi)
    std::vector<cplx> bnd;
    double max_gap = 0.0;
    double diam = 0.0;
    cplx center{};
    double rmin = 0.0, rmax = 0.0;
};

BSamples sample_boundary(const SliceConfig& cfg, cplx a, double r, double t_b,
                         int n_req) {
    int n = n_req > 0 ? n_req : 512;
    for (;;) {
        BSamples s;
        std::vector<double> ts;
        ts.reserve(static_cast<size_t>(n) + 90);
        for (int j = 0; j < n; ++j) ts.push_back(kTau * j / n);
        int k0 = 1;
        while ((1 << k0) < n && k0 < 30) ++k0;
        for (int k = k0 + 1; k <= 40; ++k) {
            double e = kTau * std::ldexp(1.0, -k);
            ts.push_back(e);
            ts.push_back(kTau - e);
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end(),
                             [](double x, double y) { return y - x < 1e-15; }),
                 ts.end());
        s.ts = std::move(ts);
        size_t m = s.ts.size();
        s.bnd.resize(m);
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (size_t i = 0; i < m; ++i) {
            s.bnd[i] = cfg.f(a + std::polar(r, t_b + s.ts[i]));
            xmin = std::min(xmin, s.bnd[i].real());
            xmax = std::max(xmax, s.bnd[i].real());
            ymin = std::min(ymin, s.bnd[i].imag());
            ymax = std::max(ymax, s.bnd[i].imag());
        }
        s.center = cplx((xmin + xmax) / 2, (ymin + ymax) / 2);
        s.diam = std::max(std::hypot(xmax - xmin, ymax - ymin), 1e-300);
        s.rmin = 1e300;
        s.rmax = 0.0;
        s.max_gap = 0.0;
        for (size_t i = 0; i < m; ++i) {
            double ri = absc(s.bnd[i] - s.center);
            s.rmin = std::min(s.rmin, ri);
            s.rmax = std::max(s.rmax, ri);
            s.max_gap =
                std::max(s.max_gap, absc(s.bnd[(i + 1) % m] - s.bnd[i]));
        }
        if (n_req > 0 || s.max_gap <= s.diam / 256 || n >= 8192) return s;
        n *= 2;
    }
}

double angle_sum(const std::vector<cplx>& p, cplx z) {
    double acc = 0.0;
    size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        cplx u = p[i] - z, v = p[(i + 1) % n] - z;
        if (std::norm(u) < 1e-280 || std::norm(v) < 1e-280) return 0.0;
        acc += std::atan2(u.real() * v.imag() - u.imag() * v.real(),
                          u.real() * v.real() + u.imag() * v.imag());
    }
    return acc;
}

double seg_dist(cplx p, cplx u, cplx v) {
    cplx d = v - u;
    double l2 = std::norm(d);
    if (l2 < 1e-300) return absc(p - u);
    double t = ((p.real() - u.real()) * d.real() +
                (p.imag() - u.imag()) * d.imag()) /
               l2;
    t = std::clamp(t, 0.0, 1.0);
    return absc(p - (u + t * d));
}

// ---------------------------------------------------------------------------
// Inverse-branch Newton.

bool newton_invert(const SliceConfig& cfg, cplx z, cplx seed, double tol_res,
                   cplx& out) {
    cplx w = seed;
    for (int it = 0; it < 60; ++it) {
        cplx fw = cfg.f(w);
        double res = absc(fw - z);
        if (res <= tol_res) {
            // polish to the rounding floor: downstream composition with the
            // reflection can amplify residual-level errors in w enormously
            for (int ex = 0; ex < 6; ++ex) {
                cplx dwp = cfg.df(w);
                if (absc(dwp) < 1e-300) break;
                cplx wp = w - (cfg.f(w) - z) / dwp;
                double rp = absc(cfg.f(wp) - z);
                if (rp >= res) break;
                w = wp;
                res = rp;
            }
            out = w;
            return true;
        }
        cplx dw = cfg.df(w);
        if (absc(dw) < 1e-300) {
            w += cplx(1e-9, 1e-9) * (1.0 + absc(w));
            continue;
        }
        cplx step = (fw - z) / dw;
        double ms = absc(step), cap = 1.0 + absc(w);
        if (ms > cap) step *= cap / ms;
        cplx wn = w - step;
        double rn = absc(cfg.f(wn) - z);
        int bt = 0;
        while (rn > res && bt < 8) {
            step *= 0.5;
            wn = w - step;
            rn = absc(cfg.f(wn) - z);
            ++bt;
        }
        if (rn >= res && bt >= 8) return false;
        w = wn;
    }
    if (absc(cfg.f(w) - z) <= tol_res) {
        out = w;
        return true;
    }
    return false;
}

// Up to four seed indices near z, via the CSR bins of the disk.
int nearest_seeds(const DiskParam& dp, cplx z, int out[4]) {
    int cx = static_cast<int>(std::floor((z.real() - dp.bx0) / dp.bcw));
    int cy = static_cast<int>(std::floor((z.imag() - dp.by0) / dp.bch));
    cx = std::clamp(cx, 0, 63);
    cy = std::clamp(cy, 0, 63);
    int cnt = 0;
    double bestd[4];
    auto offer = [&](int idx) {
        double d = absc(dp.seed_fw[idx] - z);
        if (cnt < 4) {
            out[cnt] = idx;
            bestd[cnt] = d;
            ++cnt;
        } else {
            int worst = 0;
            for (int i = 1; i < 4; ++i)
                if (bestd[i] > bestd[worst]) worst = i;
            if (d < bestd[worst]) {
                out[worst] = idx;
                bestd[worst] = d;
            }
        }
    };
    bool found = false;
    for (int ring = 0; ring < 64; ++ring) {
        for (int dx = -ring; dx <= ring; ++dx) {
            for (int dy = -ring; dy <= ring; ++dy) {
                if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
                int x = cx + dx, y = cy + dy;
                if (x < 0 || x > 63 || y < 0 || y > 63) continue;
                int cell = y * 64 + x;
                for (int k = dp.bin_start[cell]; k < dp.bin_start[cell + 1];
                     ++k)
                    offer(dp.bin_item[k]);
            }
        }
        if (found) break;  // scanned one extra ring after the first hit
        if (cnt > 0) found = true;
    }
    // sort the kept seeds by distance
    for (int i = 0; i < cnt; ++i)
        for (int j = i + 1; j < cnt; ++j)
            if (bestd[j] < bestd[i]) {
                std::swap(bestd[i], bestd[j]);
                std::swap(out[i], out[j]);
            }
    return cnt;
}

// ---------------------------------------------------------------------------
// Cusp jets at y_c as a function of the parameter alone.

CuspType cusp_eval(const SliceConfig& cfg, cplx a, double tol) {
    CuspType ct;
    cplx alpha = cfg.v_b - a;
    CSer u;  // alpha * (e^{it} - 1)
    {
        cplx ik(1.0, 0.0);
        double fact = 1.0;
        for (int k = 1; k < 8; ++k) {
            ik *= cplx(0.0, 1.0);
            fact *= k;
            u.c[k] = alpha * ik / fact;
        }
    }
    cplx D = -cfg.jets[2] * alpha * alpha;
    if (std::norm(D) < 1e-280) {
        ct.nu = 7;
        ct.note = "degenerate jet normalization";
        return ct;
    }
    cplx invD = 1.0 / D;
    CSer kap;
    CSer up = cmul(u, u);
    for (int m = 2; m < 8; ++m) {
        cplx am = cfg.jets[m] * invD;
        for (int i = 0; i < 8; ++i) kap.c[i] += am * up.c[i];
        if (m < 7) up = cmul(up, u);
    }
    RSer x, y;
    for (int i = 0; i < 8; ++i) {
        x.c[i] = kap.c[i].real();
        y.c[i] = kap.c[i].imag();
    }
    if (std::abs(x.c[2] - 1.0) > 1e-6 || std::abs(y.c[2]) > 1e-6)
        ct.note = "jet conditioning warning";
    x.c[0] = x.c[1] = 0.0;
    y.c[0] = y.c[1] = y.c[2] = 0.0;
    // reparametrize so the tangential series is exactly tau^2
    RSer v;
    for (int k = 1; k <= 5; ++k) v.c[k] = x.c[k + 2];
    RSer s = rsqrt1p(v);  // tau(t) = t * s(t)
    RSer s0 = s;
    s0.c[0] = 0.0;
    RSer rinv = rrecip1p(s0);  // 1 / s(t)
    RSer t_of_tau;
    t_of_tau.c[1] = 1.0;
    for (int it = 0; it < 8; ++it) {
        RSer rt = rcompose(rinv, t_of_tau);
        RSer nt;
        for (int k = 0; k < 7; ++k) nt.c[k + 1] = rt.c[k];
        t_of_tau = nt;
    }
    RSer yt = rcompose(y, t_of_tau);
    ct.b3 = yt.c[3];
    ct.b5 = yt.c[5];
    ct.b7 = yt.c[7];
    double sb = std::abs(yt.c[3]) + std::abs(yt.c[4]) + std::abs(yt.c[5]) +
                std::abs(yt.c[6]) + std::abs(yt.c[7]);
    if (sb < 1e-280) {
        ct.nu = 7;
        ct.margin = 0.0;
        ct.note = ">=7 unresolved";
        return ct;
    }
    double m3 = std::abs(ct.b3) / sb, m5 = std::abs(ct.b5) / sb,
           m7 = std::abs(ct.b7) / sb;
    if (m3 > tol) {
        ct.nu = 3;
        ct.margin = m3;
    } else if (m5 > tol) {
        ct.nu = 5;
        ct.margin = m5;
    } else {
        ct.nu = 7;
        ct.margin = m7;
        if (m7 <= tol) ct.note = ">=7 unresolved";
    }
    return ct;
}

// ---------------------------------------------------------------------------
// Double-point detection on a sampled boundary.

double circ_dist(double s1, double s2) {
    double d = std::abs(s1 - s2);
    return std::min(d, kTau - d);
}

std::vector<DoublePoint> detect_double_points(const SliceConfig& cfg, cplx a,
                                              double r, double t_b,
                                              const BSamples& bs, double tol) {
    std::vector<DoublePoint> out;
    size_t n = bs.ts.size();
    if (n < 8) return out;
    const double sepmin = 0.1257;  // 2% of the circle
    // local sampling resolution at each boundary point
    std::vector<double> lgap(n);
    for (size_t i = 0; i < n; ++i)
        lgap[i] = std::max(absc(bs.bnd[i] - bs.bnd[(i + n - 1) % n]),
                           absc(bs.bnd[(i + 1) % n] - bs.bnd[i]));
    double cell = std::max(4.0 * bs.max_gap, 1e-9 * bs.diam);
    std::map<std::pair<long, long>, std::vector<int>> bins;
    auto key = [&](cplx p) {
        return std::make_pair(
            static_cast<long>(std::floor((p.real() - bs.center.real()) / cell)),
            static_cast<long>(
                std::floor((p.imag() - bs.center.imag()) / cell)));
    };
    for (size_t i = 0; i < n; ++i) bins[key(bs.bnd[i])].push_back((int)i);
    // The two branches of the boundary cusp approach each other near offset
    // 0; pairs that are both cusp-local are handled by the jet criterion in
    // in_family, not by pairwise search.
    const double cusp_zone = 0.35;
    auto near_cusp = [&](double s) { return std::min(s, kTau - s) < cusp_zone; };
    std::vector<std::pair<int, int>> cand;
    for (size_t i = 0; i < n; ++i) {
        auto k = key(bs.bnd[i]);
        for (long dx = -1; dx <= 1; ++dx) {
            for (long dy = -1; dy <= 1; ++dy) {
                auto it = bins.find({k.first + dx, k.second + dy});
                if (it == bins.end()) continue;
                for (int j : it->second) {
                    if (j <= (int)i) continue;
                    if (circ_dist(bs.ts[i], bs.ts[j]) <= sepmin) continue;
                    if (near_cusp(bs.ts[i]) && near_cusp(bs.ts[j])) continue;
                    if (absc(bs.bnd[i] - bs.bnd[j]) >=
                        2.0 * (lgap[i] + lgap[j]) + 1e-12 * bs.diam)
                        continue;
                    cand.push_back({(int)i, j});
                }
            }
        }
    }
    double rtol = std::max(tol, 1e-13) * std::max(1.0, bs.diam);
    auto curve = [&](double th) { return a + std::polar(r, th); };
    for (auto [i, j] : cand) {
        double th1 = t_b + bs.ts[i], th2 = t_b + bs.ts[j];
        bool ok = false;
        double best = 1e300, bth1 = th1, bth2 = th2;
        for (int it = 0; it < 50; ++it) {
            cplx c1 = curve(th1), c2 = curve(th2);
            cplx F = cfg.f(c1) - cfg.f(c2);
            double res = absc(F);
            if (res < best) {
                best = res;
                bth1 = th1;
                bth2 = th2;
            }
            if (res <= rtol) {
                ok = true;
                break;
            }
            cplx g1 = cfg.df(c1) * cplx(0, 1) * std::polar(r, th1);
            cplx g2 = cfg.df(c2) * cplx(0, 1) * std::polar(r, th2);
            double det = -g1.real() * g2.imag() + g1.imag() * g2.real();
            if (std::abs(det) < 1e-300) break;
            // solve [g1 | -g2] (d1, d2)^T = -F
            double d1 = (-F.real() * -g2.imag() - -g2.real() * -F.imag()) / det;
            double d2 = (g1.real() * -F.imag() - -F.real() * g1.imag()) / det;
            double t1n = th1 + d1, t2n = th2 + d2;
            int bt = 0;
            while (bt < 8) {
                double rn = absc(cfg.f(curve(t1n)) - cfg.f(curve(t2n)));
                if (rn < res) break;
                d1 *= 0.5;
                d2 *= 0.5;
                t1n = th1 + d1;
                t2n = th2 + d2;
                ++bt;
            }
            if (bt >= 8) break;
            th1 = t1n;
            th2 = t2n;
        }
        DoublePoint hit;
        if (ok) {
            double s1 = std::fmod(std::fmod(th1, kTau) + kTau, kTau);
            double s2 = std::fmod(std::fmod(th2, kTau) + kTau, kTau);
            if (s1 > s2) std::swap(s1, s2);
            if (circ_dist(s1, s2) < sepmin) continue;
            hit.t1 = s1;
            hit.t2 = s2;
            hit.refined = true;
            hit.point = cfg.f(curve(s1));
        } else {
            // keep only candidates Newton brought essentially to a solution
            // (tangential contacts stall with a singular Jacobian)
            if (best > 1e-6 * bs.diam) continue;
            double s1 = std::fmod(std::fmod(bth1, kTau) + kTau, kTau);
            double s2 = std::fmod(std::fmod(bth2, kTau) + kTau, kTau);
            if (s1 > s2) std::swap(s1, s2);
            // a pair collapsing onto one parameter is the trivial solution
            if (circ_dist(s1, s2) < sepmin) continue;
            hit.t1 = s1;
            hit.t2 = s2;
            hit.refined = false;
            hit.point = cfg.f(curve(s1));
        }
        cplx u1 = cfg.df(curve(hit.t1)) * cplx(0, 1) * std::polar(1.0, hit.t1);
        cplx u2 = cfg.df(curve(hit.t2)) * cplx(0, 1) * std::polar(1.0, hit.t2);
        double n1 = absc(u1), n2 = absc(u2);
        if (n1 > 1e-300 && n2 > 1e-300) {
            double cr = std::abs((std::conj(u1) * u2).imag()) / (n1 * n2);
            hit.contact = cr > 1e-4 ? 1 : 3;
        }
        out.push_back(hit);
    }
    // dedupe
    std::sort(out.begin(), out.end(), [](const DoublePoint& p,
                                         const DoublePoint& q) {
        if (p.t1 != q.t1) return p.t1 < q.t1;
        return p.t2 < q.t2;
    });
    std::vector<DoublePoint> ded;
    for (const auto& h : out) {
        bool dup = false;
        for (auto& g : ded) {
            if (circ_dist(g.t1, h.t1) < 1e-3 && circ_dist(g.t2, h.t2) < 1e-3) {
                dup = true;
                if (h.refined && !g.refined) g = h;
                break;
            }
        }
        if (!dup) ded.push_back(h);
    }
    return ded;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* family_name(Family f) {
    switch (f) {
        case Family::Interior: return "interior";
        case Family::OnPerp: return "perp";
        case Family::NonUnivalent: return "nonunivalent";
        case Family::CuspDegenerate: return "cuspdegenerate";
        case Family::NonMember: return "nonmember";
    }
    return "?";
}

SliceConfig make_slice(const Poly& f_in, cplx v_b, cplx v_w, cplx v_wp) {
    SliceConfig cfg;
    cfg.f = f_in;
    cfg.f.trim();
    int n = cfg.f.degree();
    if (n < 3)
        throw std::invalid_argument("slice: polynomial degree must be >= 3");
    cfg.d = n - 1;
    cfg.v_b = v_b;
    cfg.v_w = v_w;
    cfg.v_wp = v_wp;
    cfg.df = cfg.f.derivative();
    cfg.y_c = cfg.f(v_b);
    cfg.y_f = cfg.f(v_w);
    double rad = std::max(
        1.0, std::max(absc(v_b), std::max(absc(v_w), absc(v_wp))));
    double l1 = 1.0;
    for (size_t k = 0; k < cfg.df.c.size(); ++k)
        l1 += absc(cfg.df.c[k]) * std::pow(rad, static_cast<double>(k));
    if (absc(cfg.df(v_b)) > 1e-7 * l1)
        throw std::invalid_argument("slice: v_b is not a critical point of f");
    Poly d2 = cfg.df.derivative();
    double l2 = 1.0;
    for (size_t k = 0; k < d2.c.size(); ++k)
        l2 += absc(d2.c[k]) * std::pow(rad, static_cast<double>(k));
    if (absc(d2(v_b)) <= 1e-9 * l2)
        throw std::invalid_argument("slice: critical point at v_b not simple");
    if (absc(cfg.df(v_w)) <= 1e-9 * l1)
        throw std::invalid_argument("slice: v_w must be a regular point of f");
    double ys = 1.0 + absc(cfg.y_c) + absc(cfg.y_f);
    if (absc(cfg.f(v_wp) - cfg.y_f) > 1e-6 * ys)
        throw std::invalid_argument("slice: f(v_wp) must equal f(v_w)");
    Poly der = cfg.f;
    double fact = 1.0;
    for (int k = 0; k < 8; ++k) {
        if (k > 0) fact *= k;
        cfg.jets.push_back(der(v_b) / fact);
        der = der.derivative();
    }
    cfg.A32 = cfg.jets[3] / cfg.jets[2];
    auto cr = roots(cfg.df);
    if (!cr.converged)
        throw std::runtime_error("slice: critical points did not converge");
    for (size_t i = 0; i < cr.points.size(); ++i)
        cfg.crit.push_back({cr.points[i], cr.mult[i]});
    std::sort(cfg.crit.begin(), cfg.crit.end(),
              [](const auto& p, const auto& q) {
                  if (p.first.real() != q.first.real())
                      return p.first.real() < q.first.real();
                  return p.first.imag() < q.first.imag();
              });
    cfg.scale = rad;
    for (const auto& [p, m] : cfg.crit) cfg.scale = std::max(cfg.scale, absc(p));
    return cfg;
}

DiskParam make_disk(const SliceConfig& cfg, cplx a, int n_boundary) {
    DiskParam dp;
    dp.a = a;
    dp.r = absc(cfg.v_b - a);
    if (dp.r <= 1e-12 * cfg.scale)
        throw std::invalid_argument("disk: parameter coincides with v_b");
    dp.t_b = std::atan2((cfg.v_b - a).imag(), (cfg.v_b - a).real());
    BSamples bs = sample_boundary(cfg, a, dp.r, dp.t_b, n_boundary);
    dp.ts = std::move(bs.ts);
    dp.bnd = std::move(bs.bnd);
    dp.max_gap = bs.max_gap;
    dp.diam = bs.diam;
    dp.center = bs.center;
    dp.rmin = bs.rmin;
    dp.rmax = bs.rmax;
    dp.wind_center =
        static_cast<int>(std::llround(angle_sum(dp.bnd, dp.center) / kTau));
    dp.eps_cusp = 1e-6 * dp.diam;
    dp.eps_bnd = 1e-9 * dp.diam;
    dp.seed_w.reserve(4096);
    dp.seed_fw.reserve(4096);
    for (int j = 0; j < 64; ++j) {
        double rho = (j + 0.5) / 64.0;
        for (int k = 0; k < 64; ++k) {
            double th = dp.t_b + kTau * (k + 0.5) / 64.0;
            cplx w = a + std::polar(dp.r * rho, th);
            dp.seed_w.push_back(w);
            dp.seed_fw.push_back(cfg.f(w));
        }
    }
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (cplx p : dp.seed_fw) {
        xmin = std::min(xmin, p.real());
        xmax = std::max(xmax, p.real());
        ymin = std::min(ymin, p.imag());
        ymax = std::max(ymax, p.imag());
    }
    dp.bx0 = xmin;
    dp.by0 = ymin;
    dp.bcw = std::max((xmax - xmin) / 64.0, 1e-300);
    dp.bch = std::max((ymax - ymin) / 64.0, 1e-300);
    std::vector<int> cnt(64 * 64 + 1, 0);
    auto cell_of = [&](cplx p) {
        int cx = std::clamp(
            static_cast<int>(std::floor((p.real() - dp.bx0) / dp.bcw)), 0, 63);
        int cy = std::clamp(
            static_cast<int>(std::floor((p.imag() - dp.by0) / dp.bch)), 0, 63);
        return cy * 64 + cx;
    };
    for (cplx p : dp.seed_fw) ++cnt[cell_of(p) + 1];
    for (int i = 1; i <= 64 * 64; ++i) cnt[i] += cnt[i - 1];
    dp.bin_start = cnt;
    dp.bin_item.resize(dp.seed_fw.size());
    std::vector<int> cur = dp.bin_start;
    for (size_t i = 0; i < dp.seed_fw.size(); ++i)
        dp.bin_item[cur[cell_of(dp.seed_fw[i])]++] = static_cast<int>(i);
    return dp;
}

int winding_number(const DiskParam& dp, cplx z) {
    double dz = absc(z - dp.center);
    if (dz > dp.rmax * (1.0 + 1e-12) + 1e-300) return 0;
    if (dp.wind_center == 1 && dz < dp.rmin * (1.0 - 1e-12)) return 1;
    return static_cast<int>(std::llround(angle_sum(dp.bnd, z) / kTau));
}

double boundary_distance(const SliceConfig& cfg, const DiskParam& dp, cplx z) {
    size_t n = dp.bnd.size();
    double best = 1e300;
    size_t bi = 0;
    for (size_t i = 0; i < n; ++i) {
        double d = seg_dist(z, dp.bnd[i], dp.bnd[(i + 1) % n]);
        if (d < best) {
            best = d;
            bi = i;
        }
    }
    if (best > 2.0 * dp.max_gap) return best;
    // refine over the parameter window spanning the neighboring segments
    double s1 = dp.ts[(bi + n - 1) % n];
    double s2 = dp.ts[(bi + 2) % n];
    double smid = dp.ts[bi];
    if (s1 > smid) s1 -= kTau;
    while (s2 < smid) s2 += kTau;
    auto g = [&](double s) {
        return absc(cfg.f(dp.a + std::polar(dp.r, dp.t_b + s)) - z);
    };
    const double phi = 0.6180339887498949;
    double lo = s1, hi = s2;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double g1 = g(x1), g2 = g(x2);
    for (int it = 0; it < 80; ++it) {
        if (g1 < g2) {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - phi * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + phi * (hi - lo);
            g2 = g(x2);
        }
    }
    return std::min(best, std::min(g1, g2));
}

SigmaResult sigma(const SliceConfig& cfg, const DiskParam& dp, cplx z) {
    SigmaResult res;
    double S = std::max({1.0, dp.diam, absc(dp.center) + dp.rmax});
    double tol_res = 1e-11 * S;
    int idx[4];
    int cnt = nearest_seeds(dp, z, idx);
    cplx w{};
    bool got = false;
    for (int t = 0; t < cnt && !got; ++t) {
        cplx out;
        if (!newton_invert(cfg, z, dp.seed_w[idx[t]], tol_res, out)) continue;
        if (absc(out - dp.a) <= dp.r * (1.0 + 1e-7)) {
            w = out;
            got = true;
            break;
        }
        // converged onto an out-of-disk branch; reflect it in and retry
        cplx out2;
        if (newton_invert(cfg, z, eta(dp, out), tol_res, out2) &&
            absc(out2 - dp.a) <= dp.r * (1.0 + 1e-7)) {
            w = out2;
            got = true;
        }
    }
    if (!got) {
        int wn = winding_number(dp, z);
        if (wn == 0) {
            res.tag = SigmaResult::Tag::NotInDomain;
            return res;
        }
        Poly g = cfg.f;
        g.c[0] -= z;
        auto rr = roots(g);
        double bd = 1e300;
        cplx bw{};
        bool found = false;
        if (rr.converged) {
            for (cplx p : rr.points) {
                double d = absc(p - dp.a);
                if (d <= dp.r * (1.0 + 1e-6) && d < bd) {
                    bd = d;
                    bw = p;
                    found = true;
                }
            }
        }
        if (!found) {
            res.tag = SigmaResult::Tag::NumericFailure;
            res.error = "winding positive but no inverse branch in the disk";
            return res;
        }
        w = bw;
        got = true;
    }
    if (absc(w - dp.a) < 1e-10 * dp.r) {
        res.tag = SigmaResult::Tag::AtInfinity;
        return res;
    }
    res.tag = SigmaResult::Tag::Value;
    res.preimage = w;
    res.value = cfg.f(eta(dp, w));
    return res;
}

OrbitClass classify_orbit(const SliceConfig& cfg, const DiskParam& dp, cplx z0,
                          int n_max) {
    OrbitClass oc;
    cplx z = z0;
    for (int k = 0;; ++k) {
        if (std::isfinite(z.real()) && std::isfinite(z.imag()) &&
            absc(z - cfg.y_c) <= dp.eps_cusp) {
            oc.tag = OrbitClass::Tag::HitCusp;
            oc.step = k;
            oc.point = z;
            return oc;
        }
        if (k >= n_max) {
            oc.tag = OrbitClass::Tag::Bounded;
            oc.step = n_max;
            oc.point = z;
            return oc;
        }
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            oc.tag = OrbitClass::Tag::Escaped;
            oc.step = k;
            oc.point = z;
            oc.pre_domain = (k == 0);
            return oc;
        }
        SigmaResult s = sigma(cfg, dp, z);
        switch (s.tag) {
            case SigmaResult::Tag::Value: {
                double slack = dp.r - absc(s.preimage - dp.a);
                double speed = absc(cfg.df(s.preimage));
                if (slack * speed <= 8.0 * dp.eps_bnd ||
                    slack <= 1e-13 * dp.r) {
                    double db = boundary_distance(cfg, dp, z);
                    if (db <= dp.eps_bnd && absc(z - cfg.y_c) > dp.eps_cusp) {
                        oc.tag = OrbitClass::Tag::OnBoundary;
                        oc.step = k;
                        oc.point = z;
                        return oc;
                    }
                }
                z = s.value;
                break;
            }
            case SigmaResult::Tag::AtInfinity: {
                oc.tag = OrbitClass::Tag::Escaped;
                oc.step = k + 1;
                oc.point = cplx(std::numeric_limits<double>::infinity(), 0.0);
                return oc;
            }
            case SigmaResult::Tag::NotInDomain: {
                double db = boundary_distance(cfg, dp, z);
                if (db <= dp.eps_bnd) {
                    oc.tag = OrbitClass::Tag::OnBoundary;
                    oc.step = k;
                    oc.point = z;
                    return oc;
                }
                oc.tag = OrbitClass::Tag::Escaped;
                oc.step = k;
                oc.point = z;
                oc.pre_domain = (k == 0);
                return oc;
            }
            case SigmaResult::Tag::NumericFailure: {
                oc.tag = OrbitClass::Tag::OnBoundary;
                oc.step = k;
                oc.point = z;
                oc.note = s.error;
                return oc;
            }
        }
    }
}

std::vector<SigmaCritical> critical_points_sigma(const SliceConfig& cfg,
                                                 const DiskParam& dp) {
    std::vector<SigmaCritical> out;
    for (const auto& [zeta, m] : cfg.crit) {
        if (absc(zeta - cfg.v_b) <= 1e-7 * cfg.scale) continue;
        SigmaCritical sc;
        sc.point = cfg.f(eta(dp, zeta));
        sc.local_degree = m + 1;
        sc.at_pole = false;
        out.push_back(sc);
    }
    std::sort(out.begin(), out.end(),
              [](const SigmaCritical& p, const SigmaCritical& q) {
                  if (p.point.real() != q.point.real())
                      return p.point.real() < q.point.real();
                  return p.point.imag() < q.point.imag();
              });
    SigmaCritical pole;
    pole.point = cfg.f(dp.a);
    pole.local_degree = cfg.d + 1;
    pole.at_pole = true;
    out.push_back(pole);
    return out;
}

CuspType cusp_type(const SliceConfig& cfg, const DiskParam& dp, double tol) {
    return cusp_eval(cfg, dp.a, tol);
}

double cusp_b3(const SliceConfig& cfg, cplx a) {
    return 1.0 + (cfg.A32 * (cfg.v_b - a)).real();
}

std::vector<DoublePoint> double_points(const SliceConfig& cfg,
                                       const DiskParam& dp, double tol) {
    BSamples bs;
    bs.ts = dp.ts;
    bs.bnd = dp.bnd;
    bs.max_gap = dp.max_gap;
    bs.diam = dp.diam;
    bs.center = dp.center;
    bs.rmin = dp.rmin;
    bs.rmax = dp.rmax;
    return detect_double_points(cfg, dp.a, dp.r, dp.t_b, bs, tol);
}

Family in_family(const SliceConfig& cfg, cplx a, int n_samples, double tol) {
    double r = absc(cfg.v_b - a);
    if (r <= 1e-12 * cfg.scale) return Family::NonMember;
    double tolc = std::max(tol, 1e-12) * std::max(1.0, r);
    for (const auto& [zeta, m] : cfg.crit) {
        if (absc(zeta - cfg.v_b) <= 1e-7 * cfg.scale) continue;
        if (absc(zeta - a) < r + tolc) return Family::NonUnivalent;
    }
    double t_b = std::atan2((cfg.v_b - a).imag(), (cfg.v_b - a).real());
    BSamples bs =
        sample_boundary(cfg, a, r, t_b, n_samples > 0 ? n_samples : 1024);
    auto hits = detect_double_points(cfg, a, r, t_b, bs, 1e-9);
    if (!hits.empty()) return Family::NonUnivalent;
    CuspType ct = cusp_eval(cfg, a, 1e-7);
    // A cusp-local self-intersection loop: in the normal form
    // (tau^2, b3 tau^3 + b5 tau^5 + ...) the branches cross at
    // tau = +-sqrt(-b3/b5) when that is real and within the jet radius.
    if (ct.nu == 3 && ct.b3 * ct.b5 < 0.0) {
        double tau = std::sqrt(-ct.b3 / ct.b5);
        if (tau < 0.45) return Family::NonUnivalent;
    }
    double dw = absc(cfg.v_w - a);
    if (std::abs(dw - r) <= tolc) return Family::OnPerp;
    if (dw > r) return Family::NonMember;
    return ct.nu == 3 ? Family::Interior : Family::CuspDegenerate;
}

}  // namespace dessin
