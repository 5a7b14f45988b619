#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

#include "dessin/poly.hpp"

namespace dessin {

namespace {

struct VertexSite {
    cplx pos;
    Color color;
    int mult;
};

// Newton corrector for f(w) = target with step damping.
std::optional<cplx> correct(const Poly& f, const Poly& fp, cplx target, cplx start,
                            double goal) {
    cplx w = start;
    double err = std::abs(f(w) - target);
    for (int i = 0; i < 40 && err > goal; ++i) {
        cplx dv = fp(w);
        if (std::abs(dv) < 1e-300) return std::nullopt;
        cplx delta = (f(w) - target) / dv;
        cplx next = w - delta;
        double nerr = std::abs(f(next) - target);
        double lambda = 1.0;
        while (nerr > err && lambda > 1.0 / 64) {
            lambda *= 0.5;
            next = w - lambda * delta;
            nerr = std::abs(f(next) - target);
        }
        if (nerr >= err) return std::nullopt;
        w = next;
        err = nerr;
    }
    return err <= goal ? std::optional<cplx>(w) : std::nullopt;
}

// Continue the lift of the path gamma from parameter t0 to t1 (monotone).
std::optional<cplx> continue_lift(const Poly& f, const Poly& fp,
                                  const std::function<cplx(double)>& gamma, cplx w0,
                                  double t0, double t1, double goal) {
    cplx w = w0;
    double t = t0;
    double dir = t1 > t0 ? 1.0 : -1.0;
    double dt = 0.125 * std::abs(t1 - t0);
    int guard = 0;
    while (dir * (t1 - t) > 1e-16 && guard++ < 100000) {
        double step = std::min(dt, std::abs(t1 - t));
        double tn = t + dir * step;
        cplx target = gamma(tn);
        // Tangent predictor keeps the corrector in the basin near vertices.
        cplx w_pred = w;
        cplx dv = fp(w);
        if (std::abs(dv) > 1e-300) w_pred = w + (target - gamma(t)) / dv;
        auto wn = correct(f, fp, target, w_pred, goal);
        bool ok = wn.has_value();
        if (ok && std::abs(*wn - w) > 0.35 * (1.0 + std::abs(w)) && step > 1e-9)
            ok = false;  // suspicious jump: likely hopped to another sheet
        if (ok) {
            w = *wn;
            t = tn;
            dt = std::min(2.0 * dt, 0.25);
        } else {
            dt *= 0.5;
            if (dt < 1e-12) return std::nullopt;
        }
    }
    return w;
}

// Local fiber radius |w - v| of the lift of a point at distance s from the
// critical value of a vertex with local degree m and m-th Taylor coefficient
// magnitude amag.
double local_radius(double s, int m, double amag) {
    return std::pow(s / std::max(amag, 1e-300), 1.0 / m);
}

double taylor_mag(const Poly& f, cplx v, int m) {
    Poly d = f;
    double fact = 1.0;
    for (int i = 0; i < m; ++i) {
        d = d.derivative();
        fact *= (i + 1);
    }
    return std::abs(d(v)) / fact;
}

}  // namespace

PlaneTree extract_dessin(const ShabatData& sd) {
    const Poly& f = sd.f;
    if (f.degree() < 1) throw std::runtime_error("extract_dessin: degree < 1");
    Poly fp = f.derivative();

    std::vector<VertexSite> sites;
    for (const auto& [z, m] : sd.blacks) sites.push_back({z, Color::black, m});
    for (const auto& [z, m] : sd.whites) sites.push_back({z, Color::white, m});

    cplx yb = sd.y_black, yw = sd.y_white;
    cplx delta = yw - yb;
    double dlen = std::abs(delta);
    if (dlen < 1e-300) throw std::runtime_error("extract_dessin: coincident critical values");

    // The straight arc, with semicircular detours around any stray critical
    // value in its interior (cannot happen for exact Shabat data, but guards
    // near-degenerate candidates).
    struct Detour {
        double t, h;
    };
    std::vector<Detour> detours;
    for (const auto& [v, m] : critical_values(f)) {
        cplx rel = (v - yb) / delta;
        double t = rel.real(), off = std::abs(rel.imag());
        if (t > 1e-3 && t < 1.0 - 1e-3 && off < 1e-6)
            detours.push_back({t, std::max(4.0 * off, 1e-3)});
    }
    std::sort(detours.begin(), detours.end(), [](auto a, auto b) { return a.t < b.t; });
    auto gamma = [&](double t) -> cplx {
        for (const auto& d : detours)
            if (t > d.t - d.h && t < d.t + d.h) {
                double s = (t - (d.t - d.h)) / (2.0 * d.h);
                cplx u = delta;  // direction scaled by |delta| cancels in h*u
                return yb + d.t * delta + d.h * u * cplx(-std::cos(M_PI * s), std::sin(M_PI * s));
            }
        return yb + t * delta;
    };

    // Midpoint fiber, away from detours.
    double tmid = 0.5;
    for (const auto& d : detours)
        if (tmid > d.t - d.h && tmid < d.t + d.h) tmid = d.t + d.h + 1e-3;
    Poly shifted = f;
    if (shifted.c.empty()) shifted.c.push_back(cplx(0.0));
    shifted.c[0] -= gamma(tmid);
    Roots fiber = roots(shifted, 1e-9);
    if (!fiber.converged) throw std::runtime_error("extract_dessin: fiber roots failed");
    std::vector<cplx> lifts;
    for (size_t i = 0; i < fiber.points.size(); ++i)
        for (int j = 0; j < fiber.mult[i]; ++j) lifts.push_back(fiber.points[i]);
    if (static_cast<int>(lifts.size()) != f.degree())
        throw std::runtime_error("extract_dessin: fiber size mismatch");

    const double t_eval = 1e-6;
    const double goal = 1e-12 * (1.0 + std::abs(yb) + std::abs(yw));

    struct EdgeLift {
        int black_site = -1, white_site = -1;
        cplx near_black, near_white;
    };
    std::vector<EdgeLift> edges(lifts.size());

    auto assign = [&](cplx w_end, Color color, double t_dist) -> int {
        int best = -1;
        double d1 = 1e300, d2 = 1e300;
        for (size_t i = 0; i < sites.size(); ++i) {
            if (sites[i].color != color) continue;
            double d = std::abs(w_end - sites[i].pos);
            if (d < d1) {
                d2 = d1;
                d1 = d;
                best = static_cast<int>(i);
            } else if (d < d2) {
                d2 = d;
            }
        }
        if (best < 0) return -1;
        double rpred = local_radius(t_dist * dlen, sites[best].mult,
                                    taylor_mag(f, sites[best].pos, sites[best].mult));
        if (d1 > 0.6 * d2) return -1;
        if (d1 > 8.0 * rpred + 1e-9 || d1 < rpred / 8.0 - 1e-9) return -1;
        return best;
    };

    for (size_t s = 0; s < lifts.size(); ++s) {
        auto toward = [&](double t_target) -> std::optional<cplx> {
            return continue_lift(f, fp, gamma, lifts[s], tmid, t_target, goal);
        };
        auto wb = toward(t_eval);
        auto ww = toward(1.0 - t_eval);
        if (!wb || !ww) throw std::runtime_error("extract_dessin: lift continuation failed");
        int bi = assign(*wb, Color::black, t_eval);
        int wi = assign(*ww, Color::white, t_eval);
        if (bi < 0 || wi < 0) {
            // Deepen the endgame once before giving up.
            auto wb2 = continue_lift(f, fp, gamma, *wb, t_eval, 1e-8, goal);
            auto ww2 = continue_lift(f, fp, gamma, *ww, 1.0 - t_eval, 1.0 - 1e-8, goal);
            if (wb2 && bi < 0) bi = assign(*wb2, Color::black, 1e-8);
            if (ww2 && wi < 0) wi = assign(*ww2, Color::white, 1e-8);
            if (bi < 0 || wi < 0) throw std::runtime_error("extract_dessin: lift collision");
        }
        edges[s] = {bi, wi, *wb, *ww};
    }

    // Valences must match the prescribed local degrees.
    std::vector<int> count(sites.size(), 0);
    for (const auto& e : edges) {
        count[e.black_site]++;
        count[e.white_site]++;
    }
    for (size_t i = 0; i < sites.size(); ++i)
        if (count[i] != sites[i].mult)
            throw std::runtime_error("extract_dessin: valence mismatch at a vertex");

    // Deterministic ids: sort sites by position.
    std::vector<int> order(sites.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (sites[a].pos.real() != sites[b].pos.real())
            return sites[a].pos.real() < sites[b].pos.real();
        return sites[a].pos.imag() < sites[b].pos.imag();
    });
    std::vector<int> id_of(sites.size());
    for (size_t i = 0; i < order.size(); ++i) id_of[order[i]] = static_cast<int>(i);

    PlaneTree t;
    for (size_t i = 0; i < order.size(); ++i) t.add_vertex(static_cast<int>(i), sites[order[i]].color);

    // Counterclockwise orders from approach angles of the lifted edges.
    for (size_t i = 0; i < sites.size(); ++i) {
        struct Inc {
            double angle;
            int other;
        };
        std::vector<Inc> inc;
        for (const auto& e : edges) {
            if (e.black_site == static_cast<int>(i))
                inc.push_back({std::arg(e.near_black - sites[i].pos), id_of[e.white_site]});
            if (e.white_site == static_cast<int>(i))
                inc.push_back({std::arg(e.near_white - sites[i].pos), id_of[e.black_site]});
        }
        std::sort(inc.begin(), inc.end(), [](const Inc& a, const Inc& b) { return a.angle < b.angle; });
        auto& nbr = t.at(id_of[i]).nbr;
        for (const auto& x : inc) nbr.push_back(x.other);
    }

    auto bad = validate(t);
    if (!bad.empty()) throw std::runtime_error("extract_dessin: " + bad.front());
    return t;
}

namespace {

// Radial layout of the tree used to seed the Newton solver.
std::map<int, cplx> embed_tree(const PlaneTree& t, int root) {
    std::map<int, cplx> pos;
    pos[root] = cplx(0.0);
    // (vertex, parent, angle interval)
    struct Item {
        int v, parent;
        double lo, hi;
    };
    std::vector<Item> stack{{root, -1, 0.0, 2.0 * M_PI}};
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        const auto& vx = t.at(it.v);
        std::vector<int> kids;
        size_t m = vx.nbr.size(), start = 0;
        for (size_t i = 0; i < m; ++i)
            if (vx.nbr[i] == it.parent) start = i + 1;
        for (size_t k = 0; k < m; ++k) {
            int u = vx.nbr[(start + k) % m];
            if (u != it.parent) kids.push_back(u);
        }
        if (kids.empty()) continue;
        double width = (it.hi - it.lo) / kids.size();
        for (size_t k = 0; k < kids.size(); ++k) {
            double lo = it.lo + k * width, hi = lo + width;
            double th = 0.5 * (lo + hi);
            pos[kids[k]] = pos[it.v] + cplx(std::cos(th), std::sin(th));
            stack.push_back({kids[k], it.v, lo, hi});
        }
    }
    return pos;
}

struct System {
    std::vector<int> black_ids, white_ids;  // black_ids[0] pinned at 0
    std::vector<int> bm, wm;                // multiplicities
    int n = 0;                              // degree
};

Poly product_poly(const std::vector<cplx>& pts, const std::vector<int>& mult) {
    Poly p = Poly::one();
    for (size_t i = 0; i < pts.size(); ++i)
        for (int k = 0; k < mult[i]; ++k) p *= Poly::linear_root(pts[i]);
    return p;
}

}  // namespace

ShabatData solve_shabat(const PlaneTree& taug, const SolveOptions& opts) {
    auto bad = validate(taug);
    if (!bad.empty()) throw std::invalid_argument("solve_shabat: " + bad.front());

    System sys;
    sys.n = taug.n_edges();
    int pin = -1, pin_val = 0;
    for (const auto& v : taug.verts) {
        if (v.color == Color::black && static_cast<int>(v.nbr.size()) > pin_val) {
            pin_val = static_cast<int>(v.nbr.size());
            pin = v.id;
        }
    }
    bool white_branch = false;
    for (const auto& v : taug.verts)
        if (v.color == Color::white && v.nbr.size() > 1) white_branch = true;
    if (pin_val < 2 || !white_branch)
        throw std::invalid_argument(
            "solve_shabat: need a black and a white vertex of valence > 1");

    sys.black_ids.push_back(pin);
    sys.bm.push_back(pin_val);
    for (const auto& v : taug.verts) {
        if (v.id == pin) continue;
        if (v.color == Color::black) {
            sys.black_ids.push_back(v.id);
            sys.bm.push_back(static_cast<int>(v.nbr.size()));
        } else {
            sys.white_ids.push_back(v.id);
            sys.wm.push_back(static_cast<int>(v.nbr.size()));
        }
    }
    int nb = static_cast<int>(sys.black_ids.size()), nw = static_cast<int>(sys.white_ids.size());
    int n = sys.n;
    int unknowns = (nb - 1) + nw;
    if (unknowns != n) throw std::logic_error("solve_shabat: vertex count mismatch");

    auto base = embed_tree(taug, pin);

    struct Candidate {
        ShabatData sd;
        std::vector<double> key;
    };
    std::vector<Candidate> matches;
    int converged_nonmatching = 0;

    for (int restart = 0; restart < opts.max_restarts; ++restart) {
        std::mt19937_64 rng(opts.seed ^ (0x9E3779B97F4A7C15ull * (restart + 1)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        double sigma = restart == 0 ? 0.0 : 0.22 * (1.0 + restart / 12.0);

        std::vector<cplx> bx(nb), wx(nw);
        bx[0] = cplx(0.0);
        for (int j = 1; j < nb; ++j)
            bx[j] = base.at(sys.black_ids[j]) + sigma * cplx(gauss(rng), gauss(rng));
        for (int i = 0; i < nw; ++i)
            wx[i] = base.at(sys.white_ids[i]) + sigma * cplx(gauss(rng), gauss(rng));

        // Newton on the coefficients of Pb - Pw - 1 (degrees 0..n-1).
        bool ok = false;
        int stall = 0;
        for (int iter = 0; iter < 120; ++iter) {
            Poly pb = product_poly(bx, sys.bm);
            Poly pw = product_poly(wx, sys.wm);
            Eigen::VectorXcd F(n);
            for (int i = 0; i < n; ++i) {
                cplx cb = i < static_cast<int>(pb.c.size()) ? pb.c[i] : cplx(0.0);
                cplx cw = i < static_cast<int>(pw.c.size()) ? pw.c[i] : cplx(0.0);
                F(i) = cb - cw - (i == 0 ? cplx(1.0) : cplx(0.0));
            }
            double fnorm = F.norm();
            if (fnorm < opts.tol * n) {
                ok = true;
                break;
            }
            Eigen::MatrixXcd J(n, n);
            int col = 0;
            for (int j = 1; j < nb; ++j, ++col) {
                Poly d = pb.deflate(bx[j]);
                d *= cplx(-double(sys.bm[j]));
                for (int i = 0; i < n; ++i)
                    J(i, col) = i < static_cast<int>(d.c.size()) ? d.c[i] : cplx(0.0);
            }
            for (int i2 = 0; i2 < nw; ++i2, ++col) {
                Poly d = pw.deflate(wx[i2]);
                d *= cplx(double(sys.wm[i2]));
                for (int i = 0; i < n; ++i)
                    J(i, col) = i < static_cast<int>(d.c.size()) ? d.c[i] : cplx(0.0);
            }
            Eigen::VectorXcd dx = J.partialPivLu().solve(-F);
            if (!dx.allFinite()) break;

            double lambda = 1.0;
            bool improved = false;
            for (int half = 0; half < 9; ++half) {
                std::vector<cplx> bt = bx, wt = wx;
                col = 0;
                for (int j = 1; j < nb; ++j, ++col) bt[j] += lambda * dx(col);
                for (int i2 = 0; i2 < nw; ++i2, ++col) wt[i2] += lambda * dx(col);
                Poly pbt = product_poly(bt, sys.bm);
                Poly pwt = product_poly(wt, sys.wm);
                double norm2 = 0.0;
                for (int i = 0; i < n; ++i) {
                    cplx cb = i < static_cast<int>(pbt.c.size()) ? pbt.c[i] : cplx(0.0);
                    cplx cw = i < static_cast<int>(pwt.c.size()) ? pwt.c[i] : cplx(0.0);
                    cplx r = cb - cw - (i == 0 ? cplx(1.0) : cplx(0.0));
                    norm2 += std::norm(r);
                }
                if (std::sqrt(norm2) < fnorm) {
                    bx = bt;
                    wx = wt;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!improved && ++stall >= 3) break;
        }
        if (!ok) continue;

        // Reject degenerate configurations (coalesced vertices).
        double spread = 0.0;
        std::vector<cplx> all = bx;
        all.insert(all.end(), wx.begin(), wx.end());
        for (const auto& z : all) spread = std::max(spread, std::abs(z));
        spread = std::max(spread, 1.0);
        double minsep = 1e300;
        for (size_t i = 0; i < all.size(); ++i)
            for (size_t j = i + 1; j < all.size(); ++j)
                minsep = std::min(minsep, std::abs(all[i] - all[j]));
        if (minsep < 1e-6 * spread) {
            converged_nonmatching++;
            continue;
        }

        ShabatData sd;
        sd.f = product_poly(bx, sys.bm);
        sd.y_black = cplx(0.0);
        sd.y_white = cplx(1.0);
        for (int j = 0; j < nb; ++j) sd.blacks.push_back({bx[j], sys.bm[j]});
        for (int i = 0; i < nw; ++i) sd.whites.push_back({wx[i], sys.wm[i]});

        try {
            PlaneTree got = extract_dessin(sd);
            if (!plane_iso(got, taug, false)) {
                converged_nonmatching++;
                continue;
            }
        } catch (const std::runtime_error&) {
            converged_nonmatching++;
            continue;
        }

        std::vector<double> key;
        for (const auto& ci : sd.f.c) {
            key.push_back(ci.real());
            key.push_back(ci.imag());
        }
        matches.push_back({std::move(sd), std::move(key)});
    }

    if (matches.empty())
        throw std::runtime_error("solve_shabat: no matching solution in " +
                                 std::to_string(opts.max_restarts) + " restarts (" +
                                 std::to_string(converged_nonmatching) +
                                 " converged candidates rejected)");
    auto best = std::min_element(matches.begin(), matches.end(),
                                 [](const Candidate& a, const Candidate& b) {
                                     return a.key < b.key;
                                 });
    return best->sd;
}

}  // namespace dessin
