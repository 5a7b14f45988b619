#include "dessin/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dessin {

cplx Poly::operator()(cplx z) const {
    cplx r(0.0);
    for (size_t i = c.size(); i-- > 0;) r = r * z + c[i];
    return r;
}

Poly Poly::derivative() const {
    Poly d;
    if (c.size() <= 1) return d;
    d.c.resize(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i) d.c[i - 1] = double(i) * c[i];
    return d;
}

void Poly::trim(double tol) {
    while (!c.empty() && std::abs(c.back()) <= tol) c.pop_back();
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), cplx(0.0));
    for (size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), cplx(0.0));
    for (size_t i = 0; i < o.c.size(); ++i) c[i] -= o.c[i];
    return *this;
}

Poly& Poly::operator*=(const Poly& o) {
    if (c.empty() || o.c.empty()) {
        c.clear();
        return *this;
    }
    std::vector<cplx> r(c.size() + o.c.size() - 1, cplx(0.0));
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = 0; j < o.c.size(); ++j) r[i + j] += c[i] * o.c[j];
    c = std::move(r);
    return *this;
}

Poly& Poly::operator*=(cplx s) {
    for (auto& x : c) x *= s;
    return *this;
}

Poly Poly::pow(int k) const {
    Poly r = Poly::one();
    for (int i = 0; i < k; ++i) r *= *this;
    return r;
}

Poly Poly::deflate(cplx r) const {
    if (c.size() <= 1) return Poly{};
    std::vector<cplx> q(c.size() - 1);
    cplx carry = c.back();
    for (size_t i = c.size() - 1; i-- > 0;) {
        q[i] = carry;
        carry = c[i] + carry * r;
    }
    return Poly{std::move(q)};
}

Poly operator+(Poly a, const Poly& b) { return a += b; }
Poly operator-(Poly a, const Poly& b) { return a -= b; }
Poly operator*(Poly a, const Poly& b) { return a *= b; }
Poly operator*(cplx s, Poly a) { return a *= s; }

int Roots::total() const { return std::accumulate(mult.begin(), mult.end(), 0); }

namespace {

// Backward-error scale of p at z: sum |c_i| |z|^i.
double backward_scale(const Poly& p, cplx z) {
    double az = std::abs(z), pw = 1.0, s = 0.0;
    for (const auto& ci : p.c) {
        s += std::abs(ci) * pw;
        pw *= az;
    }
    return std::max(s, 1e-300);
}

struct PairCmp {
    bool operator()(const cplx& a, const cplx& b) const {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    }
};

Roots aberth(const Poly& input, const std::vector<cplx>* warm, double cluster_rel) {
    Poly p = input;
    p.trim(0.0);
    Roots out;
    if (p.degree() < 1) {
        out.converged = true;
        return out;
    }
    // Monic normalization.
    cplx lead = p.lead();
    for (auto& ci : p.c) ci /= lead;
    int n = p.degree();
    Poly dp = p.derivative();

    std::vector<cplx> w(n);
    if (warm && static_cast<int>(warm->size()) == n) {
        for (int k = 0; k < n; ++k)
            w[k] = (*warm)[k] + 1e-9 * cplx(std::cos(0.7 * k + 0.3), std::sin(1.1 * k + 0.9));
    } else {
        double radius = 0.0;
        for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(p.c[i]));
        radius = 1.0 + radius;
        for (int k = 0; k < n; ++k) {
            double th = 2.0 * M_PI * k / n + 0.4;
            w[k] = radius * cplx(std::cos(th), std::sin(th));
        }
    }

    const int max_iter = 600;
    int it = 0;
    for (; it < max_iter; ++it) {
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            cplx pv = p(w[k]);
            worst = std::max(worst, std::abs(pv) / backward_scale(p, w[k]));
            cplx dv = dp(w[k]);
            if (dv == cplx(0.0)) {
                w[k] += 1e-8 * cplx(1.0, 1.0);
                continue;
            }
            cplx nk = pv / dv;
            cplx s(0.0);
            for (int j = 0; j < n; ++j)
                if (j != k) {
                    cplx diff = w[k] - w[j];
                    if (std::abs(diff) < 1e-300) diff = cplx(1e-300, 0.0);
                    s += 1.0 / diff;
                }
            cplx denom = 1.0 - nk * s;
            cplx step = (std::abs(denom) < 1e-12) ? nk : nk / denom;
            w[k] -= step;
        }
        if (worst < 1e-14) break;
    }
    out.iterations = it;
    double residual = 0.0;
    for (int k = 0; k < n; ++k)
        residual = std::max(residual, std::abs(p(w[k])) / backward_scale(p, w[k]));
    out.converged = residual < 1e-10;
    if (!out.converged) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "aberth residual %.3e after %d iterations", residual, it);
        out.note = buf;
    }

    // Single-linkage clustering.  An m-fold root scatters the iterates over
    // a disk of radius ~ eps^(1/m), so the link radius must grow with the
    // local multiplicity; estimate it pointwise by Schroeder's formula
    // 1/(1 - p p''/p'^2) -> m near an m-fold root.
    double scale = 1.0;
    for (const auto& z : w) scale = std::max(scale, std::abs(z));
    Poly ddp = dp.derivative();
    std::vector<int> mest(n, 1);
    for (int k = 0; k < n; ++k) {
        cplx dv = dp(w[k]);
        int m = 2;
        if (std::abs(dv) > 1e-300) {
            cplx u = p(w[k]) * ddp(w[k]) / (dv * dv);
            double denom = std::abs(1.0 - u);
            double est = denom > 1e-12 ? 1.0 / denom : double(n);
            m = static_cast<int>(std::lround(est));
        }
        mest[k] = std::clamp(m, 1, n);
    }
    auto link_radius = [&](int m) {
        double r = m > 1 ? 4.0 * scale * std::pow(1e-13, 1.0 / m) : 0.0;
        return std::max(r, cluster_rel * scale);
    };
    std::vector<int> rep(n);
    std::iota(rep.begin(), rep.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (rep[x] != x) x = rep[x] = rep[rep[x]];
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(w[i] - w[j]) <= link_radius(std::max(mest[i], mest[j])))
                rep[find(i)] = find(j);

    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::pair<cplx, int>> clustered;
    for (const auto& [r, members] : groups) {
        cplx mean(0.0);
        for (int i : members) mean += w[i];
        mean /= double(members.size());
        int m = static_cast<int>(members.size());
        // Polish a multiple root as a simple root of the (m-1)-th derivative.
        Poly q = p;
        for (int i = 1; i < m; ++i) q = q.derivative();
        Poly dq = q.derivative();
        cplx z = mean;
        for (int step = 0; step < 12; ++step) {
            cplx dv = dq(z);
            if (std::abs(dv) < 1e-300) break;
            cplx delta = q(z) / dv;
            z -= delta;
            if (std::abs(delta) < 1e-16 * (1.0 + std::abs(z))) break;
        }
        // Keep the polish only if it stayed inside the cluster.
        if (std::abs(z - mean) > std::max(link_radius(m), 1e-12)) z = mean;
        clustered.push_back({z, m});
    }
    std::sort(clustered.begin(), clustered.end(),
              [](const auto& a, const auto& b) { return PairCmp{}(a.first, b.first); });
    for (const auto& [z, m] : clustered) {
        out.points.push_back(z);
        out.mult.push_back(m);
    }
    return out;
}

}  // namespace

Roots roots(const Poly& p, double cluster_rel) { return aberth(p, nullptr, cluster_rel); }

Roots roots(const Poly& p, const std::vector<cplx>& warm, double cluster_rel) {
    return aberth(p, &warm, cluster_rel);
}

std::vector<std::pair<cplx, int>> critical_values(const Poly& p, double tol) {
    Poly dp = p.derivative();
    Roots cr = roots(dp);
    std::vector<std::pair<cplx, int>> vals;
    for (size_t i = 0; i < cr.points.size(); ++i) vals.push_back({p(cr.points[i]), cr.mult[i]});

    double scale = 1.0;
    for (const auto& [v, m] : vals) scale = std::max(scale, std::abs(v));
    double rad = tol * scale;

    std::vector<std::pair<cplx, int>> clustered;
    std::vector<bool> used(vals.size(), false);
    // Greedy single linkage; fine for the handful of critical points here.
    for (size_t i = 0; i < vals.size(); ++i) {
        if (used[i]) continue;
        cplx sum = vals[i].first * double(vals[i].second);
        int m = vals[i].second;
        used[i] = true;
        bool grew = true;
        std::vector<size_t> members{i};
        while (grew) {
            grew = false;
            for (size_t j = 0; j < vals.size(); ++j) {
                if (used[j]) continue;
                for (size_t k : members)
                    if (std::abs(vals[j].first - vals[k].first) <= rad) {
                        used[j] = true;
                        members.push_back(j);
                        sum += vals[j].first * double(vals[j].second);
                        m += vals[j].second;
                        grew = true;
                        break;
                    }
            }
        }
        clustered.push_back({sum / double(m), m});
    }
    std::sort(clustered.begin(), clustered.end(),
              [](const auto& a, const auto& b) { return PairCmp{}(a.first, b.first); });
    return clustered;
}

bool is_shabat(const Poly& p, double tol) {
    Poly q = p;
    q.trim(0.0);
    if (q.degree() < 3) return false;
    return critical_values(q, tol).size() == 2;
}

namespace {

double dist_point_segment(cplx p, cplx a, cplx b) {
    cplx ab = b - a;
    double len2 = std::norm(ab);
    if (len2 < 1e-300) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

// Damped Newton toward f(w) = target.
std::optional<cplx> newton_to(const Poly& f, const Poly& fp, cplx target, cplx start,
                              double tol) {
    cplx w = start;
    double err = std::abs(f(w) - target);
    double goal = tol * (1.0 + std::abs(target));
    for (int i = 0; i < 60 && err > goal; ++i) {
        cplx dv = fp(w);
        if (std::abs(dv) < 1e-300) return std::nullopt;
        cplx delta = (f(w) - target) / dv;
        double lambda = 1.0;
        cplx next = w - delta;
        double nerr = std::abs(f(next) - target);
        while (nerr > err && lambda > 1.0 / 64) {
            lambda *= 0.5;
            next = w - lambda * delta;
            nerr = std::abs(f(next) - target);
        }
        if (nerr >= err && err > goal) return std::nullopt;
        w = next;
        err = nerr;
    }
    if (err > goal) return std::nullopt;
    return w;
}

}  // namespace

LocalInverse local_inverse(const Poly& f, cplx z, cplx seed, double tol) {
    Poly fp = f.derivative();
    if (std::abs(fp(seed)) < 1e-300) return {std::nullopt, "seed is critical"};
    cplx z0 = f(seed);

    for (const auto& [v, m] : critical_values(f))
        if (dist_point_segment(v, z0, z) < tol) return {std::nullopt, "branch crossing"};

    cplx w = seed;
    double t = 0.0, dt = 1.0;
    while (t < 1.0) {
        cplx target = z0 + (t + dt) * (z - z0);
        auto wn = newton_to(f, fp, target, w, tol);
        bool ok = wn.has_value();
        if (ok) {
            // A long jump signals a change of branch; refine instead.
            double jump = std::abs(*wn - w);
            if (jump > 0.5 * (1.0 + std::abs(w)) && dt > 1e-5) ok = false;
        }
        if (ok) {
            w = *wn;
            t += dt;
            dt = std::min(2.0 * dt, 1.0 - t);
            if (dt == 0.0 && t < 1.0) dt = 1.0 - t;
        } else {
            dt *= 0.5;
            if (dt < 1e-7) return {std::nullopt, "no convergence"};
        }
    }
    return {w, ""};
}

bool affine_equivalent(const Poly& f1in, const Poly& f2in, double tol) {
    Poly f1 = f1in, f2 = f2in;
    f1.trim(0.0);
    f2.trim(0.0);
    if (f1.degree() != f2.degree()) return false;
    int n = f1.degree();
    if (n <= 1) return n == f2.degree();

    auto cv1 = critical_values(f1), cv2 = critical_values(f2);
    if (cv1.size() != cv2.size()) return false;

    double scale2 = 0.0;
    for (const auto& ci : f2.c) scale2 = std::max(scale2, std::abs(ci));
    scale2 = std::max(scale2, 1.0);

    auto compose_check = [&](cplx a, cplx b) {
        // g = a f1 + b; search alpha, beta with g(alpha z + beta) = f2.
        Poly g = f1;
        g *= a;
        if (g.c.empty()) g.c.push_back(cplx(0.0));
        g.c[0] += b;
        cplx ratio = f2.lead() / g.lead();
        cplx alpha0 = std::pow(ratio, 1.0 / double(n));
        for (int k = 0; k < n; ++k) {
            double th = 2.0 * M_PI * k / n;
            cplx alpha = alpha0 * cplx(std::cos(th), std::sin(th));
            cplx an1 = std::pow(alpha, n - 1);
            cplx gN = g.c[n], gN1 = g.c[n - 1];
            cplx beta = (f2.c[n - 1] / an1 - gN1) / (double(n) * gN);
            // Horner composition of g with alpha z + beta.
            Poly lin{{beta, alpha}};
            Poly comp;
            for (int i = n; i >= 0; --i) {
                comp *= lin;
                if (comp.c.empty()) comp.c.push_back(cplx(0.0));
                comp.c[0] += g.c[i];
            }
            comp.c.resize(n + 1, cplx(0.0));
            double err = 0.0;
            for (int i = 0; i <= n; ++i) err = std::max(err, std::abs(comp.c[i] - f2.c[i]));
            if (err <= tol * scale2) return true;
        }
        return false;
    };

    if (cv1.size() == 2) {
        // Two pairings of critical values; multiplicity totals must match.
        for (int swap = 0; swap < 2; ++swap) {
            auto u1 = cv1[0], v1 = cv1[1];
            auto u2 = cv2[swap], v2 = cv2[1 - swap];
            if (u1.second != u2.second || v1.second != v2.second) continue;
            cplx a = (u2.first - v2.first) / (u1.first - v1.first);
            cplx b = u2.first - a * u1.first;
            if (compose_check(a, b)) return true;
        }
        return false;
    }
    if (cv1.size() == 1) {
        // Unicritical (c (z - q)^n + v); the single critical values must
        // correspond, and the scale freedom is absorbed by the alpha search.
        if (cv1[0].second != n - 1 || cv2[0].second != n - 1) return false;
        return compose_check(cplx(1.0), cv2[0].first - cv1[0].first);
    }
    return false;
}

std::string write_poly(const Poly& p) {
    std::string s = "poly " + std::to_string(p.degree());
    char buf[64];
    for (const auto& ci : p.c) {
        std::snprintf(buf, sizeof buf, " %.17g %.17g", ci.real(), ci.imag());
        s += buf;
    }
    s += "\n";
    return s;
}

Poly read_poly_string(const std::string& s) {
    std::istringstream is(s);
    std::string kw;
    int deg;
    if (!(is >> kw >> deg) || kw != "poly" || deg < 0)
        throw std::runtime_error("poly format: bad header");
    Poly p;
    for (int i = 0; i <= deg; ++i) {
        double re, im;
        if (!(is >> re >> im)) throw std::runtime_error("poly format: missing coefficients");
        p.c.push_back(cplx(re, im));
    }
    return p;
}

}  // namespace dessin
