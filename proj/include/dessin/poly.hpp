#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dessin/tree.hpp"

namespace dessin {

using cplx = std::complex<double>;

// Dense polynomial with complex coefficients in ascending degree order.
struct Poly {
    std::vector<cplx> c;

    Poly() = default;
    explicit Poly(std::vector<cplx> coeffs) : c(std::move(coeffs)) {}

    static Poly zero() { return Poly{}; }
    static Poly one() { return Poly{{cplx(1.0, 0.0)}}; }
    static Poly linear_root(cplx r) { return Poly{{-r, cplx(1.0, 0.0)}}; }

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    cplx lead() const { return c.empty() ? cplx(0.0) : c.back(); }

    cplx operator()(cplx z) const;
    Poly derivative() const;
    // Drop trailing coefficients of magnitude <= tol.
    void trim(double tol = 0.0);

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    Poly& operator*=(cplx s);
    Poly pow(int k) const;
    // Synthetic division by (z - r); exact when r is a root.
    Poly deflate(cplx r) const;

    bool operator==(const Poly&) const = default;
};

Poly operator+(Poly a, const Poly& b);
Poly operator-(Poly a, const Poly& b);
Poly operator*(Poly a, const Poly& b);
Poly operator*(cplx s, Poly a);

// Simultaneous root finding with multiplicity clustering.
struct Roots {
    std::vector<cplx> points;
    std::vector<int> mult;
    bool converged = true;
    int iterations = 0;
    std::string note;

    int total() const;
};

// Cluster radius is cluster_rel times the root scale.  Warm starts (one per
// root of p, multiplicity unfolded) seed the iteration when supplied.
Roots roots(const Poly& p, double cluster_rel = 1e-6);
Roots roots(const Poly& p, const std::vector<cplx>& warm, double cluster_rel = 1e-6);

// Values of p at the roots of p', clustered; second component is the number
// of critical points (with multiplicity) over each value.
std::vector<std::pair<cplx, int>> critical_values(const Poly& p, double tol = 1e-6);

// Exactly two finite critical values.
bool is_shabat(const Poly& p, double tol = 1e-6);

// A Shabat polynomial together with its two critical values and the fibers
// over them (position, local degree).
struct ShabatData {
    Poly f;
    cplx y_black{};
    cplx y_white{};
    std::vector<std::pair<cplx, int>> blacks;
    std::vector<std::pair<cplx, int>> whites;
};

// Branch-faithful inverse: solve f(w) = z continuing from seed, staying in
// the univalent branch of the seed.  On failure `w` is empty and `error`
// says why ("branch crossing", "no convergence", ...).
struct LocalInverse {
    std::optional<cplx> w;
    std::string error;
};
LocalInverse local_inverse(const Poly& f, cplx z, cplx seed, double tol = 1e-10);

// Lift the arc between the two critical values through every preimage sheet
// and glue the lifts into the bicolored plane tree of f.  Throws
// std::runtime_error when lifts cannot be matched to vertices within
// tolerance.
PlaneTree extract_dessin(const ShabatData& sd);

struct SolveOptions {
    int max_restarts = 64;
    unsigned long long seed = 20240515ull;
    double tol = 1e-12;
};

// Numerically realize a plane tree by a Shabat polynomial, normalized so the
// black critical value is 0, the white one is 1, and a distinguished black
// vertex sits at the origin.  The extracted dessin of the result is plane
// isomorphic to the input; throws std::runtime_error when the retry budget
// is exhausted.
ShabatData solve_shabat(const PlaneTree& taug, const SolveOptions& opts = {});

// True iff A1 . f1 . A2 = f2 for affine maps A1, A2.
bool affine_equivalent(const Poly& f1, const Poly& f2, double tol = 1e-8);

// Text form: "poly <degree> <re0> <im0> ... <reN> <imN>".
std::string write_poly(const Poly& p);
Poly read_poly_string(const std::string& s);

}  // namespace dessin
