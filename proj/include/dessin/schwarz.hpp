#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dessin/poly.hpp"

namespace dessin {

// A Shabat polynomial with the marked points that define the reflection
// family: v_b is a simple critical point of f, v_w the pendant regular point
// next to it, v_wp the branch point on its other side (f(v_w) = f(v_wp)).
struct SliceConfig {
    Poly f;
    Poly df;                                  // f'
    cplx v_b{}, v_w{}, v_wp{};
    int d = 0;                                // deg f = d + 1
    cplx y_c{}, y_f{};
    std::vector<std::pair<cplx, int>> crit;   // roots of f' with multiplicities
    std::vector<cplx> jets;                   // f^(k)(v_b)/k! for k = 0..7
    cplx A32{};                               // jets[3] / jets[2]
    double scale = 1.0;
};

// Validates the marked points and caches derived data; throws on violation.
SliceConfig make_slice(const Poly& f, cplx v_b, cplx v_w, cplx v_wp);

// Geometry attached to one parameter a: the disk around a through v_b, its
// boundary image under f, and a polar grid of inverse-branch seeds.
struct DiskParam {
    cplx a{};
    double r = 0.0;
    double t_b = 0.0;          // angle of v_b seen from a
    std::vector<double> ts;    // angular offsets from t_b, sorted in [0, 2pi)
    std::vector<cplx> bnd;     // f(a + r e^{i(t_b + s)}) at those offsets
    double max_gap = 0.0;      // largest adjacent boundary-sample distance
    double diam = 0.0;         // bounding-box diagonal of the boundary curve
    cplx center{};             // bounding-box center
    double rmin = 0.0, rmax = 0.0;
    int wind_center = 0;       // winding of the curve around `center`
    double eps_cusp = 0.0;     // 1e-6 * diam (overridable)
    double eps_bnd = 0.0;      // 1e-9 * diam (overridable)
    std::vector<cplx> seed_w, seed_fw;  // 64x64 polar grid of (w, f(w))
    // CSR bins of seed_fw over the bounding box, for nearest-seed lookup.
    double bx0 = 0, by0 = 0, bcw = 1, bch = 1;
    std::vector<int> bin_start, bin_item;
};

DiskParam make_disk(const SliceConfig& cfg, cplx a, int n_boundary = 0);

// Circle inversion in the boundary of the disk of dp.
inline cplx eta(const DiskParam& dp, cplx w) {
    return dp.a + (dp.r * dp.r) / std::conj(w - dp.a);
}

enum class Family { Interior, OnPerp, NonUnivalent, CuspDegenerate, NonMember };
const char* family_name(Family f);

Family in_family(const SliceConfig& cfg, cplx a, int n_samples = 1024,
                 double tol = 1e-9);

struct SigmaResult {
    enum class Tag { Value, AtInfinity, NotInDomain, NumericFailure } tag;
    cplx value{};     // valid for Value
    cplx preimage{};  // the branch of f^{-1}(z) in the closed disk, for Value
    std::string error;
};

SigmaResult sigma(const SliceConfig& cfg, const DiskParam& dp, cplx z);

struct OrbitClass {
    enum class Tag { Escaped, Bounded, HitCusp, OnBoundary } tag;
    int step = 0;
    cplx point{};
    bool pre_domain = false;  // Escaped with the start already outside
    std::string note;
};

OrbitClass classify_orbit(const SliceConfig& cfg, const DiskParam& dp, cplx z0,
                          int n_max = 500);

struct SigmaCritical {
    cplx point{};         // critical point of sigma in Omega_a
    int local_degree = 0;
    bool at_pole = false;  // the point sent to infinity
};

std::vector<SigmaCritical> critical_points_sigma(const SliceConfig& cfg,
                                                 const DiskParam& dp);

struct CuspType {
    int nu = 3;
    double margin = 0.0;  // relative size of the deciding jet coefficient
    double b3 = 0.0, b5 = 0.0, b7 = 0.0;
    std::string note;
};

CuspType cusp_type(const SliceConfig& cfg, const DiskParam& dp,
                   double tol = 1e-7);

// Transverse third-order coefficient of the boundary cusp as a closed-form
// (affine) function of a; its zero set carries the higher-order-cusp arc.
double cusp_b3(const SliceConfig& cfg, cplx a);

struct DoublePoint {
    double t1 = 0.0, t2 = 0.0;  // absolute angles on the circle, t1 < t2
    int contact = 1;            // 1 transversal, 3 tangential
    bool refined = true;
    cplx point{};               // common image point
};

std::vector<DoublePoint> double_points(const SliceConfig& cfg,
                                       const DiskParam& dp, double tol = 1e-9);

// Winding number of the sampled boundary curve around z.
int winding_number(const DiskParam& dp, cplx z);

// Distance from z to the boundary curve (refined near the curve).
double boundary_distance(const SliceConfig& cfg, const DiskParam& dp, cplx z);

}  // namespace dessin
