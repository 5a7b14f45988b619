#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dessin/poly.hpp"
#include "dessin/schwarz.hpp"

using dessin::cplx;
using dessin::CuspType;
using dessin::DiskParam;
using dessin::DoublePoint;
using dessin::Family;
using dessin::OrbitClass;
using dessin::Poly;
using dessin::SigmaResult;
using dessin::SliceConfig;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// f = z^3 - 3z: 3-edge chain slice, v_b = 1, v_w = 2, v_w' = -1.
SliceConfig cheb_slice() {
    Poly f{{cplx(0.0), cplx(-3.0), cplx(0.0), cplx(1.0)}};
    return make_slice(f, cplx(1.0), cplx(2.0), cplx(-1.0));
}

// f = 4z^3 - z^4: star-with-pendant slice, v_b = 3, v_w = 4, v_w' = 0.
SliceConfig star_slice() {
    Poly f{{cplx(0.0), cplx(0.0), cplx(0.0), cplx(4.0), cplx(-1.0)}};
    return make_slice(f, cplx(3.0), cplx(4.0), cplx(0.0));
}

cplx on_circle(const DiskParam& dp, double rho, double th) {
    return dp.a + std::polar(rho * dp.r, th);
}

// Independent collision detector: brute-force minimum image distance over
// sample pairs with circular parameter separation above `sep`.  Pairs whose
// members BOTH lie within `czone` of the cusp parameter are skipped: the two
// branches meeting at the cusp are close in the image by continuity without
// the curve being non-injective there.
double brute_min_image_dist(const SliceConfig& cfg, const DiskParam& dp,
                            double sep, double czone = 0.6, int n = 4000) {
    std::vector<cplx> p(n);
    for (int i = 0; i < n; ++i)
        p[i] = cfg.f(on_circle(dp, 1.0, dp.t_b + kTau * i / n));
    auto cuspward = [&](int i) {
        double t = kTau * i / n;
        return std::min(t, kTau - t);
    };
    double best = 1e300;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double ds = kTau * (j - i) / n;
            ds = std::min(ds, kTau - ds);
            if (ds < sep) continue;
            if (cuspward(i) < czone && cuspward(j) < czone) continue;
            best = std::min(best, std::abs(p[i] - p[j]));
        }
    return best;
}

}  // namespace

TEST_CASE("make_slice: chain and star slices expose the marked data") {
    SliceConfig sc = cheb_slice();
    CHECK(sc.d == 2);
    CHECK(std::abs(sc.y_c - cplx(-2.0)) < 1e-12);
    CHECK(std::abs(sc.y_f - cplx(2.0)) < 1e-12);
    CHECK(std::abs(sc.A32 - cplx(1.0 / 3.0)) < 1e-12);
    REQUIRE(sc.crit.size() == 2);  // f' = 3z^2 - 3: roots -1, 1
    CHECK(std::abs(sc.crit[0].first - cplx(-1.0)) < 1e-9);
    CHECK(sc.crit[0].second == 1);
    CHECK(std::abs(sc.crit[1].first - cplx(1.0)) < 1e-9);

    SliceConfig st = star_slice();
    CHECK(st.d == 3);
    CHECK(std::abs(st.y_c - cplx(27.0)) < 1e-10);
    CHECK(std::abs(st.y_f) < 1e-10);
    // A2 = f''(3)/2 = -18, A3 = f'''(3)/6 = -8
    CHECK(std::abs(st.A32 - cplx(4.0 / 9.0)) < 1e-12);
    REQUIRE(st.crit.size() == 2);  // f' = 12z^2 - 4z^3: 0 (double), 3
    CHECK(std::abs(st.crit[0].first) < 1e-9);
    CHECK(st.crit[0].second == 2);
}

TEST_CASE("make_slice: rejects inconsistent marked points") {
    Poly cheb{{cplx(0.0), cplx(-3.0), cplx(0.0), cplx(1.0)}};
    // v_b must be a critical point
    CHECK_THROWS(make_slice(cheb, cplx(0.0), cplx(2.0), cplx(-1.0)));
    // v_b must be a simple critical point (z^3 at 0 is degenerate)
    Poly cube{{cplx(0.0), cplx(0.0), cplx(0.0), cplx(1.0)}};
    CHECK_THROWS(make_slice(cube, cplx(0.0), cplx(1.0), cplx(1.0)));
    // v_w must be regular
    CHECK_THROWS(make_slice(cheb, cplx(1.0), cplx(-1.0), cplx(2.0)));
    // v_w' must lie over y_f
    CHECK_THROWS(make_slice(cheb, cplx(1.0), cplx(2.0), cplx(0.0)));
}

TEST_CASE("make_disk: geometry, winding cache, and defaults") {
    SliceConfig sc = cheb_slice();
    DiskParam dp = make_disk(sc, cplx(2.0));
    CHECK(dp.r == doctest::Approx(1.0));
    // a + r e^{i t_b} lands on v_b
    CHECK(std::abs(on_circle(dp, 1.0, dp.t_b) - sc.v_b) < 1e-12);
    CHECK(dp.wind_center == 1);
    CHECK(dp.diam > 1.0);
    CHECK(dp.eps_cusp == doctest::Approx(1e-6 * dp.diam));
    CHECK(dp.eps_bnd == doctest::Approx(1e-9 * dp.diam));
    CHECK(dp.seed_w.size() == 64 * 64);
    CHECK(dp.bnd.size() == dp.ts.size());
    CHECK(dp.max_gap > 0.0);
    CHECK(dp.max_gap <= dp.diam / 256.0 + 1e-30);
}

TEST_CASE("eta: circle inversion fixes the boundary and is involutive") {
    SliceConfig sc = cheb_slice();
    DiskParam dp = make_disk(sc, cplx(2.2, 0.4));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        cplx w = on_circle(dp, 0.05 + 0.9 * u(rng), kTau * u(rng));
        cplx e = eta(dp, w);
        CHECK(std::abs(eta(dp, e) - w) < 1e-12 * (1.0 + std::abs(w)));
        CHECK(std::abs(e - dp.a) * std::abs(w - dp.a) ==
              doctest::Approx(dp.r * dp.r));
    }
    CHECK(std::abs(eta(dp, sc.v_b) - sc.v_b) < 1e-12);
}

TEST_CASE("in_family: chain slice classifications along the real axis") {
    SliceConfig sc = cheb_slice();
    // critical point -1 on the closed disk B(0,1)
    CHECK(in_family(sc, cplx(0.0)) == Family::NonUnivalent);
    // v_w = 2 outside the closed disk
    CHECK(in_family(sc, cplx(1.2)) == Family::NonMember);
    // |a - v_b| = |a - v_w| = 0.5
    CHECK(in_family(sc, cplx(1.5)) == Family::OnPerp);
    CHECK(in_family(sc, cplx(1.7)) == Family::Interior);
    CHECK(in_family(sc, cplx(2.0)) == Family::Interior);
    CHECK(in_family(sc, cplx(3.0)) == Family::Interior);
    CHECK(in_family(sc, cplx(3.0, 0.5)) == Family::Interior);
    // transverse cusp coefficient vanishes on the line Re a = 4
    CHECK(in_family(sc, cplx(4.0)) == Family::CuspDegenerate);
    CHECK(in_family(sc, cplx(4.0, 1.2)) == Family::CuspDegenerate);
    // past the degenerate-cusp arc the boundary curve self-intersects
    CHECK(in_family(sc, cplx(4.0, 3.0)) == Family::NonUnivalent);
    CHECK(in_family(sc, cplx(6.0)) == Family::NonUnivalent);
    CHECK(in_family(sc, cplx(8.0)) == Family::NonUnivalent);
    // degenerate disk
    CHECK(in_family(sc, sc.v_b) == Family::NonMember);
}

TEST_CASE("in_family: star slice classifications") {
    SliceConfig st = star_slice();
    CHECK(in_family(st, cplx(3.2)) == Family::NonMember);
    CHECK(in_family(st, cplx(3.5)) == Family::OnPerp);
    CHECK(in_family(st, cplx(4.0)) == Family::Interior);
    CHECK(in_family(st, cplx(5.0)) == Family::Interior);
    // b3 = 1 + Re((4/9)(3 - a)) vanishes at a = 5.25
    CHECK(in_family(st, cplx(5.25)) == Family::CuspDegenerate);
    CHECK(in_family(st, cplx(5.5)) == Family::NonUnivalent);
    CHECK(in_family(st, cplx(6.0)) == Family::NonUnivalent);
}

TEST_CASE("sigma: defining relation against the pushforward oracle") {
    SliceConfig sc = cheb_slice();
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (cplx a : {cplx(2.0), cplx(2.285, 0.772), cplx(3.3, -0.4)}) {
        REQUIRE(in_family(sc, a) == Family::Interior);
        DiskParam dp = make_disk(sc, a);
        double worst = 0.0;
        for (int k = 0; k < 500; ++k) {
            cplx w = on_circle(dp, 0.05 + 0.949 * std::sqrt(u(rng)), kTau * u(rng));
            cplx z = sc.f(w);
            SigmaResult sr = sigma(sc, dp, z);
            REQUIRE(sr.tag == SigmaResult::Tag::Value);
            CHECK(std::abs(sr.preimage - dp.a) <= dp.r * (1.0 + 1e-6));
            CHECK(std::abs(sc.f(sr.preimage) - z) < 1e-9 * dp.diam);
            worst = std::max(worst, std::abs(sr.value - sc.f(eta(dp, w))));
        }
        CHECK(worst <= 1e-10 * dp.diam);
    }
    SliceConfig st = star_slice();
    DiskParam ds = make_disk(st, cplx(4.5));
    double worst = 0.0;
    for (int k = 0; k < 300; ++k) {
        cplx w = on_circle(ds, 0.05 + 0.949 * std::sqrt(u(rng)), kTau * u(rng));
        SigmaResult sr = sigma(st, ds, st.f(w));
        REQUIRE(sr.tag == SigmaResult::Tag::Value);
        worst = std::max(worst, std::abs(sr.value - st.f(eta(ds, w))));
    }
    CHECK(worst <= 1e-10 * ds.diam);
}

TEST_CASE("sigma: boundary fixed pointwise, center to infinity, exterior rejected") {
    SliceConfig sc = cheb_slice();
    DiskParam dp = make_disk(sc, cplx(2.0));
    // the cusp itself
    SigmaResult sc_res = sigma(sc, dp, sc.y_c);
    REQUIRE(sc_res.tag == SigmaResult::Tag::Value);
    CHECK(std::abs(sc_res.value - sc.y_c) < 1e-9 * dp.diam);
    // boundary samples away from the cusp parameter
    double worst = 0.0;
    for (int k = 1; k < 16; ++k) {
        double t = dp.t_b + kTau * k / 16.0;
        cplx z = sc.f(on_circle(dp, 1.0, t));
        SigmaResult sr = sigma(sc, dp, z);
        REQUIRE(sr.tag == SigmaResult::Tag::Value);
        worst = std::max(worst, std::abs(sr.value - z));
    }
    CHECK(worst <= 1e-7);
    // the center reflects to infinity
    CHECK(sigma(sc, dp, sc.f(dp.a)).tag == SigmaResult::Tag::AtInfinity);
    // points outside the image domain are rejected by winding count
    CHECK(sigma(sc, dp, cplx(100.0, 0.0)).tag == SigmaResult::Tag::NotInDomain);
    CHECK(sigma(sc, dp, dp.center + cplx(2.0 * dp.diam, 0.0)).tag ==
          SigmaResult::Tag::NotInDomain);
}

TEST_CASE("degree counts: fiber sizes inside and outside the disk") {
    SliceConfig sc = cheb_slice();
    DiskParam dp = make_disk(sc, cplx(2.0));
    CHECK(winding_number(dp, sc.y_f) == 1);
    CHECK(winding_number(dp, dp.center + cplx(2.0 * dp.diam, 0.0)) == 0);
    auto fiber_split = [&](cplx z) {
        Poly g = sc.f;
        g.c[0] -= z;
        dessin::Roots rr = roots(g);
        REQUIRE(rr.converged);
        int in = 0, out = 0;
        for (size_t i = 0; i < rr.points.size(); ++i) {
            if (std::abs(rr.points[i] - dp.a) < dp.r) in += rr.mult[i];
            else out += rr.mult[i];
        }
        return std::pair<int, int>(in, out);
    };
    // interior points of the image domain: 1 branch inside, d outside
    for (cplx z : {sc.y_f, sc.f(on_circle(dp, 0.5, 0.7)), sc.f(on_circle(dp, 0.8, 2.9))}) {
        auto [in, out] = fiber_split(z);
        CHECK(in == 1);
        CHECK(out == sc.d);
    }
    // far exterior: 0 inside, d+1 outside
    auto [in, out] = fiber_split(dp.center + cplx(2.0 * dp.diam, 0.0));
    CHECK(in == 0);
    CHECK(out == sc.d + 1);
}

TEST_CASE("classify_orbit: exact special orbits on the chain slice") {
    SliceConfig sc = cheb_slice();
    DiskParam dp = make_disk(sc, cplx(2.0));
    // starting at the cusp
    OrbitClass oc = classify_orbit(sc, dp, sc.y_c);
    CHECK(oc.tag == OrbitClass::Tag::HitCusp);
    CHECK(oc.step == 0);
    // starting outside the image domain
    oc = classify_orbit(sc, dp, cplx(100.0, 0.0));
    CHECK(oc.tag == OrbitClass::Tag::Escaped);
    CHECK(oc.step == 0);
    CHECK(oc.pre_domain);
    // a = 2: y_f = f(a), so the marked value reflects straight to infinity
    oc = classify_orbit(sc, dp, sc.y_f);
    CHECK(oc.tag == OrbitClass::Tag::Escaped);
    CHECK(oc.step == 1);
    // a = 5/2: eta(2) = -2 exactly, so sigma(y_f) lands on the cusp
    DiskParam dp25 = make_disk(sc, cplx(2.5));
    oc = classify_orbit(sc, dp25, sc.y_f);
    CHECK(oc.tag == OrbitClass::Tag::HitCusp);
    CHECK(oc.step == 1);
    CHECK(std::abs(oc.point - sc.y_c) < 1e-9);
    // a = 3: eta(v_w) is the free critical point and f(eta(v_w)) = y_f,
    // so y_f is a superattracting fixed point of sigma
    DiskParam dp3 = make_disk(sc, cplx(3.0));
    oc = classify_orbit(sc, dp3, sc.y_f);
    CHECK(oc.tag == OrbitClass::Tag::Bounded);
    CHECK(oc.step == 500);
    CHECK(std::abs(oc.point - sc.y_f) < 1e-9);
    // a = 3.5: bounded orbit converging to an attracting fixed point
    DiskParam dp35 = make_disk(sc, cplx(3.5));
    oc = classify_orbit(sc, dp35, sc.y_f);
    CHECK(oc.tag == OrbitClass::Tag::Bounded);
}

TEST_CASE("classify_orbit: escape depths on the star slice") {
    SliceConfig st = star_slice();
    // v_w = a = 4: the marked value sits over the center
    OrbitClass oc = classify_orbit(st, make_disk(st, cplx(4.0)), st.y_f);
    CHECK(oc.tag == OrbitClass::Tag::Escaped);
    CHECK(oc.step == 1);
    // depth-2 escape
    oc = classify_orbit(st, make_disk(st, cplx(4.3)), st.y_f);
    CHECK(oc.tag == OrbitClass::Tag::Escaped);
    CHECK(oc.step == 2);
    // bounded regime deeper in the slice
    oc = classify_orbit(st, make_disk(st, cplx(4.8)), st.y_f);
    CHECK(oc.tag == OrbitClass::Tag::Bounded);
}

TEST_CASE("cusp_type: series coefficients match the closed form") {
    SliceConfig sc = cheb_slice();
    // b3(a) = 1 + Re((A3/A2)(v_b - a)) is affine in a
    for (cplx a : {cplx(1.7), cplx(2.0), cplx(3.0), cplx(5.0), cplx(2.5, 0.8),
                   cplx(4.0, 1.0)}) {
        DiskParam dp = make_disk(sc, a);
        CuspType ct = cusp_type(sc, dp);
        CHECK(std::abs(ct.b3 - cusp_b3(sc, a)) < 1e-9);
    }
    DiskParam dp2 = make_disk(sc, cplx(2.0));
    CuspType c2 = cusp_type(sc, dp2);
    CHECK(c2.nu == 3);
    CHECK(c2.b3 == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(c2.b5 == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(c2.margin > 0.1);

    SliceConfig st = star_slice();
    DiskParam ds = make_disk(st, cplx(4.0));
    CuspType c4 = cusp_type(st, ds);
    CHECK(c4.nu == 3);
    CHECK(c4.b3 == doctest::Approx(5.0 / 9.0).epsilon(1e-10));
    CHECK(std::abs(c4.b3 - cusp_b3(st, cplx(4.0))) < 1e-12);
}

TEST_CASE("cusp_type: degenerate cusps along the critical line") {
    SliceConfig sc = cheb_slice();
    DiskParam dp = make_disk(sc, cplx(4.0));
    CuspType ct = cusp_type(sc, dp);
    CHECK(ct.nu == 5);
    CHECK(std::abs(ct.b3) < 1e-12);
    CHECK(ct.b5 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ct.b7 == doctest::Approx(-21.0 / 8.0).epsilon(1e-9));

    DiskParam dpi = make_disk(sc, cplx(4.0, 1.2));
    CuspType ci = cusp_type(sc, dpi);
    CHECK(ci.nu == 5);
    CHECK(std::abs(ci.b3) < 1e-12);

    SliceConfig st = star_slice();
    DiskParam ds = make_disk(st, cplx(5.25));
    CHECK(cusp_type(st, ds).nu == 5);
}

TEST_CASE("cusp_type: arc endpoint has a seventh-order cusp") {
    SliceConfig sc = cheb_slice();
    // Along Re a = 4 the fifth-order coefficient changes sign; bisect it.
    auto b5at = [&](double s) {
        DiskParam dp = make_disk(sc, cplx(4.0, s));
        return cusp_type(sc, dp).b5;
    };
    double lo = 1.5, hi = 1.8;
    REQUIRE(b5at(lo) > 0.0);
    REQUIRE(b5at(hi) < 0.0);
    for (int i = 0; i < 50; ++i) {
        double mid = 0.5 * (lo + hi);
        (b5at(mid) > 0.0 ? lo : hi) = mid;
    }
    double send = 0.5 * (lo + hi);
    // the endpoint sits at Im a = sqrt(3)
    CHECK(send == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
    DiskParam de = make_disk(sc, cplx(4.0, send));
    CuspType ce = cusp_type(sc, de);
    CHECK(ce.nu == 7);
    CHECK(ce.b7 == doctest::Approx(4.0).epsilon(1e-6));
    // margins tighten toward the endpoint, then the family degenerates
    CHECK(cusp_type(sc, make_disk(sc, cplx(4.0, 1.5))).margin <
          cusp_type(sc, make_disk(sc, cplx(4.0, 0.9))).margin);
    CHECK(in_family(sc, cplx(4.0, 1.6)) == Family::CuspDegenerate);
    CHECK(in_family(sc, cplx(4.0, 1.9)) == Family::NonUnivalent);
}

TEST_CASE("degenerate cusp: marked orbit converges to the cusp") {
    SliceConfig sc = cheb_slice();
    DiskParam dp = make_disk(sc, cplx(4.0));
    REQUIRE(cusp_type(sc, dp).nu == 5);
    // manual iteration: distance to the cusp decreases monotonically
    cplx z = sc.y_f;
    double prev = std::abs(z - sc.y_c);
    for (int blk = 0; blk < 6; ++blk) {
        for (int k = 0; k < 50; ++k) {
            SigmaResult sr = sigma(sc, dp, z);
            REQUIRE(sr.tag == SigmaResult::Tag::Value);
            z = sr.value;
        }
        double cur = std::abs(z - sc.y_c);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(prev < 0.5);
    // with a coarsened cusp radius the classifier reports the hit
    DiskParam dph = make_disk(sc, cplx(4.0));
    dph.eps_cusp = 0.25;
    OrbitClass oc = classify_orbit(sc, dph, sc.y_f, 1000);
    CHECK(oc.tag == OrbitClass::Tag::HitCusp);
    CHECK(oc.step > 100);
    // by contrast, at a generic cusp the marked orbit does not converge to it
    DiskParam dp3 = make_disk(sc, cplx(3.0));
    REQUIRE(cusp_type(sc, dp3).nu == 3);
    OrbitClass og = classify_orbit(sc, dp3, sc.y_f);
    CHECK(og.tag == OrbitClass::Tag::Bounded);
    CHECK(std::abs(og.point - sc.y_c) > 1.0);
}

TEST_CASE("critical_points_sigma: images, degrees, and the polar point") {
    SliceConfig sc = cheb_slice();
    DiskParam dp = make_disk(sc, cplx(2.0));
    auto cps = critical_points_sigma(sc, dp);
    REQUIRE(cps.size() == 2);
    // free critical point: eta(-1) = 5/3, f(5/3) = -10/27
    CHECK(std::abs(cps[0].point - cplx(-10.0 / 27.0)) < 1e-9);
    CHECK(cps[0].local_degree == 2);
    CHECK_FALSE(cps[0].at_pole);
    CHECK(std::abs(cps[1].point - sc.f(dp.a)) < 1e-12);
    CHECK(cps[1].local_degree == sc.d + 1);
    CHECK(cps[1].at_pole);
    // Riemann-Hurwitz: free branching sums to d - 1
    int branch = 0;
    for (const auto& cp : cps)
        if (!cp.at_pole) branch += cp.local_degree - 1;
    CHECK(branch == sc.d - 1);

    SliceConfig st = star_slice();
    DiskParam ds = make_disk(st, cplx(4.0));
    auto sps = critical_points_sigma(st, ds);
    REQUIRE(sps.size() == 2);
    // eta(0) = 15/4, f(15/4) = (15/4)^3 / 4 = 13.18359375
    CHECK(std::abs(sps[0].point - cplx(13.18359375)) < 1e-9);
    CHECK(sps[0].local_degree == 3);
    CHECK(sps[1].at_pole);
    CHECK(sps[1].local_degree == st.d + 1);
    int sbranch = 0;
    for (const auto& cp : sps)
        if (!cp.at_pole) sbranch += cp.local_degree - 1;
    CHECK(sbranch == st.d - 1);
}

TEST_CASE("double_points: Jordan inside the family, one crossing past it") {
    SliceConfig sc = cheb_slice();
    // interior parameter: simple boundary curve, and the independent
    // brute-force sampler agrees there is no collision
    DiskParam dp2 = make_disk(sc, cplx(2.0));
    CHECK(double_points(sc, dp2).empty());
    CHECK(brute_min_image_dist(sc, dp2, 0.5) > 1e-2 * dp2.diam);

    // past the double-point arc: exactly one transversal self-intersection
    DiskParam dp8 = make_disk(sc, cplx(8.0));
    auto hits = double_points(sc, dp8);
    REQUIRE(hits.size() == 1);
    const DoublePoint& h = hits[0];
    CHECK(h.refined);
    CHECK(h.contact == 1);
    // real symmetry: the pair is conjugate, t2 = 2pi - t1
    CHECK(h.t1 + h.t2 == doctest::Approx(kTau).epsilon(1e-9));
    CHECK(std::abs(h.point - cplx(-198.0)) < 1e-5 * dp8.diam);
    // the two parameters genuinely meet in the image
    cplx p1 = sc.f(dp8.a + std::polar(dp8.r, h.t1));
    cplx p2 = sc.f(dp8.a + std::polar(dp8.r, h.t2));
    CHECK(std::abs(p1 - p2) < 1e-8 * dp8.diam);
    // and the brute-force sampler sees the near-collision too
    CHECK(brute_min_image_dist(sc, dp8, 0.5) < 1e-3 * dp8.diam);

    SliceConfig st = star_slice();
    DiskParam ds6 = make_disk(st, cplx(6.0));
    auto shits = double_points(st, ds6);
    REQUIRE(shits.size() == 1);
    CHECK(shits[0].refined);
    CHECK(shits[0].contact == 1);
    CHECK(shits[0].t1 + shits[0].t2 == doctest::Approx(kTau).epsilon(1e-9));
}

TEST_CASE("boundary_distance: vanishes on the curve, positive inside") {
    SliceConfig sc = cheb_slice();
    DiskParam dp = make_disk(sc, cplx(2.0));
    CHECK(boundary_distance(sc, dp, dp.bnd[dp.bnd.size() / 3]) < 1e-8 * dp.diam);
    CHECK(boundary_distance(sc, dp, sc.y_c) < 1e-8 * dp.diam);
    // the nearest boundary point to y_f = 2 is the cusp at -2
    CHECK(boundary_distance(sc, dp, sc.y_f) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(boundary_distance(sc, dp, dp.center + cplx(2.0 * dp.diam, 0.0)) > dp.diam / 2);
}
