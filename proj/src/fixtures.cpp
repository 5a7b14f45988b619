#include "dessin/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "dessin/schwarz.hpp"

namespace dessin {

std::vector<cplx> vertex_positions(const ShabatData& sd) {
    std::vector<cplx> pts;
    pts.reserve(sd.blacks.size() + sd.whites.size());
    for (const auto& [z, m] : sd.blacks) pts.push_back(z);
    for (const auto& [z, m] : sd.whites) pts.push_back(z);
    std::sort(pts.begin(), pts.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return pts;
}

MarkedPoints select_marked(const ShabatData& sd, const PlaneTree& tree,
                           std::optional<cplx> hint) {
    std::vector<cplx> pos = vertex_positions(sd);
    if (static_cast<int>(pos.size()) != tree.n_vertices())
        throw std::runtime_error("select_marked: fiber and tree sizes differ");
    for (int i = 0; i < tree.n_vertices(); ++i)
        if (tree.verts[i].id != i)
            throw std::runtime_error(
                "select_marked: tree ids do not follow the extraction convention");

    struct Cand {
        int vb, vw, vwp;
    };
    std::vector<Cand> cands;
    for (const auto& v : tree.verts) {
        if (v.nbr.size() != 2) continue;
        int a = v.nbr[0], b = v.nbr[1];
        int va = tree.valence(a), vb = tree.valence(b);
        if (va == 1 && vb >= 2)
            cands.push_back({v.id, a, b});
        else if (vb == 1 && va >= 2)
            cands.push_back({v.id, b, a});
    }
    if (cands.empty())
        throw std::runtime_error(
            "select_marked: no valence-2 vertex flanked by a leaf and a branch vertex");

    const Cand* pick = nullptr;
    if (hint) {
        double best = 0.0;
        for (const auto& c : cands) {
            double d = std::abs(pos[c.vb] - *hint);
            if (!pick || d < best) {
                pick = &c;
                best = d;
            }
        }
    } else {
        // Ids ascend by (Re, Im), so the largest candidate id is the
        // deterministic "largest position" tie-break.
        for (const auto& c : cands)
            if (!pick || c.vb > pick->vb) pick = &c;
    }

    MarkedPoints mp;
    mp.v_b_id = pick->vb;
    mp.v_w_id = pick->vw;
    mp.v_wp_id = pick->vwp;
    mp.v_b = pos[pick->vb];
    mp.v_w = pos[pick->vw];
    mp.v_wp = pos[pick->vwp];
    return mp;
}

namespace {

struct FixtureSpec {
    std::string name;
    Poly f;
    cplx cv1{}, cv2{};         // exact critical values; cv1 carries v_b
    std::optional<cplx> hint;  // marked-point override for chiral candidates
};

FixtureSpec spec_for(const std::string& name) {
    if (name == "star3pendant") {
        // z^3 (4 - z): a 3-star with one pendant edge attached outside.
        return {name, Poly{{0.0, 0.0, 0.0, 4.0, -1.0}}, cplx(27.0), cplx(0.0),
                std::nullopt};
    }
    if (name == "chebyshev3") {
        // z^3 - 3z: the 3-edge chain.
        return {name, Poly{{0.0, -3.0, 0.0, 1.0}}, cplx(-2.0), cplx(2.0),
                std::nullopt};
    }
    if (name == "rootmatters_a") {
        // z^4 (z^2 - 1): critical values 0 and -4/27.
        return {name, Poly{{0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0}},
                cplx(-4.0 / 27.0), cplx(0.0), std::nullopt};
    }
    if (name == "rootmatters_b") {
        // z^4 (z^2 - 2z + 25/9): same valence data as rootmatters_a but a
        // different plane tree; critical values 0 and -50000/19683.  The two
        // candidate markings are complex conjugates, so an explicit hint
        // picks the upper one.
        return {name, Poly{{0.0, 0.0, 0.0, 0.0, 25.0 / 9.0, -2.0, 1.0}},
                cplx(-50000.0 / 19683.0), cplx(0.0), cplx(5.0 / 6.0, 1.0)};
    }
    if (name == "sameaug_plus" || name == "sameaug_minus") {
        // z^3 (z^2 - 2z + alpha)^2 with alpha the larger root of
        // 49 a^2 - 476 a + 400 = 0, the condition that the two free critical
        // points share one critical value.  (The smaller root also yields a
        // Shabat polynomial, but its tree is a chain with a single admissible
        // marking; this tree carries two, mirror images of each other, and
        // the fixture pair is exactly those two markings.)
        double al = (34.0 + 6.0 * std::sqrt(21.0)) / 7.0;
        Poly f{{0.0, 0.0, 0.0, al * al, -4.0 * al, 2.0 * al + 4.0, -4.0, 1.0}};
        // The shared critical value of the two simple critical points
        // (10 +- sqrt(100 - 84 alpha))/14; evaluating f there is second-order
        // accurate because f' vanishes.
        cplx zp(5.0 / 7.0, std::sqrt(308.0 + 72.0 * std::sqrt(21.0)) / 14.0);
        cplx yf(f(zp).real(), 0.0);
        cplx hint(1.0, name == "sameaug_plus" ? 2.0 : -2.0);
        return {name, f, cplx(0.0), yf, hint};
    }
    std::string known;
    for (const auto& n : fixture_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::runtime_error("unknown fixture '" + name + "' (have: " + known + ")");
}

std::vector<std::pair<cplx, int>> fiber(const Poly& f, cplx y) {
    Poly g = f;
    g.c[0] -= y;
    Roots r = roots(g);
    if (!r.converged || r.total() != f.degree())
        throw std::runtime_error("fixture fiber: root finding failed");
    std::vector<std::pair<cplx, int>> out;
    for (size_t i = 0; i < r.points.size(); ++i)
        out.emplace_back(r.points[i], r.mult[i]);
    return out;
}

// Double fiber points are simple roots of f' but ill-conditioned as roots of
// f - y; a few Newton steps on f' restore full precision.
void polish_double_sites(const Poly& df, const Poly& ddf,
                         std::vector<std::pair<cplx, int>>& fib) {
    for (auto& [z, m] : fib) {
        if (m != 2) continue;
        for (int it = 0; it < 4; ++it) {
            cplx d = ddf(z);
            if (std::abs(d) < 1e-300) break;
            z -= df(z) / d;
        }
    }
}

void fail(const std::string& name, const std::string& what) {
    throw std::runtime_error("fixture " + name + ": " + what);
}

void verify_fixture(const Fixture& fx) {
    if (!is_shabat(fx.f, 1e-9)) fail(fx.name, "not Shabat at cluster tol 1e-9");
    auto cvs = critical_values(fx.f, 1e-9);
    if (cvs.size() != 2) fail(fx.name, "critical value count != 2");
    double ys = std::max({1.0, std::abs(fx.y_c), std::abs(fx.y_f)});
    for (const auto& [y, m] : cvs)
        if (std::abs(y - fx.y_c) > 1e-7 * ys && std::abs(y - fx.y_f) > 1e-7 * ys)
            fail(fx.name, "computed critical value far from the declared pair");

    int d = fx.f.degree();
    int sb = 0, sw = 0;
    for (const auto& [z, m] : fx.sd.blacks) sb += m;
    for (const auto& [z, m] : fx.sd.whites) sw += m;
    if (sb != d || sw != d) fail(fx.name, "fiber degrees do not sum to deg f");
    if (fx.tree.n_edges() != d) fail(fx.name, "edge count != deg f");
    if (fx.tree.n_vertices() !=
        static_cast<int>(fx.sd.blacks.size() + fx.sd.whites.size()))
        fail(fx.name, "vertex count != fiber point count");
    auto bad = validate(fx.tree);
    if (!bad.empty()) fail(fx.name, "tree invalid: " + bad.front());
    if (!fx.tree.root || *fx.tree.root != fx.v_b_id)
        fail(fx.name, "tree not rooted at v_b");
    if (fx.tree.at(fx.v_b_id).color != Color::black)
        fail(fx.name, "v_b is not black");
    if (fx.tree.valence(fx.v_b_id) != 2) fail(fx.name, "v_b valence != 2");
    if (fx.tree.valence(fx.v_w_id) != 1) fail(fx.name, "v_w is not a leaf");
    if (fx.tree.valence(fx.v_wp_id) < 2) fail(fx.name, "v_w' is a leaf");

    if (std::abs(fx.f(fx.v_b) - fx.y_c) > 1e-8 * ys)
        fail(fx.name, "f(v_b) != y_c");
    if (std::abs(fx.f(fx.v_w) - fx.y_f) > 1e-8 * ys)
        fail(fx.name, "f(v_w) != y_f");
    if (std::abs(fx.f(fx.v_wp) - fx.y_f) > 1e-8 * ys)
        fail(fx.name, "f(v_w') != y_f");

    // make_slice revalidates the jet data (simple critical v_b, regular v_w,
    // critical v_w', distinct points, nonzero second jet).
    SliceConfig sc = make_slice(fx.f, fx.v_b, fx.v_w, fx.v_wp);
    if (std::abs(sc.y_c - fx.y_c) > 1e-7 * ys) fail(fx.name, "slice y_c drifted");
    if (std::abs(sc.y_f - fx.y_f) > 1e-7 * ys) fail(fx.name, "slice y_f drifted");
}

Fixture build_fixture(const std::string& name) {
    FixtureSpec sp = spec_for(name);
    Fixture fx;
    fx.name = sp.name;
    fx.f = sp.f;

    ShabatData sd;
    sd.f = sp.f;
    sd.y_black = sp.cv1;
    sd.y_white = sp.cv2;
    sd.blacks = fiber(sp.f, sp.cv1);
    sd.whites = fiber(sp.f, sp.cv2);
    Poly df = sp.f.derivative();
    Poly ddf = df.derivative();
    polish_double_sites(df, ddf, sd.blacks);
    polish_double_sites(df, ddf, sd.whites);

    PlaneTree t = extract_dessin(sd);
    MarkedPoints mp = select_marked(sd, t, sp.hint);
    if (t.at(mp.v_b_id).color == Color::white) {
        std::swap(sd.y_black, sd.y_white);
        std::swap(sd.blacks, sd.whites);
        for (auto& v : t.verts) v.color = other(v.color);
    }
    t.root = mp.v_b_id;

    fx.sd = std::move(sd);
    fx.tree = std::move(t);
    fx.v_b = mp.v_b;
    fx.v_w = mp.v_w;
    fx.v_wp = mp.v_wp;
    fx.v_b_id = mp.v_b_id;
    fx.v_w_id = mp.v_w_id;
    fx.v_wp_id = mp.v_wp_id;
    fx.y_c = fx.sd.y_black;
    fx.y_f = fx.sd.y_white;
    verify_fixture(fx);
    return fx;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names = {
        "star3pendant", "chebyshev3",   "rootmatters_a",
        "rootmatters_b", "sameaug_plus", "sameaug_minus"};
    return names;
}

const Fixture& get_fixture(const std::string& name) {
    static std::mutex mu;
    static std::map<std::string, Fixture> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, build_fixture(name)).first;
    return it->second;
}

}  // namespace dessin
