#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dessin/poly.hpp"
#include "dessin/tree.hpp"

namespace dessin {

// A built-in example slice: an exact-coefficient Shabat polynomial together
// with its fiber data, the extracted plane tree, and the marked points.
// Colors are normalized so that v_b is black: y_black = y_c = f(v_b) and
// y_white = y_f = f(v_w).
struct Fixture {
    std::string name;
    Poly f;
    ShabatData sd;
    PlaneTree tree;  // extracted dessin, rooted at v_b's vertex id
    cplx v_b{}, v_w{}, v_wp{};
    cplx y_c{}, y_f{};
    int v_b_id = -1, v_w_id = -1, v_wp_id = -1;
};

// Positions of the tree vertices by id.  extract_dessin assigns ids by
// sorting all fiber points by (Re, Im); this reproduces that order.
std::vector<cplx> vertex_positions(const ShabatData& sd);

// Marked-point selection rule: a candidate v_b is a valence-2 vertex whose
// two neighbors are a leaf (that leaf becomes v_w) and a branch vertex of
// valence >= 2 (that becomes v_w').  When several candidates qualify, a
// finite hint picks the nearest one; without a hint the candidate largest
// by (Re, Im) wins.  Throws std::runtime_error when no candidate exists.
struct MarkedPoints {
    int v_b_id = -1, v_w_id = -1, v_wp_id = -1;
    cplx v_b{}, v_w{}, v_wp{};
};
MarkedPoints select_marked(const ShabatData& sd, const PlaneTree& tree,
                           std::optional<cplx> hint = std::nullopt);

const std::vector<std::string>& fixture_names();

// Loads (and caches) a built-in fixture.  The loader computes the critical
// values in closed form, extracts the dessin, applies the marked-point
// rule (with the per-fixture disambiguation hint where one is needed),
// recolors so that v_b is black, and self-tests the result.  Throws
// std::runtime_error for an unknown name or a failed self-test.
const Fixture& get_fixture(const std::string& name);

}  // namespace dessin
