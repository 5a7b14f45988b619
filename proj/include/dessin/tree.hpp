#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dessin {

enum class Color : unsigned char { black, white };

constexpr Color other(Color c) {
    return c == Color::black ? Color::white : Color::black;
}

// Bicolored plane tree: a tree whose edges join black to white vertices and
// whose embedding in the plane is recorded by the counterclockwise cyclic
// order of the neighbors at every vertex.  Optionally rooted at a black
// vertex.  Vertex ids are arbitrary ints; `verts` is kept sorted by id.
struct PlaneTree {
    struct Vertex {
        int id = -1;
        Color color = Color::black;
        std::vector<int> nbr;  // neighbor ids, counterclockwise cyclic order
        bool operator==(const Vertex&) const = default;
    };

    std::vector<Vertex> verts;
    std::optional<int> root;

    bool operator==(const PlaneTree&) const = default;

    bool has(int id) const { return index_of(id) >= 0; }
    int index_of(int id) const;        // -1 if absent
    const Vertex& at(int id) const;    // throws std::out_of_range
    Vertex& at(int id);
    int n_vertices() const { return static_cast<int>(verts.size()); }
    int n_edges() const;
    int valence(int id) const { return static_cast<int>(at(id).nbr.size()); }

    void add_vertex(int id, Color c);             // throws on duplicate id
    void add_edge(int u, int v);                  // appends to both cyclic orders
    int max_id() const;
};

// Empty list iff `t` is a connected, acyclic, properly bicolored plane tree
// whose adjacency lists are mutually consistent and whose root (if any) is a
// black vertex.  Violations are returned as human-readable strings.
std::vector<std::string> validate(const PlaneTree& t);

// Same tree with every cyclic order reversed (the mirror embedding).
PlaneTree opposite(const PlaneTree& t);

// Result of augmenting a rooted tree: the augmented tree (rooted at v_b)
// together with the three marked vertices.  v_b is the old root (black,
// valence 2 after augmentation), v_w the new white leaf, v_wp the old white
// neighbor of the root.
struct AugmentedTree {
    PlaneTree tree;
    int v_b = -1;
    int v_w = -1;
    int v_wp = -1;
};

// Take the opposite of `t` and attach one new white leaf at `root`, which
// must be a black valence-1 vertex of `t`.  The returned tree is rooted at
// v_b = root.
AugmentedTree augment(const PlaneTree& t, int root);

// Canonical encoding of the plane tree.  If `forced_root` is given the code
// is for the tree rooted there; otherwise, if the tree has a root that is
// used; otherwise the code is canonicalized over centroid roots.  Two trees
// are plane-isomorphic (respecting roots where applicable) iff their codes
// are equal.  The code is invariant under relabeling of vertex ids.
std::string canonical_code(const PlaneTree& t,
                           std::optional<int> forced_root = std::nullopt);

// Color-, cyclic-order-, and (optionally) root-preserving isomorphism test.
// With respect_root, two rootless trees compare unrooted, and a rooted tree
// never matches a rootless one.
bool plane_iso(const PlaneTree& t1, const PlaneTree& t2, bool respect_root);

// Orientation-reversing angled tree dynamics: a self-map of the vertex set
// together with local degrees.  A vertex is critical iff its local degree is
// at least 2.
struct AngledTreeDynamics {
    PlaneTree tree;
    std::map<int, int> vertex_map;
    std::map<int, int> local_degree;

    int map_of(int v) const;
    int degree_of(int v) const;   // defaults to 1 when absent
    int iterate(int v, int n) const;
};

// Checks the map is defined on every vertex, maps into the vertex set, and
// reverses every cyclic order (images of consecutive edges at v appear in
// reversed circular order around the image vertex, measured on first edges
// of the image paths where representable).  Returns violations.
std::vector<std::string> validate(const AngledTreeDynamics& atd);

// A vertex is a Fatou vertex iff it eventually maps into a periodic cycle
// containing a critical vertex; all others are Julia vertices.  The map is
// expanding iff every pair of adjacent Julia vertices becomes non-adjacent
// under some iterate (bounded by the square of the vertex count).
bool expansion_check(const AngledTreeDynamics& atd);

// Blow up the periodic critical vertex `w` of `h` into the unicritical
// Hubbard tree `g`: delete w, attach the root-bearing component of the
// complement at g's beta fixed point, the remaining components at the other
// beta-preimages preserving circular order, and copy the gluing along the
// cycle of w.  Preconditions: w periodic and critical with valence equal to
// its local degree and to g's degree; the orientation parity of g matches
// the parity of the cycle length.
AngledTreeDynamics tune(const AngledTreeDynamics& h, int w,
                        const AngledTreeDynamics& g);

// Line-oriented text format:
//   v <id> <b|w>
//   adj <id> <id1> <id2> ...     (counterclockwise)
//   root <id>
// The writer emits `v` lines in id order, then `adj` lines in id order (only
// for vertices with neighbors), then the root line if present, so that
// read/write round-trips are bit-exact on canonical input.
void write_tree(std::ostream& os, const PlaneTree& t);
std::string write_tree(const PlaneTree& t);
PlaneTree read_tree(std::istream& is);           // throws on malformed input
PlaneTree read_tree_string(const std::string& s);
PlaneTree read_tree_file(const std::string& path);

}  // namespace dessin
