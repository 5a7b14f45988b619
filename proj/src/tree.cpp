#include "dessin/tree.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dessin {

int PlaneTree::index_of(int id) const {
    auto it = std::lower_bound(verts.begin(), verts.end(), id,
                               [](const Vertex& v, int k) { return v.id < k; });
    if (it == verts.end() || it->id != id) return -1;
    return static_cast<int>(it - verts.begin());
}

const PlaneTree::Vertex& PlaneTree::at(int id) const {
    int i = index_of(id);
    if (i < 0) throw std::out_of_range("no vertex with id " + std::to_string(id));
    return verts[i];
}

PlaneTree::Vertex& PlaneTree::at(int id) {
    int i = index_of(id);
    if (i < 0) throw std::out_of_range("no vertex with id " + std::to_string(id));
    return verts[i];
}

int PlaneTree::n_edges() const {
    size_t half = 0;
    for (const auto& v : verts) half += v.nbr.size();
    return static_cast<int>(half / 2);
}

void PlaneTree::add_vertex(int id, Color c) {
    if (has(id)) throw std::invalid_argument("duplicate vertex id " + std::to_string(id));
    Vertex v;
    v.id = id;
    v.color = c;
    verts.insert(std::upper_bound(verts.begin(), verts.end(), id,
                                  [](int k, const Vertex& w) { return k < w.id; }),
                 std::move(v));
}

void PlaneTree::add_edge(int u, int v) {
    at(u).nbr.push_back(v);
    at(v).nbr.push_back(u);
}

int PlaneTree::max_id() const {
    return verts.empty() ? -1 : verts.back().id;
}

std::vector<std::string> validate(const PlaneTree& t) {
    std::vector<std::string> bad;
    if (t.verts.empty()) {
        bad.push_back("empty tree");
        return bad;
    }
    for (size_t i = 1; i < t.verts.size(); ++i)
        if (t.verts[i].id == t.verts[i - 1].id)
            bad.push_back("duplicate vertex id " + std::to_string(t.verts[i].id));

    for (const auto& v : t.verts) {
        std::set<int> seen;
        for (int u : v.nbr) {
            if (u == v.id) {
                bad.push_back("self loop at " + std::to_string(v.id));
                continue;
            }
            if (!t.has(u)) {
                bad.push_back("adjacency of " + std::to_string(v.id) +
                              " references missing vertex " + std::to_string(u));
                continue;
            }
            if (!seen.insert(u).second)
                bad.push_back("neighbor " + std::to_string(u) + " repeated at " +
                              std::to_string(v.id));
            const auto& w = t.at(u);
            if (std::count(w.nbr.begin(), w.nbr.end(), v.id) != 1)
                bad.push_back("edge (" + std::to_string(v.id) + "," + std::to_string(u) +
                              ") not mirrored");
            if (w.color == v.color)
                bad.push_back("monochromatic edge (" + std::to_string(v.id) + "," +
                              std::to_string(u) + ")");
        }
    }
    if (!bad.empty()) return bad;

    // Connectivity; acyclicity then follows from the edge count.
    std::set<int> reached;
    std::vector<int> stack{t.verts.front().id};
    reached.insert(stack.back());
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : t.at(v).nbr)
            if (reached.insert(u).second) stack.push_back(u);
    }
    if (static_cast<int>(reached.size()) != t.n_vertices()) bad.push_back("disconnected");
    if (t.n_edges() != t.n_vertices() - 1)
        bad.push_back("edge count " + std::to_string(t.n_edges()) + " != vertices-1");

    if (t.root) {
        if (!t.has(*t.root))
            bad.push_back("root " + std::to_string(*t.root) + " missing");
        else if (t.at(*t.root).color != Color::black)
            bad.push_back("root " + std::to_string(*t.root) + " is not black");
    }
    return bad;
}

PlaneTree opposite(const PlaneTree& t) {
    PlaneTree r = t;
    for (auto& v : r.verts) std::reverse(v.nbr.begin(), v.nbr.end());
    return r;
}

AugmentedTree augment(const PlaneTree& t, int root) {
    if (!t.has(root)) throw std::invalid_argument("augment: no such vertex");
    const auto& rv = t.at(root);
    if (rv.color != Color::black) throw std::invalid_argument("augment: root is not black");
    if (rv.nbr.size() != 1) throw std::invalid_argument("augment: root is not a leaf");

    AugmentedTree out;
    out.tree = opposite(t);
    out.v_b = root;
    out.v_wp = rv.nbr.front();
    out.v_w = out.tree.max_id() + 1;
    out.tree.add_vertex(out.v_w, Color::white);
    out.tree.add_edge(root, out.v_w);
    out.tree.root = root;
    return out;
}

namespace {

// Depth-first code of the subtree entered at `v` from `parent`; children are
// taken in the stored cyclic order starting after the parent edge.
void dfs_code(const PlaneTree& t, int v, int parent, std::string& out) {
    const auto& vx = t.at(v);
    out += (vx.color == Color::black ? 'b' : 'w');
    out += '(';
    size_t m = vx.nbr.size();
    size_t start = 0;
    if (parent >= 0) {
        for (size_t i = 0; i < m; ++i)
            if (vx.nbr[i] == parent) { start = i + 1; break; }
    }
    for (size_t k = 0; k < m; ++k) {
        int u = vx.nbr[(start + k) % m];
        if (u == parent) continue;
        dfs_code(t, u, v, out);
    }
    out += ')';
}

std::string rooted_code(const PlaneTree& t, int root) {
    const auto& rv = t.at(root);
    size_t m = rv.nbr.size();
    if (m == 0) return std::string(1, rv.color == Color::black ? 'b' : 'w') + "()";
    // No distinguished first edge at the root: minimize over rotations.
    std::string best;
    for (size_t s = 0; s < m; ++s) {
        std::string code;
        code += (rv.color == Color::black ? 'b' : 'w');
        code += '(';
        for (size_t k = 0; k < m; ++k) dfs_code(t, rv.nbr[(s + k) % m], root, code);
        code += ')';
        if (best.empty() || code < best) best = code;
    }
    return best;
}

std::vector<int> centroids(const PlaneTree& t) {
    int n = t.n_vertices();
    std::map<int, int> sub;   // subtree size when hanging below the DFS root
    std::map<int, int> heavy; // size of the largest component after removal
    int start = t.verts.front().id;
    std::function<void(int, int)> walk = [&](int v, int parent) {
        sub[v] = 1;
        int h = 0;
        for (int u : t.at(v).nbr) {
            if (u == parent) continue;
            walk(u, v);
            sub[v] += sub[u];
            h = std::max(h, sub[u]);
        }
        heavy[v] = std::max(h, n - sub[v]);
    };
    walk(start, -1);
    int best = n + 1;
    for (const auto& [v, h] : heavy) best = std::min(best, h);
    std::vector<int> out;
    for (const auto& [v, h] : heavy)
        if (h == best) out.push_back(v);
    return out;
}

std::string unrooted_code(const PlaneTree& t) {
    std::vector<int> roots = centroids(t);
    std::string best;
    for (int r : roots) {
        std::string c = rooted_code(t, r);
        if (best.empty() || c < best) best = c;
    }
    return best;
}

}  // namespace

std::string canonical_code(const PlaneTree& t, std::optional<int> forced_root) {
    if (forced_root) return rooted_code(t, *forced_root);
    if (t.root) return rooted_code(t, *t.root);
    return unrooted_code(t);
}

bool plane_iso(const PlaneTree& t1, const PlaneTree& t2, bool respect_root) {
    if (respect_root) {
        if (t1.root.has_value() != t2.root.has_value()) return false;
        if (t1.root)
            return rooted_code(t1, *t1.root) == rooted_code(t2, *t2.root);
    }
    return unrooted_code(t1) == unrooted_code(t2);
}

int AngledTreeDynamics::map_of(int v) const {
    auto it = vertex_map.find(v);
    if (it == vertex_map.end())
        throw std::out_of_range("vertex_map missing " + std::to_string(v));
    return it->second;
}

int AngledTreeDynamics::degree_of(int v) const {
    auto it = local_degree.find(v);
    return it == local_degree.end() ? 1 : it->second;
}

int AngledTreeDynamics::iterate(int v, int n) const {
    for (int i = 0; i < n; ++i) v = map_of(v);
    return v;
}

std::vector<std::string> validate(const AngledTreeDynamics& atd) {
    std::vector<std::string> bad = validate(atd.tree);
    for (const auto& v : atd.tree.verts) {
        auto it = atd.vertex_map.find(v.id);
        if (it == atd.vertex_map.end()) {
            bad.push_back("vertex_map missing " + std::to_string(v.id));
            continue;
        }
        if (!atd.tree.has(it->second))
            bad.push_back("vertex_map image of " + std::to_string(v.id) + " missing");
    }
    if (!bad.empty()) return bad;

    for (const auto& [v, d] : atd.local_degree)
        if (d < 1) bad.push_back("local degree < 1 at " + std::to_string(v));

    // An edge must map to a nondegenerate edge-path.
    for (const auto& v : atd.tree.verts)
        for (int u : v.nbr)
            if (atd.map_of(u) == atd.map_of(v.id))
                bad.push_back("edge (" + std::to_string(v.id) + "," + std::to_string(u) +
                              ") collapses");

    // Orientation reversal, tested on the neighbors whose image paths start
    // with a genuine edge at the image vertex (length-one representability).
    for (const auto& v : atd.tree.verts) {
        int fv = atd.map_of(v.id);
        std::vector<int> dirs;
        for (int u : v.nbr) {
            int fu = atd.map_of(u);
            const auto& fvx = atd.tree.at(fv);
            auto pos = std::find(fvx.nbr.begin(), fvx.nbr.end(), fu);
            if (pos != fvx.nbr.end())
                dirs.push_back(static_cast<int>(pos - fvx.nbr.begin()));
        }
        if (dirs.size() < 3) continue;
        // dirs must be circularly decreasing (one ascent allowed at the wrap).
        int ascents = 0;
        for (size_t i = 0; i < dirs.size(); ++i)
            if (dirs[i] < dirs[(i + 1) % dirs.size()]) ++ascents;
        if (ascents > 1)
            bad.push_back("cyclic order not reversed at " + std::to_string(v.id));
    }
    return bad;
}

namespace {

std::set<std::pair<int, int>> edge_set(const PlaneTree& t) {
    std::set<std::pair<int, int>> es;
    for (const auto& v : t.verts)
        for (int u : v.nbr)
            es.insert({std::min(v.id, u), std::max(v.id, u)});
    return es;
}

}  // namespace

bool expansion_check(const AngledTreeDynamics& atd) {
    const PlaneTree& t = atd.tree;
    int n = t.n_vertices();

    // Fatou vertices: those whose orbit enters a cycle through a critical
    // vertex.  Find each vertex's eventual cycle by brute iteration.
    std::set<int> fatou;
    for (const auto& v : t.verts) {
        int x = v.id;
        for (int i = 0; i < n; ++i) x = atd.map_of(x);  // now inside the cycle
        int y = x;
        bool crit = false;
        do {
            if (atd.degree_of(y) >= 2) crit = true;
            y = atd.map_of(y);
        } while (y != x);
        if (crit) fatou.insert(v.id);
    }

    auto es = edge_set(t);
    long bound = static_cast<long>(n) * n;
    for (const auto& v : t.verts) {
        for (int u : v.nbr) {
            if (u < v.id) continue;
            if (fatou.count(u) || fatou.count(v.id)) continue;
            int a = v.id, b = u;
            bool separated = false;
            for (long i = 0; i < bound; ++i) {
                a = atd.map_of(a);
                b = atd.map_of(b);
                if (a == b) break;  // collapsed pair can never separate
                if (!es.count({std::min(a, b), std::max(a, b)})) {
                    separated = true;
                    break;
                }
            }
            if (!separated) return false;
        }
    }
    return true;
}

namespace {

// Order of first visits to members of `marks` along the counterclockwise
// boundary walk of the plane tree, starting by leaving `start`.
std::vector<int> boundary_first_visits(const PlaneTree& t, int start,
                                       const std::set<int>& marks) {
    std::vector<int> order;
    std::set<int> seen;
    if (marks.count(start)) {
        order.push_back(start);
        seen.insert(start);
    }
    if (t.at(start).nbr.empty()) return order;
    int prev = start;
    int cur = t.at(start).nbr.front();
    long steps = 0, cap = 4L * t.n_edges() + 4;
    while (steps++ < cap) {
        if (marks.count(cur) && !seen.count(cur)) {
            order.push_back(cur);
            seen.insert(cur);
        }
        const auto& cx = t.at(cur);
        auto pos = std::find(cx.nbr.begin(), cx.nbr.end(), prev);
        size_t i = static_cast<size_t>(pos - cx.nbr.begin());
        // Next edge clockwise from the arrival edge walks the outer boundary
        // counterclockwise.
        size_t j = (i + cx.nbr.size() - 1) % cx.nbr.size();
        prev = cur;
        cur = cx.nbr[j];
        if (prev == start && cur == t.at(start).nbr.front()) break;
        if (static_cast<int>(seen.size()) == static_cast<int>(marks.size())) break;
    }
    return order;
}

// Whether the map of g is definitely orientation-preserving (false),
// definitely reversing (true), or combinatorially undetectable (nullopt).
std::optional<bool> orientation_of(const AngledTreeDynamics& g) {
    bool any = false;
    for (const auto& v : g.tree.verts) {
        int fv = g.map_of(v.id);
        std::vector<int> dirs;
        for (int u : v.nbr) {
            const auto& fvx = g.tree.at(fv);
            auto pos = std::find(fvx.nbr.begin(), fvx.nbr.end(), g.map_of(u));
            if (pos != fvx.nbr.end())
                dirs.push_back(static_cast<int>(pos - fvx.nbr.begin()));
        }
        if (dirs.size() < 3) continue;
        any = true;
        int ascents = 0, descents = 0;
        for (size_t i = 0; i < dirs.size(); ++i) {
            int a = dirs[i], b = dirs[(i + 1) % dirs.size()];
            if (a < b) ++ascents;
            if (a > b) ++descents;
        }
        if (ascents <= 1 && descents > 1) return true;   // reversed order
        if (descents <= 1 && ascents > 1) return false;  // preserved order
    }
    (void)any;
    return std::nullopt;
}

}  // namespace

AngledTreeDynamics tune(const AngledTreeDynamics& h, int w,
                        const AngledTreeDynamics& g) {
    if (!h.tree.has(w)) throw std::invalid_argument("tune: no such vertex");
    int k = h.degree_of(w);
    if (k < 2) throw std::invalid_argument("tune: vertex is not critical");

    // Cycle of w.
    std::vector<int> cycle{w};
    for (int x = h.map_of(w); x != w; x = h.map_of(x)) {
        cycle.push_back(x);
        if (static_cast<int>(cycle.size()) > h.tree.n_vertices())
            throw std::invalid_argument("tune: vertex is not periodic");
    }
    int n = static_cast<int>(cycle.size());

    // Degree of g.
    int gdeg = 1;
    for (const auto& [v, d] : g.local_degree) gdeg = std::max(gdeg, d);
    if (gdeg != k) throw std::invalid_argument("tune: degree of g != local degree at w");

    // Trivial tuning by the one-vertex Hubbard tree changes nothing.
    if (g.tree.n_vertices() == 1) return h;

    // The components of the complement of w land on distinct accesses to the
    // beta fixed point, so there can be at most deg(g) of them.
    if (static_cast<int>(h.tree.at(w).nbr.size()) > k)
        throw std::invalid_argument("tune: valence of w exceeds local degree");

    // Orientation parity: the n-th return to the blown-up copy acts as g, so
    // g must reverse orientation iff n is odd.
    if (auto rev = orientation_of(g); rev.has_value() && *rev != (n % 2 == 1))
        throw std::invalid_argument("tune: parity mismatch");

    // Beta: a non-critical fixed endpoint of g; its preimages receive the
    // components of the complement of w.
    int beta = -1;
    for (const auto& v : g.tree.verts)
        if (v.nbr.size() <= 1 && g.map_of(v.id) == v.id && g.degree_of(v.id) == 1) {
            beta = v.id;
            break;
        }
    if (beta < 0) throw std::invalid_argument("tune: g has no beta fixed endpoint");
    std::set<int> betapre;
    for (const auto& v : g.tree.verts)
        if (g.map_of(v.id) == beta) betapre.insert(v.id);
    if (static_cast<int>(betapre.size()) != k)
        throw std::invalid_argument("tune: g must contain all beta preimages");
    std::vector<int> prewalk = boundary_first_visits(g.tree, beta, betapre);
    if (static_cast<int>(prewalk.size()) != k || prewalk.front() != beta)
        throw std::invalid_argument("tune: beta preimage walk failed");

    std::set<int> cycset(cycle.begin(), cycle.end());
    for (int c : cycle)
        for (int u : h.tree.at(c).nbr)
            if (cycset.count(u))
                throw std::invalid_argument("tune: adjacent cycle vertices unsupported");

    // Component label at w = the neighbor of w leading into it.
    auto component_of = [&](int start) {
        std::set<int> comp{start};
        std::vector<int> stack{start};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int u : h.tree.at(v).nbr)
                if (u != w && comp.insert(u).second) stack.push_back(u);
        }
        return comp;
    };
    std::vector<int> wn = h.tree.at(w).nbr;  // CCW components at w
    int dcomp = static_cast<int>(wn.size());
    std::vector<std::set<int>> comps;
    comps.reserve(wn.size());
    for (int u : wn) comps.push_back(component_of(u));

    // Root-bearing component first.
    int root = h.tree.root.value_or(h.tree.verts.front().id);
    size_t root_slot = 0;
    for (size_t i = 0; i < comps.size(); ++i)
        if (comps[i].count(root)) { root_slot = i; break; }

    // Attachment of the neighbors of w: CCW from the root-bearing edge, onto
    // the first beta preimages in boundary-walk order.
    std::map<int, int> attach0;  // neighbor of w -> g vertex
    for (int i = 0; i < dcomp; ++i)
        attach0[wn[(root_slot + i) % dcomp]] = prewalk[i];

    // Ids for the copies of g along the cycle.
    int base = std::max(h.tree.max_id(), 0) + 1;
    int gspan = g.tree.max_id() + 1;
    auto cid = [&](int j, int gv) { return base + j * gspan + gv; };

    // Bipartite parity of g relative to beta, for coloring the copies.
    std::map<int, int> gdist;
    {
        std::vector<int> stack{beta};
        gdist[beta] = 0;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int u : g.tree.at(v).nbr)
                if (!gdist.count(u)) {
                    gdist[u] = gdist[v] + 1;
                    stack.push_back(u);
                }
        }
    }

    AngledTreeDynamics out;
    out.tree.root = h.tree.root;
    // Surviving original vertices.
    for (const auto& v : h.tree.verts) {
        if (cycset.count(v.id)) continue;
        out.tree.add_vertex(v.id, v.color);
    }
    // Copies of g.  The attachment points are beta preimages, which sit at
    // even distance from beta, so coloring by beta-parity keeps the glued
    // tree bipartite whenever that is possible at all.
    for (int j = 0; j < n; ++j) {
        Color wj_color = h.tree.at(cycle[j]).color;
        for (const auto& v : g.tree.verts) {
            Color c = (gdist.at(v.id) % 2 == 0) ? wj_color : other(wj_color);
            out.tree.add_vertex(cid(j, v.id), c);
        }
    }
    // Copies are mirrored on alternating steps so that every step of the new
    // map reverses cyclic orders.
    std::vector<bool> mirrored(n, false);
    for (int j = 1; j < n; ++j) mirrored[j] = (n % 2 == 1) ? (j % 2 == 0) : (j % 2 == 1);
    for (int j = 0; j < n; ++j)
        for (const auto& v : g.tree.verts) {
            auto nb = v.nbr;
            if (mirrored[j]) std::reverse(nb.begin(), nb.end());
            auto& ov = out.tree.at(cid(j, v.id));
            for (int u : nb) ov.nbr.push_back(cid(j, u));
        }

    // Attachment vertex for each (cycle vertex, neighbor) pair: at copy j a
    // component is pulled back through the identity steps from its forward
    // image under h^(n-j), which lies in a component at w itself.
    std::map<std::pair<int, int>, int> attach;  // (neighbor, cycle vertex) -> new id
    for (int j = 0; j < n; ++j) {
        int wj = cycle[j];
        for (int u : h.tree.at(wj).nbr) {
            int gv = -1;
            if (j == 0) {
                gv = attach0.at(u);
            } else {
                int y = u;
                for (int s = 0; s < n - j; ++s) y = h.map_of(y);
                if (cycset.count(y))
                    throw std::invalid_argument("tune: component folds onto the cycle");
                for (size_t i = 0; i < comps.size(); ++i)
                    if (comps[i].count(y)) { gv = attach0.at(wn[i]); break; }
                if (gv < 0) throw std::invalid_argument("tune: lost component image");
            }
            attach[{u, wj}] = cid(j, gv);
            out.tree.at(cid(j, gv)).nbr.push_back(u);
        }
    }
    // Adjacency of the surviving vertices: the original cyclic order with
    // every blown-up cycle vertex replaced by its attachment point.
    for (const auto& v : h.tree.verts) {
        if (cycset.count(v.id)) continue;
        auto& ov = out.tree.at(v.id);
        for (int u : v.nbr)
            ov.nbr.push_back(cycset.count(u) ? attach.at({v.id, u}) : u);
    }

    // The map.
    for (const auto& v : h.tree.verts) {
        if (cycset.count(v.id)) continue;
        int fv = h.map_of(v.id);
        if (cycset.count(fv)) {
            // Preimages of a blown-up cycle vertex are sent to the beta
            // anchor of its copy: their arcs approach the copy through the
            // access of the root-side component.
            int j = static_cast<int>(std::find(cycle.begin(), cycle.end(), fv) - cycle.begin());
            out.vertex_map[v.id] = cid(j, beta);
        } else {
            out.vertex_map[v.id] = fv;
        }
        if (h.degree_of(v.id) > 1) out.local_degree[v.id] = h.degree_of(v.id);
    }
    for (const auto& v : g.tree.verts) {
        out.vertex_map[cid(0, v.id)] = cid(1 % n, g.map_of(v.id));
        if (g.degree_of(v.id) > 1) out.local_degree[cid(0, v.id)] = g.degree_of(v.id);
        for (int j = 1; j < n; ++j)
            out.vertex_map[cid(j, v.id)] = cid((j + 1) % n, v.id);
    }
    return out;
}

void write_tree(std::ostream& os, const PlaneTree& t) {
    for (const auto& v : t.verts)
        os << "v " << v.id << ' ' << (v.color == Color::black ? 'b' : 'w') << '\n';
    for (const auto& v : t.verts) {
        if (v.nbr.empty()) continue;
        os << "adj " << v.id;
        for (int u : v.nbr) os << ' ' << u;
        os << '\n';
    }
    if (t.root) os << "root " << *t.root << '\n';
}

std::string write_tree(const PlaneTree& t) {
    std::ostringstream os;
    write_tree(os, t);
    return os.str();
}

PlaneTree read_tree(std::istream& is) {
    PlaneTree t;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;  // blank line
        if (kw == "v") {
            int id;
            std::string c;
            if (!(ls >> id >> c) || (c != "b" && c != "w"))
                throw std::runtime_error("tree format: bad v line " + std::to_string(lineno));
            t.add_vertex(id, c == "b" ? Color::black : Color::white);
        } else if (kw == "adj") {
            int id;
            if (!(ls >> id) || !t.has(id))
                throw std::runtime_error("tree format: bad adj line " + std::to_string(lineno));
            auto& v = t.at(id);
            if (!v.nbr.empty())
                throw std::runtime_error("tree format: repeated adj line " + std::to_string(lineno));
            int u;
            while (ls >> u) v.nbr.push_back(u);
        } else if (kw == "root") {
            int id;
            if (!(ls >> id))
                throw std::runtime_error("tree format: bad root line " + std::to_string(lineno));
            t.root = id;
        } else {
            throw std::runtime_error("tree format: unknown keyword '" + kw + "' at line " +
                                     std::to_string(lineno));
        }
    }
    return t;
}

PlaneTree read_tree_string(const std::string& s) {
    std::istringstream is(s);
    return read_tree(is);
}

PlaneTree read_tree_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_tree(is);
}

}  // namespace dessin
