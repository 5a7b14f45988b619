#pragma once

#include <string>
#include <vector>

#include "dessin/poly.hpp"
#include "dessin/schwarz.hpp"

namespace dessin {

// The ideal regular (d+1)-gon in the unit disk with vertices at the
// (d+1)-st roots of unity, its side geodesics stored as circles orthogonal
// to the unit circle, and the derived symbolic boundary dynamics.  Side i
// (1-based) joins the vertices omega^{i-1} and omega^i.
struct AntiFareyConfig {
    int d = 2;
    int n = 3;  // d + 1
    cplx omega{};
    std::vector<cplx> vertex;    // omega^m, m = 0..d
    std::vector<cplx> center;    // center[i-1], |c|^2 = 1 + r^2
    std::vector<double> radius;  // radius[i-1]
};

AntiFareyConfig make_antifarey(int d);

// Reflection in side i: z -> c + r^2 / conj(z - c).  An involution of the
// disk fixing the side geodesic and preserving the unit circle.
cplx reflect_side(const AntiFareyConfig& af, int side, cplx z);

// Admissible finite symbol sequence over {1..d+1}: consecutive symbols
// differ.  If preperiod >= 0, the suffix starting there repeats forever
// (the wrap-around pair must then also differ).
struct SymbolSeq {
    std::vector<int> s;
    int preperiod = -1;

    bool operator==(const SymbolSeq&) const = default;
};

bool admissible(const AntiFareyConfig& af, const SymbolSeq& s);

// Quotient boundary angle in [0,1) of the tile chain of `s` (the chain
// rho_{i1} o ... o rho_{ik}(Pi) shrinks to a boundary point; its full-circle
// position t lifts the returned angle theta = (d+1) t mod 1).  Finite
// sequences give the chain's current tile position; periodic tails are
// followed until the tile diameter is below 1e-13 (or `depth` symbols, when
// depth > 0).  An eventually 2-periodic tail over two sides sharing a vertex
// is parabolic and lands exactly on a vertex image; that case is evaluated
// in closed form.  If `err` is given it receives a tile-diameter error bound.
double angle_from_symbols(const AntiFareyConfig& af, const SymbolSeq& s,
                          int depth = 0, double* err = nullptr);

// Symbol expansion of the boundary point at quotient angle theta: the
// itinerary of the reflection-group boundary orbit.  Points on a vertex get
// the alternating expansion through that vertex (the access starting with
// the smaller side index when unconstrained).
SymbolSeq symbols_from_angle(const AntiFareyConfig& af, double theta, int depth);

// Boundary action of the anti-Farey map on quotient angles: reflect the
// lifted point in side 1, rotate back into the fundamental sector, project.
// An expansive orientation-reversing degree-d circle covering fixing 0.
double rd_angle(const AntiFareyConfig& af, double theta);

// Absolute sheet word of the ray at quotient angle theta: the successive
// arc-differences of the boundary reflection itinerary.  Unlike the raw
// itinerary it is invariant under the quotient rotation, so it shifts
// exactly under rd_angle; its letters lie in 2..d+1.
SymbolSeq sheet_word(const AntiFareyConfig& af, double theta, int depth);

// The d preimages of theta under rd_angle, sorted increasingly.
std::vector<double> rd_preimages(const AntiFareyConfig& af, double theta);

// All angles of period exactly dividing `period` under rd_angle, found by
// following every inverse-branch itinerary (Newton-polished;
// near-parabolic roots are deduplicated at 1e-6).  Sorted increasingly.
std::vector<double> periodic_angles(const AntiFareyConfig& af, int period);

// Address of the rank-n tile containing an escaping point: for each of the
// n iterates before escape, the index (2..d+1) of the inverse branch of
// sigma whose image contains the point.  The branches are separated by the
// cut from the cusp value to the second branch value of f; letters are
// transported along cut-avoiding paths to the fiber over f(a), whose
// partition is calibrated so that labels agree with the sheet_word letters
// of boundary rays (the sheets flanking the cusp carry d+1 and 2, and
// labels increase clockwise around the ramified center).
struct TileAddress {
    SymbolSeq addr;
    bool ambiguous = false;  // some iterate sat within margin of a wall
    double margin = 0.0;     // min angular distance to a wall over the orbit
    std::string note;
};

TileAddress tile_address(const AntiFareyConfig& af, const SliceConfig& cfg,
                         const DiskParam& dp, cplx z, int n_escape);

// Dynamical ray at quotient angle theta: the polyline of centers of the
// nested tiles whose sheet words are the prefixes of sheet_word(theta).
// The first point is the ramified center f(a); the k-th is a tower of k-1
// sigma-preimages of it, each branch chosen by its sheet letter, so sigma
// maps point k of the ray at theta to point k-1 of the ray at rd(theta).
struct RayTrace {
    double theta = 0.0;
    std::vector<cplx> points;  // size depth on success
    bool ok = true;
    int fail_depth = -1;
    std::string error;
};

RayTrace trace_ray(const AntiFareyConfig& af, const SliceConfig& cfg,
                   const DiskParam& dp, double theta, int depth);

// All d sigma-preimages of a point, labeled bijectively by the inverse
// branches 2..d+1.  `point` is the preimage in the dynamical plane, `disk`
// its representative in the disk around a.  Empty on root-finding failure.
struct PreimageInfo {
    cplx point{};
    cplx disk{};
    int letter = 0;
    double margin = 0.0;
    bool ambiguous = false;
};

std::vector<PreimageInfo> sigma_preimages(const AntiFareyConfig& af,
                                          const SliceConfig& cfg,
                                          const DiskParam& dp, cplx z);

}  // namespace dessin
