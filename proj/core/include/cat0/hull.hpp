#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cat0/geometry.hpp"
#include "cat0/simplex.hpp"
#include "cat0/single_vertex.hpp"

namespace cat0 {

// The input complex with one extra ray inserted through each distinct
// non-origin direction of P, so that afterwards every point of P sits on a
// ray.  Directions within 1e-9 of a bounding ray reuse that ray instead of
// creating a sliver cone.  Splitting preserves every link cycle length, so
// the CAT(0) status is untouched.
struct AugmentedComplex {
  SingleVertexComplex cx;
  std::vector<int> ray_orig;   // per ray of cx: original ray index, -1 if inserted
  std::vector<int> cone_orig;  // per cone of cx: original cone it subdivides

  struct InsertedRay {
    int ray = -1;        // index in cx
    int orig_cone = -1;  // original cone it lands in
    double offset = 0.0; // angle from that cone's first ray
  };
  std::vector<InsertedRay> inserted;

  struct RayPoint {
    int ray = -1;        // index in cx
    double radius = 0.0;
    int source = -1;     // index into the input point list
  };
  std::vector<RayPoint> points;  // the non-origin points of P, re-expressed
  bool has_origin_point = false;
};

AugmentedComplex augment(const SingleVertexComplex& c, const std::vector<ConePoint>& pts);

// Distance from O to the point where the segment between x_e (on ray e) and
// x_f (on ray f) crosses the intermediate ray at angle gamma1 from e and
// gamma2 from f, after unfolding into the plane.  Errc::domain_error outside
// x_e, x_f > 0; gamma1, gamma2 > 0; gamma1 + gamma2 < pi.
double crossing_formula(double x_e, double x_f, double gamma1, double gamma2);

// The hull linear program over reciprocal variables y = 1/x.
//
// Variable layout: one block of |vars| columns for the plain formulation;
// when `paired`, columns [0, k) are the y^max block and [k, 2k) the y^min
// block, both indexed by `vars`.
struct HullLP {
  bool paired = false;    // origin-outside min/max formulation
  bool rational = false;  // cube path: coefficients exact, lp_exact present
  std::vector<int> vars;  // the support rays B', as ray indices of `lp_complex`

  // One record per generated upper-bound row, in the plain (unpaired) form
  //   y_ell <= coef_f * y_f + coef_e * y_e + rhs
  // with f/e = -1 for absent terms.  Point rows have both absent; pair rows
  // on the cube path fold fixed points into rhs/coef.  The paired builder
  // derives its mirrored >= rows from the same records, so this list is the
  // complete provenance either way.
  struct RowInfo {
    int ell = -1;
    int e = -1, f = -1;              // generating rays (when rays)
    double gamma1 = 0.0, gamma2 = 0.0;
    double coef_f = 0.0, coef_e = 0.0;
    double rhs = 0.0;
  };
  std::vector<RowInfo> rows;

  Lp<double> lp;
  std::optional<Lp<Rational>> lp_exact;  // cube path twin of `lp`
};

HullLP build_lp_origin_inside(const AugmentedComplex& ac, const std::vector<int>& support);
HullLP build_lp_origin_outside(const AugmentedComplex& ac, const std::vector<int>& support);

struct HullOptions {
  enum class Arith { floating, rational };
  Arith arith = Arith::floating;

  // Exact cone coordinates (h along the cone's first ray, v along the
  // second) per input point, for the cube path.  Missing entries fall back
  // to exact rationalization of the floating-point layout.
  std::vector<std::optional<std::pair<Rational, Rational>>> exact_uv;
};

// Cube path: every cone a right angle, no augmentation; rows pair the input
// points with the support-ray variables and carry exact rational data.
HullLP build_lp_cube(const SingleVertexComplex& c, const std::vector<ConePoint>& pts,
                     const std::vector<int>& support, bool origin_inside,
                     const HullOptions& opt);

struct HullResult {
  bool origin_in_hull = false;
  OriginHullWitness witness;

  AugmentedComplex aug;      // identity mappings on the cube path
  std::vector<int> support;  // B' (ray indices of aug.cx)

  struct Crossing {
    int ray = -1;      // ray index in aug.cx
    std::string id;    // ray id (original or synthesized)
    double x_min = 0.0, x_max = 0.0;  // hull cap [x_min, x_max]; x_min = 0 with the origin inside
  };
  std::vector<Crossing> crossings;

  struct Cell {
    int cone = -1;              // original cone index
    std::vector<Vec2> polygon;  // CCW, cone-local coordinates (first ray = +x)
  };
  std::vector<Cell> cells;  // cones the hull meets beyond the bare origin

  HullLP lp;  // as built; empty for short-circuited degenerate inputs
  long pivots = 0;
  std::optional<std::vector<Rational>> exact_x;  // x_max per crossing (cube path)
};

// End to end: origin test, support closure, augmentation, LP build + solve,
// inversion back to distances, and per-cell polygon assembly.  The rational
// mode demands a cube complex (every cone pi/2) and refuses otherwise.
// Errc::lp_infeasible / lp_unbounded signal internal inconsistencies.
HullResult solve_hull(const SingleVertexComplex& c, const std::vector<ConePoint>& pts,
                      const HullOptions& opt = {});

// Point-in-hull test against a computed result (boundary inclusive, 1e-9).
bool hull_contains(const SingleVertexComplex& c, const HullResult& h, const ConePoint& q);

// Convenience wrapper: solve, then test.
bool membership(const SingleVertexComplex& c, const std::vector<ConePoint>& pts,
                const ConePoint& q, const HullOptions& opt = {});

// Fixpoint closure oracle.  Maintains the interior points of P plus per-ray
// extreme radii; each round adds every geodesic/ray crossing over pairs of
// the maintained set (separately for the max and min sides, since crossings
// are monotone in the endpoint radii) and keeps the per-ray extremes.  Stops
// when no extreme moves by eps.  x_min is the min-side fixpoint: the lower
// hull boundary when the origin is outside; with the origin inside, the hull
// runs to O and callers should compare x_max only.
struct OracleResult {
  struct RayRange {
    int ray = -1;
    double x_min = 0.0, x_max = 0.0;
  };
  std::vector<RayRange> rays;  // rays the closure touched, ascending index
  int rounds = 0;
  bool converged = false;
};

OracleResult iterative_hull_oracle(const SingleVertexComplex& c,
                                   const std::vector<ConePoint>& pts, double eps,
                                   int max_rounds);

// Which points of P sit on the hull boundary (within 1e-9), boundary taken
// relative to the complex: a point is interior when the hull covers a whole
// neighbourhood of it in every incident cone.
std::vector<char> hull_boundary_points(const SingleVertexComplex& c, const HullResult& h,
                                       const std::vector<ConePoint>& pts);

// Layered peeling: repeatedly remove the points on the current hull
// boundary.  With `fraction` set, a layer is peeled only while the remaining
// share of points stays >= fraction; with `rounds`, at most that many layers
// come off.  Unset = peel everything.
struct PeelStop {
  std::optional<double> fraction;
  std::optional<int> rounds;
};

struct PeelResult {
  std::vector<std::vector<int>> layers;  // indices into P, outermost first
  std::vector<int> remaining;            // indices never removed
};

PeelResult peel(const SingleVertexComplex& c, const std::vector<ConePoint>& pts,
                const PeelStop& stop, const HullOptions& opt = {});

}  // namespace cat0
