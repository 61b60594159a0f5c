#pragma once

#include <span>
#include <string>
#include <vector>

#include "treelab/model.hpp"

namespace treelab {

// Real Moebius map G -> (a G + b) / (c G + d).
struct MobiusMap {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 1.0;

    double det() const noexcept { return a * d - b * c; }
    double trace() const noexcept { return a + d; }
    cplx apply(cplx g) const noexcept { return (a * g + b) / (c * g + d); }

    // Composition: (f * g)(G) = f(g(G)), i.e. the matrix product.
    friend MobiusMap operator*(const MobiusMap& f, const MobiusMap& g) noexcept {
        return {f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d, f.c * g.a + f.d * g.c, f.c * g.b + f.d * g.d};
    }
};

// Composed period map and its discriminant rho = tr^2 - 4 det.
struct PeriodMap {
    MobiusMap map;
    double discriminant = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double e) const noexcept { return lo <= e && e <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Closed, ordered, pairwise disjoint intervals.
struct BandSet {
    std::vector<Interval> intervals;
    // GridTooCoarseWarning: some band spans fewer than 3 grid cells.
    bool grid_too_coarse = false;
    std::vector<std::string> warnings;

    bool empty() const noexcept { return intervals.empty(); }
    bool contains(double e) const noexcept;
    // The band containing [lo, hi] entirely, if any.
    const Interval* enclosing(double lo, double hi) const noexcept;
};

// G -> 1/(u - E - K G) as the matrix (0, 1, -K, u - E); determinant K.
MobiusMap step_map(double u, double energy, int branching);

// S(E, theta) = T(E, theta) o T(E, S theta) o ... o T(E, S^{tau-1} theta):
// the leftmost factor is the step at start_phase.
PeriodMap compose_period(std::span<const double> u, double energy, int branching, int start_phase);

// Same discriminant written through the entries: (a - d)^2 + 4 b c.
double discriminant_from_entries(const MobiusMap& m) noexcept;

enum class FixedPointKind {
    ComplexPair,  // rho < 0: designated is the root with Im > 0
    RealPair,     // rho > 0
    Degenerate,   // |rho| < tol (double root) or c = 0 (affine fixed point)
};

struct FixedPoints {
    FixedPointKind kind;
    cplx designated;
    cplx other;
};

// Roots of c G^2 + (d - a) G - b = 0. DegenerateMapError if c = 0 and d = a.
FixedPoints fixed_points(const PeriodMap& pm, double degeneracy_tol = 1e-12);

// Closure of {E : rho(E) < 0} within [e_min, e_max]: grid scan, bisection of
// each sign change to 1e-10 or better, merge at shared endpoints.
// Requires grid >= 100 and e_min < e_max (ArgumentError).
BandSet ac_bands(std::span<const double> u, int branching, double e_min, double e_max, int grid);

// Independent route: bands |tr M(E')| <= 2 of the half-line operator with
// potential u / sqrt(K), mapped through E = sqrt(K) E'.
BandSet halfline_bands_oracle(std::span<const double> u, int branching, double e_min, double e_max, int grid);

// Gamma_0(0, z, phase) for the periodic background: the fixed point of the
// complex period map lying in the closed upper half-plane (for real z outside
// the bands, the attracting real fixed point).
cplx periodic_forward_resolvent(std::span<const double> u, int branching, cplx z, int phase);

}  // namespace treelab
