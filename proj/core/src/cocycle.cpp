#include "treelab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "treelab/error.hpp"

namespace treelab {

bool BandSet::contains(double e) const noexcept {
    return std::any_of(intervals.begin(), intervals.end(), [e](const Interval& i) { return i.contains(e); });
}

const Interval* BandSet::enclosing(double lo, double hi) const noexcept {
    for (const auto& i : intervals) {
        if (i.lo <= lo && hi <= i.hi) return &i;
    }
    return nullptr;
}

MobiusMap step_map(double u, double energy, int branching) {
    return {0.0, 1.0, -static_cast<double>(branching), u - energy};
}

PeriodMap compose_period(std::span<const double> u, double energy, int branching, int start_phase) {
    const int tau = static_cast<int>(u.size());
    if (tau < 1) throw ArgumentError("compose_period: empty potential");
    if (start_phase < 1 || start_phase > tau) throw ArgumentError("compose_period: start_phase out of range");
    MobiusMap m;
    for (int s = 0; s < tau; ++s) {
        const int theta = (start_phase - 1 + s) % tau;
        m = m * step_map(u[static_cast<std::size_t>(theta)], energy, branching);
    }
    const double tr = m.trace();
    return {m, tr * tr - 4.0 * m.det()};
}

double discriminant_from_entries(const MobiusMap& m) noexcept {
    const double diff = m.a - m.d;
    return diff * diff + 4.0 * m.b * m.c;
}

FixedPoints fixed_points(const PeriodMap& pm, double degeneracy_tol) {
    const MobiusMap& m = pm.map;
    if (m.c == 0.0) {
        if (m.d == m.a) throw DegenerateMapError("fixed_points: c = 0 and d = a");
        const cplx g = m.b / (m.d - m.a);
        return {FixedPointKind::Degenerate, g, g};
    }
    const double rho = pm.discriminant;
    const double centre = (m.a - m.d) / (2.0 * m.c);
    if (std::abs(rho) < degeneracy_tol) {
        return {FixedPointKind::Degenerate, cplx(centre, 0.0), cplx(centre, 0.0)};
    }
    const double half_width = std::sqrt(std::abs(rho)) / (2.0 * std::abs(m.c));
    if (rho < 0) {
        return {FixedPointKind::ComplexPair, cplx(centre, half_width), cplx(centre, -half_width)};
    }
    return {FixedPointKind::RealPair, cplx(centre + half_width, 0.0), cplx(centre - half_width, 0.0)};
}

namespace {

using Predicate = std::function<bool(double)>;

// Boundary between in(lo) and !in(hi) (or the reverse) by bisection.
double bisect_boundary(const Predicate& in, double lo, double hi) {
    const bool in_lo = in(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (in(mid) == in_lo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

BandSet scan_bands(const Predicate& in, double e_min, double e_max, int grid) {
    if (grid < 100) throw ArgumentError("band scan: grid >= 100 required");
    if (!(e_min < e_max)) throw ArgumentError("band scan: E_min < E_max required");
    const double h = (e_max - e_min) / (grid - 1);
    auto grid_e = [&](int i) { return i == grid - 1 ? e_max : e_min + h * i; };

    BandSet bands;
    bool inside = in(e_min);
    double start = e_min;
    for (int i = 1; i < grid; ++i) {
        const double e = grid_e(i);
        const bool now = in(e);
        if (now == inside) continue;
        const double edge = bisect_boundary(in, grid_e(i - 1), e);
        if (now) {
            start = edge;
        } else {
            bands.intervals.push_back({start, edge});
        }
        inside = now;
    }
    if (inside) bands.intervals.push_back({start, e_max});

    // Touching bands share an endpoint in the closure.
    std::vector<Interval> merged;
    for (const auto& iv : bands.intervals) {
        if (!merged.empty() && iv.lo - merged.back().hi <= 1e-9) {
            merged.back().hi = iv.hi;
        } else {
            merged.push_back(iv);
        }
    }
    bands.intervals = std::move(merged);
    for (const auto& iv : bands.intervals) {
        if (iv.width() < 3.0 * h) {
            bands.grid_too_coarse = true;
            bands.warnings.push_back("GridTooCoarseWarning: band [" + std::to_string(iv.lo) + ", " +
                                     std::to_string(iv.hi) + "] spans fewer than 3 grid cells");
        }
    }
    return bands;
}

}  // namespace

BandSet ac_bands(std::span<const double> u, int branching, double e_min, double e_max, int grid) {
    if (u.empty()) throw ArgumentError("ac_bands: empty potential");
    auto negative = [&](double e) { return compose_period(u, e, branching, 1).discriminant < 0.0; };
    return scan_bands(negative, e_min, e_max, grid);
}

BandSet halfline_bands_oracle(std::span<const double> u, int branching, double e_min, double e_max, int grid) {
    if (u.empty()) throw ArgumentError("halfline_bands_oracle: empty potential");
    if (branching < 1) throw ArgumentError("halfline_bands_oracle: K >= 1 required");
    const double root_k = std::sqrt(static_cast<double>(branching));
    // psi_{n+1} = (E' - v_n) psi_n - psi_{n-1}, v_n = u_n / sqrt(K).
    auto in_band = [&](double e_prime) {
        double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
        for (double un : u) {
            const double t = e_prime - un / root_k;
            const double n00 = t * m00 - m10;
            const double n01 = t * m01 - m11;
            m10 = m00;
            m11 = m01;
            m00 = n00;
            m01 = n01;
        }
        const double tr = m00 + m11;
        return tr * tr - 4.0 < 0.0;
    };
    BandSet half = scan_bands(in_band, e_min / root_k, e_max / root_k, grid);
    for (auto& iv : half.intervals) {
        iv.lo = iv.lo == e_min / root_k ? e_min : iv.lo * root_k;
        iv.hi = iv.hi == e_max / root_k ? e_max : iv.hi * root_k;
    }
    return half;
}

cplx periodic_forward_resolvent(std::span<const double> u, int branching, cplx z, int phase) {
    const int tau = static_cast<int>(u.size());
    if (tau < 1) throw ArgumentError("periodic_forward_resolvent: empty potential");
    if (phase < 1 || phase > tau) throw ArgumentError("periodic_forward_resolvent: phase out of range");
    if (z.imag() < 0) throw ArgumentError("periodic_forward_resolvent: Im z >= 0 required");
    // Complex period matrix.
    cplx a = 1, b = 0, c = 0, d = 1;
    const double k = branching;
    for (int s = 0; s < tau; ++s) {
        const cplx diag = u[static_cast<std::size_t>((phase - 1 + s) % tau)] - z;
        // [a b; c d] * [0 1; -K diag]
        const cplx na = -k * b;
        const cplx nb = a + b * diag;
        const cplx nc = -k * d;
        const cplx nd = c + d * diag;
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    if (std::abs(c) == 0.0) {
        if (std::abs(d - a) == 0.0) throw DegenerateMapError("periodic_forward_resolvent: identity-like map");
        return b / (d - a);
    }
    // c G^2 + (d - a) G - b = 0
    const cplx p = d - a;
    const cplx disc = std::sqrt(p * p + 4.0 * b * c);
    const cplx plus = p + disc;
    const cplx minus = p - disc;
    const cplx q = -0.5 * (std::abs(plus) >= std::abs(minus) ? plus : minus);
    const cplx r1 = q / c;
    const cplx r2 = -b / q;
    const double scale = std::max({1.0, std::abs(r1), std::abs(r2)});
    if (std::abs(r1.imag()) > 1e-14 * scale || std::abs(r2.imag()) > 1e-14 * scale) {
        return r1.imag() >= r2.imag() ? r1 : r2;
    }
    // Real fixed points: the attracting one has the larger |c G + d|.
    return std::abs(c * r1 + d) >= std::abs(c * r2 + d) ? r1 : r2;
}

}  // namespace treelab
