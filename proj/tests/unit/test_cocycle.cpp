#include <cmath>
#include <vector>

#include "doctest.h"
#include "treelab/cocycle.hpp"
#include "treelab/error.hpp"
#include "treelab/resolvent.hpp"
#include "treelab/rng.hpp"

using namespace treelab;

namespace {

const cplx I{0.0, 1.0};

std::vector<double> rotate(const std::vector<double>& u, int shift) {
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[(i + static_cast<std::size_t>(shift)) % u.size()];
    return r;
}

void check_same_bands(const BandSet& a, const BandSet& b, double tol) {
    REQUIRE(a.intervals.size() == b.intervals.size());
    for (std::size_t i = 0; i < a.intervals.size(); ++i) {
        CHECK(std::abs(a.intervals[i].lo - b.intervals[i].lo) < tol);
        CHECK(std::abs(a.intervals[i].hi - b.intervals[i].hi) < tol);
    }
}

}  // namespace

TEST_SUITE("cocycle") {

TEST_CASE("step map") {
    const MobiusMap m = step_map(0.0, 0.0, 2);
    CHECK(m.a == 0.0);
    CHECK(m.b == 1.0);
    CHECK(m.c == -2.0);
    CHECK(m.d == 0.0);
    CHECK(std::abs(m.apply(I) - I / 2.0) < 1e-15);
    for (double u : {-1.0, 0.3, 4.0})
        for (int k : {2, 3, 7}) CHECK(step_map(u, 0.25, k).det() == k);
}

TEST_CASE("single-period discriminant") {
    const std::vector<double> u{0.0};
    for (double e : {-3.0, -1.0, 0.0, 0.5, 2.9}) {
        const PeriodMap pm = compose_period(u, e, 2, 1);
        CHECK(pm.map.trace() == doctest::Approx(-e));
        CHECK(pm.map.det() == doctest::Approx(2.0));
        CHECK(pm.discriminant == doctest::Approx(e * e - 8.0));
        CHECK(discriminant_from_entries(pm.map) == doctest::Approx(pm.discriminant));
    }
    CHECK(compose_period(u, 0.0, 2, 1).discriminant == -8.0);
    CHECK_THROWS_AS(compose_period(u, 0.0, 2, 2), ArgumentError);
}

TEST_CASE("the composed map is the iterated recursion") {
    const std::vector<double> u{1.0, 0.0, -1.0};
    const cplx g{0.1, 0.4};
    const double e = 0.7;
    // Start phase 1: Gamma(1) = T_1(Gamma(2)), Gamma(2) = T_2(Gamma(3)), ...
    const cplx by_hand = 1.0 / (u[0] - e - 2.0 * (1.0 / (u[1] - e - 2.0 * (1.0 / (u[2] - e - 2.0 * g)))));
    CHECK(std::abs(compose_period(u, e, 2, 1).map.apply(g) - by_hand) < 1e-14);
}

TEST_CASE("discriminant does not depend on the starting phase") {
    const std::vector<double> u{1.0, 0.0, -1.0};
    const double rho = compose_period(u, 0.7, 2, 1).discriminant;
    CHECK(compose_period(u, 0.7, 2, 2).discriminant == doctest::Approx(rho).epsilon(1e-12));
    CHECK(compose_period(u, 0.7, 2, 3).discriminant == doctest::Approx(rho).epsilon(1e-12));

    rng::Stream s(21);
    for (std::uint64_t t = 0; t < 500; ++t) {
        const int tau = 1 + static_cast<int>(t % 6);
        std::vector<double> v(static_cast<std::size_t>(tau));
        for (int i = 0; i < tau; ++i) v[static_cast<std::size_t>(i)] = -2.0 + 4.0 * s.uniform(100 * t + static_cast<std::uint64_t>(i));
        const double e = -4.0 + 8.0 * s.uniform(100 * t + 50);
        const int k = 2 + static_cast<int>(t % 3);
        const double ref = compose_period(v, e, k, 1).discriminant;
        for (int p = 2; p <= tau; ++p) {
            const double r = compose_period(v, e, k, p).discriminant;
            CHECK(std::abs(r - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
        }
    }
}

TEST_CASE("fixed point examples") {
    const std::vector<double> u{0.0};
    const FixedPoints in = fixed_points(compose_period(u, 0.0, 2, 1));
    CHECK(in.kind == FixedPointKind::ComplexPair);
    CHECK(std::abs(in.designated - I / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(in.other - std::conj(in.designated)) < 1e-14);
    CHECK(std::abs(in.designated) == doctest::Approx(1.0 / std::sqrt(2.0)));

    const FixedPoints out = fixed_points(compose_period(u, 3.0, 2, 1));
    CHECK(compose_period(u, 3.0, 2, 1).discriminant == doctest::Approx(1.0));
    CHECK(out.kind == FixedPointKind::RealPair);
    CHECK(out.designated.imag() == 0.0);
    CHECK(out.other.imag() == 0.0);
    CHECK(out.designated.real() != out.other.real());

    const FixedPoints edge = fixed_points(compose_period(u, std::sqrt(8.0), 2, 1), 1e-9);
    CHECK(edge.kind == FixedPointKind::Degenerate);

    PeriodMap identity;
    CHECK_THROWS_AS(fixed_points(identity), DegenerateMapError);
    PeriodMap affine;
    affine.map = {2.0, 1.0, 0.0, 1.0};
    const FixedPoints aff = fixed_points(affine);
    CHECK(aff.kind == FixedPointKind::Degenerate);
    CHECK(std::abs(affine.map.apply(aff.designated) - aff.designated) < 1e-14);
}

TEST_CASE("fixed points are fixed and coherent with the sign of rho") {
    rng::Stream s(4);
    for (std::uint64_t t = 0; t < 400; ++t) {
        const int tau = 1 + static_cast<int>(t % 4);
        std::vector<double> v(static_cast<std::size_t>(tau));
        for (int i = 0; i < tau; ++i) v[static_cast<std::size_t>(i)] = -1.5 + 3.0 * s.uniform(10 * t + static_cast<std::uint64_t>(i));
        const double e = -4.0 + 8.0 * s.uniform(10 * t + 9);
        const PeriodMap pm = compose_period(v, e, 2, 1);
        if (std::abs(pm.discriminant) < 1e-9) continue;
        const FixedPoints fp = fixed_points(pm);
        CHECK((pm.discriminant < 0) == (fp.kind == FixedPointKind::ComplexPair));
        const double scale = std::max(1.0, std::abs(fp.designated));
        CHECK(std::abs(pm.map.apply(fp.designated) - fp.designated) < 1e-10 * scale);
        if (fp.kind == FixedPointKind::ComplexPair) CHECK(fp.designated.imag() > 0.0);
    }
}

TEST_CASE("free and shifted bands") {
    const std::vector<double> zero{0.0};
    const BandSet free = ac_bands(zero, 2, -4.0, 4.0, 1000);
    REQUIRE(free.intervals.size() == 1);
    CHECK(std::abs(free.intervals[0].lo + 2.0 * std::sqrt(2.0)) < 1e-8);
    CHECK(std::abs(free.intervals[0].hi - 2.0 * std::sqrt(2.0)) < 1e-8);
    CHECK_FALSE(free.grid_too_coarse);

    for (double c : {-1.3, 0.4, 2.0}) {
        const std::vector<double> u{c};
        const BandSet b = ac_bands(u, 3, -8.0, 8.0, 500);
        REQUIRE(b.intervals.size() == 1);
        CHECK(std::abs(b.intervals[0].lo - (c - 2.0 * std::sqrt(3.0))) < 1e-8);
        CHECK(std::abs(b.intervals[0].hi - (c + 2.0 * std::sqrt(3.0))) < 1e-8);
    }

    CHECK_THROWS_AS(ac_bands(zero, 2, -4.0, 4.0, 99), ArgumentError);
    CHECK_THROWS_AS(ac_bands(zero, 2, 4.0, -4.0, 1000), ArgumentError);
    CHECK(ac_bands(zero, 2, 3.0, 5.0, 200).empty());
}

TEST_CASE("band counts and the half-line oracle") {
    const std::vector<double> two{1.0, -1.0};
    const BandSet tree = ac_bands(two, 2, -5.0, 5.0, 2000);
    const BandSet line = halfline_bands_oracle(two, 2, -5.0, 5.0, 2000);
    CHECK(tree.intervals.size() <= 2);
    check_same_bands(tree, line, 1e-6);

    const std::vector<double> half{0.5};
    check_same_bands(ac_bands(half, 3, -6.0, 6.0, 1000), halfline_bands_oracle(half, 3, -6.0, 6.0, 1000), 1e-6);

    const std::vector<double> zero{0.0};
    const BandSet hl = halfline_bands_oracle(zero, 2, -4.0, 4.0, 1000);
    REQUIRE(hl.intervals.size() == 1);
    CHECK(std::abs(hl.intervals[0].hi - 2.0 * std::sqrt(2.0)) < 1e-8);
    CHECK(halfline_bands_oracle(zero, 2, 3.0, 5.0, 200).empty());

    rng::Stream s(77);
    for (std::uint64_t t = 0; t < 20; ++t) {
        const int tau = 2 + static_cast<int>(t % 3);
        std::vector<double> v(static_cast<std::size_t>(tau));
        for (int i = 0; i < tau; ++i) v[static_cast<std::size_t>(i)] = -2.0 + 4.0 * s.uniform(10 * t + static_cast<std::uint64_t>(i));
        const BandSet a = ac_bands(v, 2, -7.0, 7.0, 4000);
        CHECK(a.intervals.size() <= static_cast<std::size_t>(tau));
        for (std::size_t i = 1; i < a.intervals.size(); ++i) CHECK(a.intervals[i - 1].hi < a.intervals[i].lo);
        check_same_bands(a, halfline_bands_oracle(v, 2, -7.0, 7.0, 4000), 1e-6);
    }
}

TEST_CASE("a narrow band raises the coarse-grid flag") {
    const std::vector<double> u{3.0, -3.0};
    const BandSet b = ac_bands(u, 2, -6.0, 6.0, 100);
    bool narrow = false;
    for (const auto& iv : b.intervals) narrow = narrow || iv.width() < 3 * 12.0 / 100;
    CHECK(narrow == b.grid_too_coarse);
    if (b.grid_too_coarse) CHECK_FALSE(b.warnings.empty());
}

TEST_CASE("period modulus identity inside the bands") {
    const std::vector<std::vector<double>> backgrounds{{0.0}, {1.0, -1.0}, {1.0, 0.0, -1.0}, {0.4, -0.2, 0.9, -1.1}};
    for (const auto& u : backgrounds) {
        const int tau = static_cast<int>(u.size());
        const BandSet bands = ac_bands(u, 2, -5.0, 5.0, 2000);
        for (const auto& iv : bands.intervals) {
            for (double f : {0.2, 0.5, 0.8}) {
                const double e = iv.lo + f * iv.width();
                double prod = 1.0;
                for (int theta = 1; theta <= tau; ++theta) {
                    const FixedPoints fp = fixed_points(compose_period(u, e, 2, theta));
                    REQUIRE(fp.kind == FixedPointKind::ComplexPair);
                    prod *= std::sqrt(2.0) * std::abs(fp.designated);
                }
                CHECK(std::abs(prod - 1.0) < 1e-8);
            }
        }
    }
}

TEST_CASE("periodic forward resolvent") {
    const std::vector<double> zero{0.0};
    CHECK(std::abs(periodic_forward_resolvent(zero, 2, 0.0, 1) - I / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(periodic_forward_resolvent(zero, 2, cplx(0.4, 0.3), 1) -
                   free_forward_resolvent(2, cplx(0.4, 0.3))) < 1e-13);
    // Outside the band: the attracting real fixed point.
    const cplx out = periodic_forward_resolvent(zero, 2, 3.5, 1);
    CHECK(out.imag() == 0.0);
    CHECK(std::abs(out - free_forward_resolvent(2, cplx(3.5, 1e-12))) < 1e-6);

    const std::vector<double> u{1.0, -1.0};
    for (double e : {-2.0, 0.3, 1.7}) {
        const cplx z{e, 0.02};
        for (int theta = 1; theta <= 2; ++theta) {
            const cplx g = periodic_forward_resolvent(u, 2, z, theta);
            const cplx chain = radial_chain_gamma(TreeParams(2, 0, 2), rotate(u, theta - 1), z, 20000);
            CHECK(std::abs(g - chain) < 1e-10);
        }
    }
}

TEST_CASE("vanishing eta recursion meets the fixed point in the band") {
    const std::vector<double> u{0.5, -0.5};
    const BandSet bands = ac_bands(u, 2, -5.0, 5.0, 1000);
    for (const auto& iv : bands.intervals) {
        const double e = iv.lo + 0.37 * iv.width();
        const cplx fixed = fixed_points(compose_period(u, e, 2, 1)).designated;
        const cplx chain = radial_chain_gamma(TreeParams(2, 0, 2), u, cplx(e, 1e-6), 40'000'000);
        CHECK(std::abs(chain - fixed) < 1e-4);
    }
}

}  // TEST_SUITE
