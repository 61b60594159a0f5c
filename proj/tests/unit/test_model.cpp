#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "treelab/error.hpp"
#include "treelab/model.hpp"
#include "treelab/parallel.hpp"
#include "treelab/stats.hpp"

using namespace treelab;

TEST_SUITE("model") {

TEST_CASE("tree params guard K and the vertex budget") {
    CHECK_THROWS_AS(TreeParams(1), ArgumentError);
    CHECK_THROWS_AS(TreeParams(2, -1), ArgumentError);
    CHECK_THROWS_AS(TreeParams(2, 0, 0), ArgumentError);
    CHECK(TreeParams(2, 3).vertex_count() == 15);
    CHECK(TreeParams(3, 2).vertex_count() == 13);
    CHECK(TreeParams(2, 3).level_size(3) == 8);
    // 2^24 - 1 > 1e7
    CHECK_NOTHROW(TreeParams(2, 22));
    CHECK_THROWS_AS(TreeParams(2, 23), BudgetError);
    CHECK_THROWS_AS(TreeParams(2, 4000), BudgetError);
    CHECK_FALSE(tree_vertex_count(2, 200).has_value());
}

TEST_CASE("vertex ids round trip through child paths") {
    const std::vector<int> path{2, 0, 1, 2};
    const VertexId v = VertexId::from_path(path, 3);
    CHECK(v.depth == 4);
    CHECK(v.index == 2 * 27 + 0 * 9 + 1 * 3 + 2);
    CHECK(v.path(3) == path);
    CHECK(v.parent(3).child(2, 3) == v);
    CHECK(VertexId::root().path(3).empty());
    CHECK(to_string(v) == "4:59");
    const std::vector<int> bad{3};
    CHECK_THROWS_AS(VertexId::from_path(bad, 3), ArgumentError);
}

TEST_CASE("potential_at examples") {
    PotentialSpec free;
    free.periodic_values = {0.0};
    CHECK(potential_at(free, TreeParams(2), 1, 7, 3.0) == 0.0);

    PotentialSpec two;
    two.periodic_values = {1.0, -1.0};
    const TreeParams p2(2, 0, 2);
    CHECK(potential_at(two, p2, 1, 3, 5.0) == -1.0);
    CHECK(potential_at(two, p2, 1, 0, 0.0) == 1.0);
    CHECK(potential_at(two, p2, 2, 0, 0.0) == -1.0);

    PotentialSpec shifted;
    shifted.periodic_values = {0.5};
    shifted.coupling = 0.3;
    CHECK(potential_at(shifted, TreeParams(2), 1, 0, 2.0) == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("phase cycles with depth") {
    CHECK(phase_at_depth(1, 0, 3) == 1);
    CHECK(phase_at_depth(1, 1, 3) == 2);
    CHECK(phase_at_depth(1, 3, 3) == 1);
    CHECK(phase_at_depth(3, 1, 3) == 1);
    CHECK(phase_at_depth(2, 5, 1) == 1);
}

TEST_CASE("constant disorder is constant") {
    DisorderSpec d;
    d.distribution = ConstantDist{2.5};
    for (std::uint64_t i = 0; i < 100; ++i) CHECK(sample_disorder(d, 17, VertexId{3, i % 8}) == 2.5);
}

TEST_CASE("radial disorder depends on depth only") {
    DisorderSpec d;
    d.distribution = UniformDist{-1.0, 1.0};
    d.correlation = RadialCorrelation{};
    for (std::uint64_t seed : {1ULL, 99ULL, 123456789ULL}) {
        const double a = sample_disorder(d, seed, VertexId{5, 0});
        for (std::uint64_t i = 1; i < 32; ++i) CHECK(sample_disorder(d, seed, VertexId{5, i}) == a);
        CHECK(sample_disorder(d, seed, VertexId{6, 0}) != a);
    }
    CHECK(d.kappa_status() == KappaStatus::Violated);
    CHECK_FALSE(d.kappa().has_value());
}

TEST_CASE("iid uniform draws have the right mean") {
    DisorderSpec d;
    d.distribution = UniformDist{-1.0, 1.0};
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_disorder(d, 7, VertexId{17, static_cast<std::uint64_t>(i)});
    const double bound = 3.0 * (2.0 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum / n) < bound);
    CHECK(d.kappa_status() == KappaStatus::Certified);
    CHECK(d.kappa().value() == 1.0);
}

TEST_CASE("draws are deterministic and independent of the worker count") {
    DisorderSpec d;
    d.distribution = GaussianDist{0.0, 1.0};
    const std::size_t n = 20000;
    auto fill = [&](int workers) {
        set_worker_count(workers);
        std::vector<double> out(n);
        parallel_for(n, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) out[i] = sample_disorder(d, 42, VertexId{20, i});
        });
        return out;
    };
    const auto one = fill(1);
    const auto eight = fill(8);
    set_worker_count(1);
    CHECK(one == eight);
    CHECK(sample_disorder(d, 42, VertexId{20, 5}) == one[5]);
    CHECK(sample_disorder(d, 43, VertexId{20, 5}) != one[5]);
}

TEST_CASE("disjoint subtrees look alike (two-sample KS at 0.01)") {
    DisorderSpec d;
    d.distribution = UniformDist{-1.0, 1.0};
    // Depth 15 has 2^15 sites, 2^14 under each child of the root.
    std::vector<double> left, right;
    const std::uint64_t per_child = 1ULL << 14;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        left.push_back(sample_disorder(d, 5, VertexId{15, i}));
        right.push_back(sample_disorder(d, 5, VertexId{15, per_child + i}));
    }
    CHECK(ks_distance(left, right) < ks_critical_value(left.size(), right.size(), 0.01));
}

TEST_CASE("distribution families") {
    const int n = 200000;
    DisorderSpec g;
    g.distribution = GaussianDist{1.0, 2.0};
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_disorder(g, 3, VertexId{30, static_cast<std::uint64_t>(i)});
        s += x;
        ss += x * x;
    }
    const double mean = s / n;
    CHECK(std::abs(mean - 1.0) < 5 * 2.0 / std::sqrt(n));
    CHECK(std::sqrt(ss / n - mean * mean) == doctest::Approx(2.0).epsilon(0.01));

    DisorderSpec b;
    b.distribution = BernoulliDist{0.3};
    int plus = 0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_disorder(b, 3, VertexId{30, static_cast<std::uint64_t>(i)});
        CHECK((x == 1.0 || x == -1.0));
        plus += x > 0;
    }
    CHECK(std::abs(plus / double(n) - 0.3) < 5 * std::sqrt(0.21 / n));

    // Cauchy: median and quartiles only.
    DisorderSpec c;
    c.distribution = CauchyDist{0.5};
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = sample_disorder(c, 3, VertexId{30, static_cast<std::uint64_t>(i)});
    std::sort(v.begin(), v.end());
    CHECK(std::abs(v[n / 2]) < 0.01);
    CHECK(v[n / 4] == doctest::Approx(-0.5).epsilon(0.03));
    CHECK(v[3 * n / 4] == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("mixtures pick one component per realization and stay uncertified") {
    DisorderSpec m;
    m.correlation = MixtureOfIid{{{ConstantDist{1.0}, 1.0}, {ConstantDist{-1.0}, 3.0}}};
    CHECK(m.kappa_status() == KappaStatus::Uncertified);
    CHECK_FALSE(m.kappa().has_value());
    int ones = 0;
    for (std::uint64_t seed = 0; seed < 4000; ++seed) {
        const double a = sample_disorder(m, seed, VertexId{2, 0});
        CHECK(sample_disorder(m, seed, VertexId{9, 100}) == a);
        ones += a > 0;
    }
    CHECK(std::abs(ones / 4000.0 - 0.25) < 0.04);
    m.declared_kappa = 0.5;
    CHECK(m.kappa().value() == 0.5);

    DisorderSpec bad;
    bad.correlation = MixtureOfIid{{{ConstantDist{1.0}, -1.0}}};
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    DisorderSpec bad_uniform;
    bad_uniform.distribution = UniformDist{1.0, -1.0};
    CHECK_THROWS_AS(bad_uniform.validate(), ArgumentError);
}

}  // TEST_SUITE
