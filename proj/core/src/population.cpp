#include "treelab/population.hpp"

#include <algorithm>
#include <cmath>

#include "treelab/error.hpp"
#include "treelab/parallel.hpp"
#include "treelab/resolvent.hpp"
#include "treelab/rng.hpp"
#include "treelab/stats.hpp"

namespace treelab {

GammaPool GammaPool::constant(std::size_t n, cplx value, const EvaluationPoint& point) {
    GammaPool pool;
    pool.samples.assign(n, value);
    pool.point = point;
    return pool;
}

GammaPool population_init(std::size_t n, const TreeParams& params, const EvaluationPoint& point) {
    if (n == 0) throw ArgumentError("population_init: N >= 1 required");
    if (!(point.eta > 0)) throw ArgumentError("population_init: eta > 0 required");
    cplx value;
    try {
        value = free_forward_resolvent(params.branching(), point.z());
    } catch (const BandEdgeError&) {
        value = -1.0 / point.z();
    }
    return GammaPool::constant(n, value, point);
}

int previous_phase(int phase, int period) noexcept { return ((phase - 2 + period) % period) + 1; }

GammaPool population_step(const GammaPool& pool, const TreeParams& params, const PotentialSpec& pot,
                          std::uint64_t seed) {
    if (pool.samples.empty()) throw ArgumentError("population_step: empty pool");
    if (!(pool.point.eta > 0)) throw ArgumentError("population_step: eta > 0 required");
    const int tau = pot.period();
    if (pool.point.phase < 1 || pool.point.phase > tau) throw ArgumentError("population_step: phase out of range");

    GammaPool next;
    next.point = pool.point;
    next.point.phase = previous_phase(pool.point.phase, tau);
    next.generation = pool.generation + 1;
    next.samples.resize(pool.samples.size());

    const double u = pot.background(next.point.phase);
    const double lambda = pot.coupling;
    const cplx z = pool.point.z();
    const int k = params.branching();
    const bool radial = pot.disorder.is_radial();
    const Distribution& dist = active_distribution(pot.disorder, seed);
    const rng::Stream stream({seed, rng::tag(rng::Tag::PoolStep), static_cast<std::uint64_t>(next.generation),
                              static_cast<std::uint64_t>(next.point.phase)});
    const std::uint64_t n = pool.samples.size();
    const std::uint64_t draws_per_sample = static_cast<std::uint64_t>(k) + 2;
    const cplx* prev = pool.samples.data();
    cplx* out = next.samples.data();

    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t base = i * draws_per_sample;
            cplx children = 0.0;
            if (radial) {
                children = static_cast<double>(k) * prev[stream.index(base, n)];
            } else {
                for (int j = 0; j < k; ++j) children += prev[stream.index(base + static_cast<std::uint64_t>(j), n)];
            }
            const double v = lambda == 0.0 ? 0.0
                                           : draw(dist, stream.uniform(base + static_cast<std::uint64_t>(k)),
                                                  stream.uniform(base + static_cast<std::uint64_t>(k) + 1));
            const cplx d = u + lambda * v - z - children;
            out[i] = std::conj(d) / std::norm(d);
        }
    });
    return next;
}

PoolEnsemble ensemble_init(std::size_t n, const TreeParams& params, const PotentialSpec& pot, double energy,
                           double eta) {
    PoolEnsemble ens;
    for (int theta = 1; theta <= pot.period(); ++theta) {
        ens.pools.push_back(population_init(n, params, EvaluationPoint{energy, eta, theta}));
    }
    return ens;
}

PoolEnsemble ensemble_step(const PoolEnsemble& ensemble, const TreeParams& params, const PotentialSpec& pot,
                           std::uint64_t seed) {
    const int tau = ensemble.period();
    if (tau != pot.period()) throw ArgumentError("ensemble_step: ensemble size differs from period");
    PoolEnsemble next;
    next.pools.resize(ensemble.pools.size());
    for (int theta = 1; theta <= tau; ++theta) {
        const int child_phase = theta % tau + 1;
        GammaPool stepped = population_step(ensemble.at_phase(child_phase), params, pot, seed);
        next.pools[static_cast<std::size_t>(theta - 1)] = std::move(stepped);
    }
    return next;
}

namespace {

std::vector<double> sorted_moduli(const GammaPool& pool) {
    std::vector<double> m(pool.samples.size());
    std::transform(pool.samples.begin(), pool.samples.end(), m.begin(), [](const cplx& g) { return std::abs(g); });
    std::sort(m.begin(), m.end());
    return m;
}

void check_options(const EquilibrationOptions& options) {
    if (options.max_iter < 1) throw ArgumentError("population_equilibrate: max_iter >= 1 required");
    if (!(options.ks_tol > 0)) throw ArgumentError("population_equilibrate: ks_tol > 0 required");
    if (options.check_every < 1) throw ArgumentError("population_equilibrate: check_every >= 1 required");
}

void finish(EquilibrationDiagnostics& diag, const EquilibrationOptions& options) {
    if (!diag.converged) {
        diag.convergence_warning = "ConvergenceWarning: max_iter=" + std::to_string(options.max_iter) +
                                   " reached with KS=" + std::to_string(diag.final_ks) +
                                   " >= ks_tol=" + std::to_string(options.ks_tol);
    }
}

}  // namespace

Equilibrated<GammaPool> population_equilibrate(GammaPool pool, const TreeParams& params, const PotentialSpec& pot,
                                               std::uint64_t seed, const EquilibrationOptions& options) {
    check_options(options);
    const std::int64_t stride = pot.period();
    EquilibrationDiagnostics diag;
    GammaPool reference = pool;  // same phase, stride generations back
    for (std::int64_t it = 1; it <= options.max_iter; ++it) {
        pool = population_step(pool, params, pot, seed);
        diag.iterations = it;
        if (it % stride != 0) continue;
        const bool due = it >= options.min_iter && (it / stride) % options.check_every == 0;
        if (due) {
            diag.final_ks = ks_distance_sorted(sorted_moduli(reference), sorted_moduli(pool));
            if (diag.final_ks < options.ks_tol) {
                diag.converged = true;
                break;
            }
        }
        reference = pool;
    }
    finish(diag, options);
    return {std::move(pool), diag};
}

Equilibrated<PoolEnsemble> ensemble_equilibrate(PoolEnsemble ensemble, const TreeParams& params,
                                                const PotentialSpec& pot, std::uint64_t seed,
                                                const EquilibrationOptions& options) {
    check_options(options);
    EquilibrationDiagnostics diag;
    for (std::int64_t it = 1; it <= options.max_iter; ++it) {
        PoolEnsemble next = ensemble_step(ensemble, params, pot, seed);
        diag.iterations = it;
        if (it >= options.min_iter && it % options.check_every == 0) {
            double ks = 0.0;
            for (std::size_t p = 0; p < next.pools.size(); ++p) {
                ks = std::max(ks, ks_distance_sorted(sorted_moduli(ensemble.pools[p]), sorted_moduli(next.pools[p])));
            }
            diag.final_ks = ks;
            if (ks < options.ks_tol) {
                diag.converged = true;
                ensemble = std::move(next);
                break;
            }
        }
        ensemble = std::move(next);
    }
    finish(diag, options);
    return {std::move(ensemble), diag};
}

}  // namespace treelab
