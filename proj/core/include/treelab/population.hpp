#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treelab/model.hpp"

namespace treelab {

// Monte Carlo representation of the law of Gamma at a vertex of phase
// point.phase.
struct GammaPool {
    std::vector<cplx> samples;
    std::int64_t generation = 0;
    EvaluationPoint point;

    std::size_t size() const noexcept { return samples.size(); }

    static GammaPool constant(std::size_t n, cplx value, const EvaluationPoint& point);
};

// N copies of the free forward resolvent at z (1/(-z) if no Herglotz root
// exists). N = 0 or eta <= 0 is an ArgumentError.
GammaPool population_init(std::size_t n, const TreeParams& params, const EvaluationPoint& point);

// Phase of the parent of a vertex with the given phase.
int previous_phase(int phase, int period) noexcept;

// One sweep of the distributional recursion. Every new sample is
//   (u(p') + lambda V - z - sum_{j=1..K} Gamma_j)^{-1}
// with the Gamma_j drawn uniformly with replacement from the input pool and a
// fresh V. The output pool represents the parent phase p' = previous_phase(p).
// In radial mode all K children share one draw, matching V_x = omega_{|x|}.
// Draws are keyed by (seed, generation, phase, sample index).
GammaPool population_step(const GammaPool& pool, const TreeParams& params, const PotentialSpec& pot,
                          std::uint64_t seed);

// One pool per phase, pools[theta - 1] representing Gamma_0(theta).
struct PoolEnsemble {
    std::vector<GammaPool> pools;

    int period() const noexcept { return static_cast<int>(pools.size()); }
    std::int64_t generation() const noexcept { return pools.empty() ? 0 : pools.front().generation; }
    const GammaPool& at_phase(int theta) const { return pools.at(static_cast<std::size_t>(theta - 1)); }
};

PoolEnsemble ensemble_init(std::size_t n, const TreeParams& params, const PotentialSpec& pot, double energy,
                           double eta);

// Advances every phase pool by one generation: new pools[theta] is built from
// the old pool of phase theta + 1.
PoolEnsemble ensemble_step(const PoolEnsemble& ensemble, const TreeParams& params, const PotentialSpec& pot,
                           std::uint64_t seed);

struct EquilibrationOptions {
    std::int64_t max_iter = 2000;
    double ks_tol = 0.01;
    // No convergence test before this many generations.
    std::int64_t min_iter = 0;
    // Test every this many generations (always comparing successive ones).
    std::int64_t check_every = 1;
};

struct EquilibrationDiagnostics {
    std::int64_t iterations = 0;
    double final_ks = 1.0;
    bool converged = false;
    // Set when max_iter was reached with KS >= ks_tol.
    std::optional<std::string> convergence_warning;
};

template <class State>
struct Equilibrated {
    State state;
    EquilibrationDiagnostics diagnostics;
};

// Iterates population_step until the KS distance between the |Gamma|
// marginals of successive generations of the same phase (stride tau) drops
// below ks_tol, or max_iter steps are done. max_iter < 1 is an ArgumentError.
Equilibrated<GammaPool> population_equilibrate(GammaPool pool, const TreeParams& params, const PotentialSpec& pot,
                                               std::uint64_t seed, const EquilibrationOptions& options);

// Same for an ensemble; the reported KS is the maximum over phases.
Equilibrated<PoolEnsemble> ensemble_equilibrate(PoolEnsemble ensemble, const TreeParams& params,
                                                const PotentialSpec& pot, std::uint64_t seed,
                                                const EquilibrationOptions& options);

}  // namespace treelab
