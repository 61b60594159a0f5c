#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "treelab/model.hpp"

namespace treelab {

// Root of K G^2 + z G + 1 = 0 in the upper half-plane: the forward resolvent
// of the free tree. At Im z = 0 only |E| < 2 sqrt(K) is accepted (BandEdgeError
// otherwise); Im z < 0 is an ArgumentError.
cplx free_forward_resolvent(int branching, cplx z);

// Forward resolvents of every vertex of the depth-D truncation, stored level
// by level in canonical order. Vertices beyond depth D carry Gamma = 0, so
// leaves hold 1/(U + lambda V - z).
class ExactTreeResult {
public:
    ExactTreeResult(int branching, std::vector<std::vector<cplx>> gammas,
                    std::vector<std::vector<double>> potentials);

    int branching() const noexcept { return branching_; }
    int depth() const noexcept { return static_cast<int>(gammas_.size()) - 1; }
    std::uint64_t vertex_count() const noexcept;

    cplx root() const noexcept { return gammas_.front().front(); }
    cplx at(const VertexId& v) const;
    // Diagonal potential U_x + lambda V_x used for the vertex.
    double potential(const VertexId& v) const;

    std::span<const cplx> level(int d) const { return gammas_.at(static_cast<std::size_t>(d)); }
    std::span<const double> level_potential(int d) const { return potentials_.at(static_cast<std::size_t>(d)); }

    // Gamma values on the path root -> v, root first.
    std::vector<cplx> path_gammas(const VertexId& v) const;

    // max_x |Gamma_x - (V_x - z - sum_children Gamma_y)^{-1}|
    double max_recursion_residual(cplx z) const;

private:
    int branching_;
    std::vector<std::vector<cplx>> gammas_;
    std::vector<std::vector<double>> potentials_;
};

// Bottom-up recursion on the truncated tree. Requires eta > 0 and
// params.period() == pot.period(). Disorder at vertex x is
// sample_disorder(pot.disorder, seed, x).
ExactTreeResult exact_tree_gamma(const TreeParams& params, const PotentialSpec& pot, const EvaluationPoint& point,
                                 std::uint64_t seed);

// Scalar recursion Gamma_n = 1/(U_n - z - K Gamma_{n+1}) for radial
// potentials, started from Gamma_{n_steps} = 0; U_n = u_sequence[n mod size].
cplx radial_chain_gamma(const TreeParams& params, std::span<const double> u_sequence, cplx z, std::int64_t n_steps);

// Product of the forward resolvents along the path root -> x (root first).
// This is <delta_0, (H - z)^{-1} delta_x> when the hopping is -1 on every
// edge; the tree is bipartite, so that operator is unitarily equivalent to
// the one built on the adjacency matrix and has the same Gamma_x.
cplx offdiag_green(std::span<const cplx> path_gammas);

// The same entry for H = adjacency + potential: (-1)^{|x|} times the product.
cplx adjacency_offdiag_green(std::span<const cplx> path_gammas);

struct EtaSample {
    double eta;
    cplx gamma;
};

struct Extrapolation {
    cplx value;
    double uncertainty;  // |last two Neville diagonal estimates|
};

// Polynomial (Neville) extrapolation of Gamma(E + i eta) to eta = 0.
// Needs >= 3 points with strictly decreasing eta > 0 (ArgumentError); throws
// IllConditionedError when the last two estimates differ by more than
// uncertainty_budget.
Extrapolation eta_extrapolate(std::span<const EtaSample> values, double uncertainty_budget = 1e-3);

}  // namespace treelab
