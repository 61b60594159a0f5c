#include "treelab/resolvent.hpp"

#include <cmath>
#include <string>

#include "treelab/error.hpp"
#include "treelab/parallel.hpp"

namespace treelab {

cplx free_forward_resolvent(int branching, cplx z) {
    if (branching < 1) throw ArgumentError("free_forward_resolvent: K >= 1 required");
    if (z.imag() < 0) throw ArgumentError("free_forward_resolvent: Im z must be >= 0");
    const double k = branching;
    if (z.imag() == 0 && std::abs(z.real()) >= 2.0 * std::sqrt(k)) {
        throw BandEdgeError("free_forward_resolvent: E outside the open band (-2 sqrt K, 2 sqrt K) at eta = 0");
    }
    // Roots q/K and 1/q with q = -(z + s r)/2, s chosen against cancellation.
    const cplx r = std::sqrt(z * z - 4.0 * k);
    const cplx plus = z + r;
    const cplx minus = z - r;
    const cplx q = -0.5 * (std::abs(plus) >= std::abs(minus) ? plus : minus);
    const cplx g1 = q / k;
    const cplx g2 = 1.0 / q;
    return g1.imag() >= g2.imag() ? g1 : g2;
}

// --- exact tree ---------------------------------------------------------------

ExactTreeResult::ExactTreeResult(int branching, std::vector<std::vector<cplx>> gammas,
                                 std::vector<std::vector<double>> potentials)
    : branching_(branching), gammas_(std::move(gammas)), potentials_(std::move(potentials)) {
    if (gammas_.empty() || gammas_.size() != potentials_.size()) {
        throw ArgumentError("ExactTreeResult: inconsistent level storage");
    }
}

std::uint64_t ExactTreeResult::vertex_count() const noexcept {
    std::uint64_t n = 0;
    for (const auto& l : gammas_) n += l.size();
    return n;
}

cplx ExactTreeResult::at(const VertexId& v) const {
    if (v.depth < 0 || v.depth > depth()) throw ArgumentError("ExactTreeResult: vertex depth out of range");
    return gammas_[static_cast<std::size_t>(v.depth)].at(v.index);
}

double ExactTreeResult::potential(const VertexId& v) const {
    if (v.depth < 0 || v.depth > depth()) throw ArgumentError("ExactTreeResult: vertex depth out of range");
    return potentials_[static_cast<std::size_t>(v.depth)].at(v.index);
}

std::vector<cplx> ExactTreeResult::path_gammas(const VertexId& v) const {
    std::vector<cplx> out(static_cast<std::size_t>(v.depth) + 1);
    VertexId cur = v;
    for (int d = v.depth; d >= 0; --d) {
        out[static_cast<std::size_t>(d)] = at(cur);
        if (d > 0) cur = cur.parent(branching_);
    }
    return out;
}

double ExactTreeResult::max_recursion_residual(cplx z) const {
    const auto k = static_cast<std::size_t>(branching_);
    double worst = 0.0;
    for (int d = 0; d <= depth(); ++d) {
        const auto& g = gammas_[static_cast<std::size_t>(d)];
        const auto& v = potentials_[static_cast<std::size_t>(d)];
        const bool leaf = d == depth();
        for (std::size_t i = 0; i < g.size(); ++i) {
            cplx children = 0.0;
            if (!leaf) {
                const auto& below = gammas_[static_cast<std::size_t>(d) + 1];
                for (std::size_t j = 0; j < k; ++j) children += below[i * k + j];
            }
            const cplx expected = 1.0 / (v[i] - z - children);
            worst = std::max(worst, std::abs(g[i] - expected));
        }
    }
    return worst;
}

ExactTreeResult exact_tree_gamma(const TreeParams& params, const PotentialSpec& pot, const EvaluationPoint& point,
                                 std::uint64_t seed) {
    if (!(point.eta > 0)) throw ArgumentError("exact_tree_gamma: eta > 0 required");
    if (params.period() != pot.period()) throw ArgumentError("exact_tree_gamma: tree period differs from length of u");
    if (point.phase < 1 || point.phase > pot.period()) throw ArgumentError("exact_tree_gamma: phase out of range");

    const int depth = params.depth();
    const int k = params.branching();
    const cplx z = point.z();

    std::vector<std::vector<double>> potentials(static_cast<std::size_t>(depth) + 1);
    std::vector<std::vector<cplx>> gammas(static_cast<std::size_t>(depth) + 1);
    for (int d = 0; d <= depth; ++d) {
        const auto n = static_cast<std::size_t>(params.level_size(d));
        auto& v = potentials[static_cast<std::size_t>(d)];
        v.resize(n);
        const double u = pot.background(phase_at_depth(point.phase, d, pot.period()));
        parallel_for(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const double dis =
                    pot.coupling == 0.0 ? 0.0 : sample_disorder(pot.disorder, seed, VertexId{d, i});
                v[i] = u + pot.coupling * dis;
            }
        });
        gammas[static_cast<std::size_t>(d)].resize(n);
    }

    for (int d = depth; d >= 0; --d) {
        auto& g = gammas[static_cast<std::size_t>(d)];
        const auto& v = potentials[static_cast<std::size_t>(d)];
        const std::vector<cplx>* below = d < depth ? &gammas[static_cast<std::size_t>(d) + 1] : nullptr;
        parallel_for(g.size(), [&](std::size_t lo, std::size_t hi) {
            const auto kk = static_cast<std::size_t>(k);
            for (std::size_t i = lo; i < hi; ++i) {
                cplx children = 0.0;
                if (below) {
                    for (std::size_t j = 0; j < kk; ++j) children += (*below)[i * kk + j];
                }
                g[i] = 1.0 / (v[i] - z - children);
            }
        });
    }
    return ExactTreeResult(k, std::move(gammas), std::move(potentials));
}

cplx radial_chain_gamma(const TreeParams& params, std::span<const double> u_sequence, cplx z, std::int64_t n_steps) {
    if (!(z.imag() > 0)) throw ArgumentError("radial_chain_gamma: Im z > 0 required");
    if (n_steps < 1) throw ArgumentError("radial_chain_gamma: n_steps >= 1 required");
    if (u_sequence.empty()) throw ArgumentError("radial_chain_gamma: empty potential sequence");
    const double k = params.branching();
    const auto len = static_cast<std::int64_t>(u_sequence.size());
    cplx g = 0.0;
    for (std::int64_t n = n_steps - 1; n >= 0; --n) {
        const cplx d = u_sequence[static_cast<std::size_t>(n % len)] - z - k * g;
        g = std::conj(d) / std::norm(d);
    }
    return g;
}

cplx offdiag_green(std::span<const cplx> path_gammas) {
    if (path_gammas.empty()) throw ArgumentError("offdiag_green: empty path");
    cplx prod = 1.0;
    for (const cplx& g : path_gammas) prod *= g;
    return prod;
}

cplx adjacency_offdiag_green(std::span<const cplx> path_gammas) {
    const cplx prod = offdiag_green(path_gammas);
    return path_gammas.size() % 2 == 1 ? prod : -prod;
}

Extrapolation eta_extrapolate(std::span<const EtaSample> values, double uncertainty_budget) {
    const std::size_t n = values.size();
    if (n < 3) throw ArgumentError("eta_extrapolate: at least 3 points required");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(values[i].eta > 0)) throw ArgumentError("eta_extrapolate: eta must be > 0");
        if (i > 0 && !(values[i].eta < values[i - 1].eta)) {
            throw ArgumentError("eta_extrapolate: eta must be strictly decreasing");
        }
    }
    // Neville tableau evaluated at eta = 0. After pass m, p[i] interpolates
    // points i..i+m; p[0] is the estimate of order m.
    std::vector<cplx> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = values[i].gamma;
    cplx previous = p[0];
    cplx current = p[0];
    for (std::size_t m = 1; m < n; ++m) {
        for (std::size_t i = 0; i + m < n; ++i) {
            const double xi = values[i].eta;
            const double xj = values[i + m].eta;
            p[i] = (xi * p[i + 1] - xj * p[i]) / (xi - xj);
        }
        previous = current;
        current = p[0];
    }
    const double spread = std::abs(current - previous);
    if (spread > uncertainty_budget) {
        throw IllConditionedError("eta_extrapolate: successive estimates differ by " + std::to_string(spread) +
                                  " > budget " + std::to_string(uncertainty_budget));
    }
    return {current, spread};
}

}  // namespace treelab
