#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace treelab {

using cplx = std::complex<double>;

// Rooted regular tree with K forward children per vertex, a truncation depth
// used by exact computations, and the period of the radial background.
class TreeParams {
public:
    static constexpr std::uint64_t kMaxExactVertices = 10'000'000;

    // Throws ArgumentError for K < 2, D < 0, tau < 1 and BudgetError when the
    // depth-D truncation would exceed kMaxExactVertices.
    explicit TreeParams(int branching, int depth = 0, int period = 1);

    int branching() const noexcept { return branching_; }
    int depth() const noexcept { return depth_; }
    int period() const noexcept { return period_; }

    // (K^{D+1} - 1) / (K - 1)
    std::uint64_t vertex_count() const noexcept;
    std::uint64_t level_size(int level) const noexcept;

private:
    int branching_;
    int depth_;
    int period_;
};

// Number of vertices of the depth-D truncation, or nullopt on overflow of the
// 64-bit range.
std::optional<std::uint64_t> tree_vertex_count(int branching, int depth);

// Canonical vertex id: depth plus the position within its level, where the
// position is the child-index path read as a base-K number. Equivalent to the
// path itself and independent of any traversal order.
struct VertexId {
    int depth = 0;
    std::uint64_t index = 0;

    static VertexId root() noexcept { return {}; }
    static VertexId from_path(std::span<const int> child_path, int branching);
    std::vector<int> path(int branching) const;

    VertexId child(int j, int branching) const noexcept {
        return {depth + 1, index * static_cast<std::uint64_t>(branching) + static_cast<std::uint64_t>(j)};
    }
    VertexId parent(int branching) const noexcept {
        return {depth - 1, index / static_cast<std::uint64_t>(branching)};
    }

    friend bool operator==(const VertexId&, const VertexId&) = default;
};

std::string to_string(const VertexId& v);

// --- disorder ---------------------------------------------------------------

struct UniformDist {
    double lo = -1.0;
    double hi = 1.0;
};
struct CauchyDist {
    double scale = 1.0;
};
struct GaussianDist {
    double mean = 0.0;
    double sd = 1.0;
};
// Takes the value +1 with probability p and -1 otherwise.
struct BernoulliDist {
    double p = 0.5;
};
struct ConstantDist {
    double value = 0.0;
};

using Distribution = std::variant<UniformDist, CauchyDist, GaussianDist, BernoulliDist, ConstantDist>;

struct MixtureComponent {
    Distribution distribution;
    double weight = 1.0;
};

struct IidCorrelation {};
// V_x = omega_{|x|}: identical along each sphere, violates weak correlation.
struct RadialCorrelation {};
// A realization first picks one component with the given weights and then
// draws iid from it. Weakly correlated, but no kappa is certified.
struct MixtureOfIid {
    std::vector<MixtureComponent> components;
};

using Correlation = std::variant<IidCorrelation, RadialCorrelation, MixtureOfIid>;

enum class KappaStatus {
    Certified,    // iid: kappa = 1
    Uncertified,  // user-declared value only
    Violated,     // radial mode, no kappa > 0 exists
};

struct DisorderSpec {
    Distribution distribution = ConstantDist{0.0};
    Correlation correlation = IidCorrelation{};
    std::optional<double> declared_kappa;

    // Throws ArgumentError on invalid family parameters or weights.
    void validate() const;

    KappaStatus kappa_status() const noexcept;
    // 1 for iid, the declared value for mixtures, nullopt otherwise.
    std::optional<double> kappa() const noexcept;
    bool is_radial() const noexcept { return std::holds_alternative<RadialCorrelation>(correlation); }
};

std::string family_name(const Distribution& d);

// Maps counter-indexed uniforms to one draw from d (inverse CDF; Gaussian
// uses Box-Muller on two consecutive counters).
double draw(const Distribution& d, double u1, double u2) noexcept;

// The distribution a given realization (seed) actually samples from. For
// mixtures this resolves the component choice.
const Distribution& active_distribution(const DisorderSpec& spec, std::uint64_t seed);

// Deterministic in (seed, site). Radial mode keys on site.depth only.
double sample_disorder(const DisorderSpec& spec, std::uint64_t seed, const VertexId& site);

// --- background potential -----------------------------------------------------

struct PotentialSpec {
    std::vector<double> periodic_values{0.0};  // u(1..tau)
    DisorderSpec disorder{};
    double coupling = 0.0;  // lambda

    int period() const noexcept { return static_cast<int>(periodic_values.size()); }
    // Throws ArgumentError if u is empty or the disorder spec is invalid.
    void validate() const;
    // u(phase), phase in 1..tau.
    double background(int phase) const;
};

// Phase index of a vertex at the given depth when the root carries
// root_phase: ((depth + root_phase - 1) mod tau) + 1.
int phase_at_depth(int root_phase, int depth, int period) noexcept;

// U_x + lambda * V_x for a vertex at depth_index in a tree whose root has the
// given phase.
double potential_at(const PotentialSpec& spec, const TreeParams& params, int phase, int depth_index,
                    double disorder_value);

// z = E + i eta together with the phase of the root.
struct EvaluationPoint {
    double energy = 0.0;
    double eta = 0.0;
    int phase = 1;

    cplx z() const noexcept { return {energy, eta}; }
};

}  // namespace treelab
