#include "treelab/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "treelab/error.hpp"
#include "treelab/rng.hpp"

namespace treelab {

std::optional<std::uint64_t> tree_vertex_count(int branching, int depth) {
    if (branching < 1 || depth < 0) return std::nullopt;
    std::uint64_t total = 0;
    std::uint64_t level = 1;
    const auto k = static_cast<std::uint64_t>(branching);
    for (int d = 0; d <= depth; ++d) {
        total += level;
        if (d < depth) {
            if (level > UINT64_MAX / k) return std::nullopt;
            level *= k;
        }
        if (total > UINT64_MAX / 2) return std::nullopt;
    }
    return total;
}

TreeParams::TreeParams(int branching, int depth, int period)
    : branching_(branching), depth_(depth), period_(period) {
    if (branching < 2) throw ArgumentError("TreeParams: K >= 2 required, got " + std::to_string(branching));
    if (depth < 0) throw ArgumentError("TreeParams: depth must be >= 0");
    if (period < 1) throw ArgumentError("TreeParams: period must be >= 1");
    const auto count = tree_vertex_count(branching, depth);
    if (!count || *count > kMaxExactVertices) {
        throw BudgetError("TreeParams: depth " + std::to_string(depth) + " with K=" + std::to_string(branching) +
                          " exceeds the exact-tree budget of 1e7 vertices");
    }
}

std::uint64_t TreeParams::vertex_count() const noexcept { return *tree_vertex_count(branching_, depth_); }

std::uint64_t TreeParams::level_size(int level) const noexcept {
    std::uint64_t n = 1;
    for (int d = 0; d < level; ++d) n *= static_cast<std::uint64_t>(branching_);
    return n;
}

VertexId VertexId::from_path(std::span<const int> child_path, int branching) {
    VertexId v;
    for (int j : child_path) {
        if (j < 0 || j >= branching) throw ArgumentError("VertexId: child index out of range");
        v = v.child(j, branching);
    }
    return v;
}

std::vector<int> VertexId::path(int branching) const {
    std::vector<int> p(static_cast<std::size_t>(depth));
    std::uint64_t idx = index;
    for (int d = depth - 1; d >= 0; --d) {
        p[static_cast<std::size_t>(d)] = static_cast<int>(idx % static_cast<std::uint64_t>(branching));
        idx /= static_cast<std::uint64_t>(branching);
    }
    return p;
}

std::string to_string(const VertexId& v) {
    std::ostringstream os;
    os << v.depth << ':' << v.index;
    return os.str();
}

// --- disorder ---------------------------------------------------------------

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_distribution(const Distribution& d) {
    std::visit(overloaded{
                   [](const UniformDist& u) {
                       if (!(u.lo < u.hi)) throw ArgumentError("Uniform(a,b) requires a < b");
                   },
                   [](const CauchyDist& c) {
                       if (!(c.scale > 0)) throw ArgumentError("Cauchy requires scale > 0");
                   },
                   [](const GaussianDist& g) {
                       if (!(g.sd > 0)) throw ArgumentError("Gaussian requires sd > 0");
                   },
                   [](const BernoulliDist& b) {
                       if (!(b.p >= 0 && b.p <= 1)) throw ArgumentError("Bernoulli requires 0 <= p <= 1");
                   },
                   [](const ConstantDist& c) {
                       if (!std::isfinite(c.value)) throw ArgumentError("Constant requires a finite value");
                   },
               },
               d);
}

}  // namespace

// Every family here has E[log(1+|V|)] < inf: Uniform, Bernoulli and Constant are
// bounded, Gaussian has all moments, Cauchy has log-moments. Only parameter
// validity needs checking.
void DisorderSpec::validate() const {
    validate_distribution(distribution);
    if (const auto* mix = std::get_if<MixtureOfIid>(&correlation)) {
        if (mix->components.empty()) throw ArgumentError("MixtureOfIID needs at least one component");
        for (const auto& c : mix->components) {
            validate_distribution(c.distribution);
            if (!(c.weight > 0)) throw ArgumentError("MixtureOfIID weights must be positive");
        }
    }
    if (declared_kappa && !(*declared_kappa > 0 && *declared_kappa <= 1)) {
        throw ArgumentError("declared kappa must lie in (0,1]");
    }
}

KappaStatus DisorderSpec::kappa_status() const noexcept {
    return std::visit(overloaded{
                          [](const IidCorrelation&) { return KappaStatus::Certified; },
                          [](const RadialCorrelation&) { return KappaStatus::Violated; },
                          [](const MixtureOfIid&) { return KappaStatus::Uncertified; },
                      },
                      correlation);
}

std::optional<double> DisorderSpec::kappa() const noexcept {
    switch (kappa_status()) {
        case KappaStatus::Certified: return 1.0;
        case KappaStatus::Uncertified: return declared_kappa;
        case KappaStatus::Violated: return std::nullopt;
    }
    return std::nullopt;
}

std::string family_name(const Distribution& d) {
    return std::visit(overloaded{
                          [](const UniformDist&) { return std::string("uniform"); },
                          [](const CauchyDist&) { return std::string("cauchy"); },
                          [](const GaussianDist&) { return std::string("gaussian"); },
                          [](const BernoulliDist&) { return std::string("bernoulli"); },
                          [](const ConstantDist&) { return std::string("constant"); },
                      },
                      d);
}

double draw(const Distribution& d, double u1, double u2) noexcept {
    return std::visit(overloaded{
                          [&](const UniformDist& u) { return u.lo + (u.hi - u.lo) * u1; },
                          [&](const CauchyDist& c) { return c.scale * std::tan(std::numbers::pi * (u1 - 0.5)); },
                          [&](const GaussianDist& g) {
                              return g.mean +
                                     g.sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
                          },
                          [&](const BernoulliDist& b) { return u1 < b.p ? 1.0 : -1.0; },
                          [&](const ConstantDist& c) { return c.value; },
                      },
                      d);
}

const Distribution& active_distribution(const DisorderSpec& spec, std::uint64_t seed) {
    const auto* mix = std::get_if<MixtureOfIid>(&spec.correlation);
    if (!mix) return spec.distribution;
    double total = 0.0;
    for (const auto& c : mix->components) total += c.weight;
    const double u = rng::Stream({seed, rng::tag(rng::Tag::MixtureChoice)}).uniform(0) * total;
    double acc = 0.0;
    for (const auto& c : mix->components) {
        acc += c.weight;
        if (u < acc) return c.distribution;
    }
    return mix->components.back().distribution;
}

double sample_disorder(const DisorderSpec& spec, std::uint64_t seed, const VertexId& site) {
    const Distribution& dist = active_distribution(spec, seed);
    const rng::Stream stream =
        spec.is_radial()
            ? rng::Stream({seed, rng::tag(rng::Tag::SiteRadial), static_cast<std::uint64_t>(site.depth)})
            : rng::Stream({seed, rng::tag(rng::Tag::SiteIid), static_cast<std::uint64_t>(site.depth), site.index});
    return draw(dist, stream.uniform(0), stream.uniform(1));
}

// --- background potential -----------------------------------------------------

void PotentialSpec::validate() const {
    if (periodic_values.empty()) throw ArgumentError("potential: u must have at least one entry");
    for (double v : periodic_values) {
        if (!std::isfinite(v)) throw ArgumentError("potential: u entries must be finite");
    }
    if (!std::isfinite(coupling)) throw ArgumentError("potential: lambda must be finite");
    disorder.validate();
}

double PotentialSpec::background(int phase) const {
    if (phase < 1 || phase > period()) throw ArgumentError("potential: phase out of range 1..tau");
    return periodic_values[static_cast<std::size_t>(phase - 1)];
}

int phase_at_depth(int root_phase, int depth, int period) noexcept {
    return ((depth + root_phase - 1) % period) + 1;
}

double potential_at(const PotentialSpec& spec, const TreeParams& params, int phase, int depth_index,
                    double disorder_value) {
    const int tau = spec.period();
    if (params.period() != tau) throw ArgumentError("potential_at: tree period differs from length of u");
    if (phase < 1 || phase > tau) throw ArgumentError("potential_at: phase out of range 1..tau");
    if (depth_index < 0) throw ArgumentError("potential_at: negative depth");
    return spec.background(phase_at_depth(phase, depth_index, tau)) + spec.coupling * disorder_value;
}

}  // namespace treelab
