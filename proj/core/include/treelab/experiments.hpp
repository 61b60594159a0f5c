#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "treelab/cocycle.hpp"
#include "treelab/model.hpp"
#include "treelab/population.hpp"
#include "treelab/stats.hpp"

namespace treelab {

struct EnergyGrid {
    double e_min = -3.0;
    double e_max = 3.0;
    int points = 512;

    // Uniform grid including both ends (a single point sits at e_min).
    std::vector<double> values() const;
};

struct ExperimentConfig {
    std::string experiment = "dos";
    TreeParams tree{2};
    PotentialSpec potential{};
    EnergyGrid energy_grid{};
    std::vector<double> eta_schedule{1e-3};
    std::vector<double> lambda_schedule{};
    std::size_t pool_size = 100'000;
    std::uint64_t seed = 1;
    // Integration window for the continuity experiment; must sit inside one
    // band of the unperturbed operator.
    std::optional<Interval> interval;
    std::vector<double> alphas{0.1, 0.25, 0.5};
    EquilibrationOptions equilibration{2000, 0.01, 200, 1};
    // Generations averaged after equilibration, and the batches used for
    // their standard errors.
    std::int64_t sample_generations = 200;
    std::size_t error_batches = 10;
    double tail_s = 0.5;
    double tail_t = 10.0;
    // Depth of the scalar chains used for radial disorder.
    std::int64_t chain_steps = 2000;
    double width_alpha = 0.1;
    double cauchy_pass_fraction = 0.95;
    // Multiplies every right-hand side of the fluctuation suite; only the
    // failure-path tests change it.
    double bound_scale = 1.0;

    int period() const noexcept { return potential.period(); }
    // Checks cross-field consistency (period, schedules, alphas, interval).
    void validate() const;
};

struct CurveRecord {
    double abscissa = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    std::map<std::string, std::string> metadata;
};

// E -> (1/pi) Im Gamma_0 averaged over phases, with band annotations. lambda
// = 0 uses the cocycle fixed point at eta = 0; otherwise pools at the smallest
// scheduled eta.
struct DosReport {
    BandSet bands;
    std::vector<CurveRecord> dos;
};
DosReport run_dos_report(const ExperimentConfig& cfg);

// lambda -> int_I E|Im Gamma_lambda(E + i eta) - Im Gamma_0(E + i eta)| dE, including
// lambda = 0 (exactly 0). BandViolationError if I leaves the computed band.
struct ContinuityResult {
    std::vector<CurveRecord> curve;  // decreasing lambda, then lambda = 0
    std::vector<CurveRecord> integrand;  // E|Im Gamma_lambda - Im Gamma_0| per (lambda, E)
    double eta = 0.0;
    Interval integration_window;
    // Each step to a smaller lambda decreases L1 by more than 2 combined
    // standard errors.
    bool strictly_decreasing = false;
};
ContinuityResult run_continuity_experiment(const ExperimentConfig& cfg);

// Population-dynamics Lyapunov exponent against the closed form
// -log(sqrt(K) |Gamma_free(E + i(eta + lambda sigma))|) for Cauchy disorder on U = 0.
struct CauchyOracleResult {
    std::vector<CurveRecord> records;  // value: Monte Carlo gamma; metadata: closed_form, z_score, pass
    double pass_fraction = 0.0;
    bool passed = false;
};
double cauchy_closed_form_gamma(int branching, double energy, double eta, double lambda, double sigma);
CauchyOracleResult run_cauchy_oracle(const ExperimentConfig& cfg);

// iid pools versus radial chains at the same distribution and lambda.
struct ModeSummary {
    LyapunovEstimate lyapunov;
    MeanEstimate width;  // delta(Im Gamma, width_alpha) with batch error
};
struct RadialContrastPoint {
    double energy = 0.0;
    ModeSummary iid;
    ModeSummary radial;
    bool lyapunov_agree = false;    // |gamma_iid - gamma_rad| <= 3 combined SE
    bool widths_separated = false;  // delta_rad - delta_iid >= 2 combined SE
};
struct RadialContrastResult {
    std::vector<RadialContrastPoint> points;
    std::vector<CurveRecord> iid_records;
    std::vector<CurveRecord> radial_records;
    bool passed = false;
};
RadialContrastResult run_radial_contrast(const ExperimentConfig& cfg);

// Fluctuation, Kotani-type and tail bounds over the (lambda, eta, E) schedule.
struct FluctuationPoint {
    double lambda = 0.0;
    double eta = 0.0;
    double energy = 0.0;
    LyapunovEstimate lyapunov;
    EquilibrationDiagnostics equilibration;
    std::vector<CheckReport> reports;
};
struct FluctuationSuiteResult {
    std::vector<FluctuationPoint> points;
    std::vector<CheckReport> tail_reports;  // one per (lambda, eta)
    std::vector<CurveRecord> margins;
    bool all_passed = true;
};
FluctuationSuiteResult run_fluctuation_suite(const ExperimentConfig& cfg);

// Band set of the unperturbed background over the energy grid range.
BandSet background_bands(const ExperimentConfig& cfg);

// Seed for one (lambda, E, eta) cell, independent of grid order.
std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t experiment_tag, double lambda, double energy, double eta);

// Equilibrated pools at (lambda, E + i eta); `seed` is a cell seed.
Equilibrated<PoolEnsemble> equilibrated_pools(const ExperimentConfig& cfg, double lambda, double energy, double eta,
                                              std::uint64_t seed);

// Continues the ensemble for cfg.sample_generations generations and calls
// observe(ensemble) after each one. Returns the final ensemble.
PoolEnsemble run_generations(const ExperimentConfig& cfg, PoolEnsemble ensemble, double lambda, std::uint64_t seed,
                             const std::function<void(const PoolEnsemble&)>& observe);

}  // namespace treelab
