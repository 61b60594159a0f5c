#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "treelab/error.hpp"
#include "treelab/experiments.hpp"
#include "treelab/io.hpp"
#include "treelab/parallel.hpp"

using namespace treelab;

namespace {

ExperimentConfig small(const std::string& name) {
    ExperimentConfig cfg;
    cfg.experiment = name;
    cfg.pool_size = 2000;
    cfg.equilibration = {400, 0.05, 40, 1};
    cfg.sample_generations = 40;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("energy grid") {
    EnergyGrid g{-1.0, 1.0, 5};
    CHECK(g.values() == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
    EnergyGrid one{0.3, 2.0, 1};
    CHECK(one.values() == std::vector<double>{0.3});
}

TEST_CASE("free density of states") {
    ExperimentConfig cfg = small("dos");
    cfg.energy_grid = {-4.0, 4.0, 81};
    const DosReport r = run_dos_report(cfg);
    REQUIRE(r.dos.size() == 81);
    REQUIRE(r.bands.intervals.size() == 1);
    const auto& centre = r.dos[40];
    CHECK(centre.abscissa == 0.0);
    CHECK(centre.value == doctest::Approx(1.0 / (std::numbers::pi * std::sqrt(2.0))).epsilon(1e-12));
    CHECK(centre.value == doctest::Approx(0.2250791).epsilon(1e-6));
    CHECK(centre.std_error == 0.0);
    CHECK(centre.metadata.at("in_band") == "1");
    CHECK(r.dos[0].value == 0.0);
    CHECK(r.dos[0].metadata.at("in_band") == "0");
    for (std::size_t i = 0; i < 81; ++i) CHECK(std::abs(r.dos[i].value - r.dos[80 - i].value) < 1e-10);
}

TEST_CASE("disordered density of states is positive in the band") {
    ExperimentConfig cfg = small("dos");
    cfg.energy_grid = {-1.0, 1.0, 3};
    cfg.potential.disorder.distribution = UniformDist{-1.0, 1.0};
    cfg.potential.coupling = 0.3;
    cfg.eta_schedule = {1e-2};
    const DosReport r = run_dos_report(cfg);
    REQUIRE(r.dos.size() == 3);
    for (const auto& rec : r.dos) {
        CHECK(rec.value > 0.1);
        CHECK(rec.std_error > 0.0);
        CHECK(rec.metadata.at("method") != "");
    }
}

TEST_CASE("continuity") {
    ExperimentConfig cfg = small("continuity");
    cfg.energy_grid = {-3.0, 3.0, 61};
    cfg.interval = Interval{-1.0, 1.0};
    cfg.potential.disorder.distribution = UniformDist{-1.0, 1.0};
    cfg.eta_schedule = {1e-2};
    cfg.lambda_schedule = {0.25};

    SUBCASE("lambda = 0 is exactly zero") {
        cfg.lambda_schedule = {0.4, 0.0};
        const ContinuityResult r = run_continuity_experiment(cfg);
        REQUIRE(r.curve.size() == 2);
        CHECK(r.curve[0].abscissa == 0.4);
        CHECK(r.curve[0].value > 0.0);
        CHECK(r.curve.back().abscissa == 0.0);
        CHECK(r.curve.back().value == 0.0);
        CHECK(r.curve.back().std_error == 0.0);
        CHECK(r.eta == 1e-2);
        CHECK(r.integration_window.lo > -1.0);
        CHECK(r.integration_window.hi < 1.0);
    }
    SUBCASE("more samples, smaller errors") {
        cfg.sample_generations = 100;
        cfg.pool_size = 2000;
        const double se_small = run_continuity_experiment(cfg).curve[0].std_error;
        cfg.pool_size = 8000;
        const double se_large = run_continuity_experiment(cfg).curve[0].std_error;
        MESSAGE("std_error N=2000: " << se_small << ", N=8000: " << se_large);
        CHECK(se_small / se_large == doctest::Approx(2.0).epsilon(0.3));
    }
    SUBCASE("interval must sit in one band") {
        cfg.interval = Interval{2.0, 3.5};
        CHECK_THROWS_AS(run_continuity_experiment(cfg), BandViolationError);
        cfg.interval.reset();
        CHECK_THROWS_AS(run_continuity_experiment(cfg), ArgumentError);
    }
}

TEST_CASE("Cauchy oracle") {
    ExperimentConfig cfg = small("cauchy");
    cfg.energy_grid = {-1.0, 1.0, 3};
    cfg.potential.disorder.distribution = CauchyDist{1.0};
    cfg.potential.coupling = 0.2;
    cfg.eta_schedule = {1e-2};
    cfg.pool_size = 20000;
    cfg.sample_generations = 100;
    const CauchyOracleResult r = run_cauchy_oracle(cfg);
    REQUIRE(r.records.size() == 3);
    for (const auto& rec : r.records) {
        const double exact = cauchy_closed_form_gamma(2, rec.abscissa, 1e-2, 0.2, 1.0);
        CHECK(std::stod(rec.metadata.at("closed_form")) == exact);
        CHECK(rec.std_error > 0.0);
        CHECK(std::abs(rec.value - exact) < 0.02);
    }
    CHECK(r.pass_fraction >= 0.0);

    // Closed form: positive in the band, vanishing with lambda and eta.
    for (double e : {-2.5, -1.0, 0.0, 1.7}) {
        CHECK(cauchy_closed_form_gamma(2, e, 0.0, 0.2, 1.0) > 0.0);
        CHECK(std::abs(cauchy_closed_form_gamma(2, e, 1e-9, 0.0, 1.0)) < 1e-8);
    }

    ExperimentConfig wrong = cfg;
    wrong.potential.disorder.distribution = UniformDist{-1.0, 1.0};
    CHECK_THROWS_AS(run_cauchy_oracle(wrong), ArgumentError);
    wrong = cfg;
    wrong.potential.coupling = 0.0;
    CHECK_THROWS_AS(run_cauchy_oracle(wrong), ArgumentError);
}

TEST_CASE("radial contrast without disorder collapses both modes") {
    ExperimentConfig cfg = small("radial_contrast");
    cfg.energy_grid = {0.5, 0.5, 1};
    cfg.potential.disorder.distribution = CauchyDist{1.0};
    cfg.potential.coupling = 0.0;
    cfg.eta_schedule = {1e-2};
    cfg.pool_size = 500;
    cfg.chain_steps = 20000;  // free chains converge at a rate of order eta
    const RadialContrastResult r = run_radial_contrast(cfg);
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].iid.width.mean == 0.0);
    CHECK(r.points[0].radial.width.mean == 0.0);
    CHECK(r.points[0].iid.lyapunov.gamma_mean == doctest::Approx(r.points[0].radial.lyapunov.gamma_mean).epsilon(1e-9));
    CHECK(r.iid_records.size() == 1);
    CHECK(r.radial_records[0].metadata.at("mode") == "radial");
}

TEST_CASE("fluctuation suite") {
    ExperimentConfig cfg = small("fluctuation");
    cfg.potential.disorder.distribution = UniformDist{-1.0, 1.0};
    cfg.energy_grid = {-0.5, 0.5, 3};
    cfg.eta_schedule = {1e-2};

    SUBCASE("empty schedule, empty report") {
        const FluctuationSuiteResult r = run_fluctuation_suite(cfg);
        CHECK(r.points.empty());
        CHECK(r.tail_reports.empty());
        CHECK(r.margins.empty());
        CHECK(r.all_passed);
    }
    SUBCASE("small schedule passes, a corrupted bound fails") {
        cfg.lambda_schedule = {0.3};
        const FluctuationSuiteResult r = run_fluctuation_suite(cfg);
        CHECK(r.points.size() == 3);
        CHECK(r.tail_reports.size() == 1);
        CHECK(r.all_passed);
        for (const auto& p : r.points) {
            CHECK(p.lyapunov.gamma_mean > 0.0);
            for (const auto& rep : p.reports) CHECK(rep.passed);
        }
        cfg.bound_scale = 1e-6;
        CHECK_FALSE(run_fluctuation_suite(cfg).all_passed);
    }
    SUBCASE("radial disorder is refused") {
        cfg.lambda_schedule = {0.3};
        cfg.potential.disorder.correlation = RadialCorrelation{};
        CHECK_THROWS_AS(run_fluctuation_suite(cfg), ArgumentError);
    }
}

TEST_CASE("experiments are reproducible across worker counts") {
    ExperimentConfig cfg = small("continuity");
    cfg.energy_grid = {-3.0, 3.0, 31};
    cfg.interval = Interval{-1.0, 1.0};
    cfg.potential.disorder.distribution = UniformDist{-1.0, 1.0};
    cfg.eta_schedule = {1e-2};
    cfg.lambda_schedule = {0.3, 0.1};
    set_worker_count(1);
    const std::string one = curve_csv(run_continuity_experiment(cfg).curve);
    set_worker_count(8);
    const std::string eight = curve_csv(run_continuity_experiment(cfg).curve);
    const std::string again = curve_csv(run_continuity_experiment(cfg).curve);
    set_worker_count(1);
    CHECK(one == eight);
    CHECK(eight == again);
    cfg.seed = 8;
    CHECK(curve_csv(run_continuity_experiment(cfg).curve) != one);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.alphas = {0.7};
    CHECK_THROWS_AS(cfg.validate(), AlphaRangeError);
    cfg = ExperimentConfig{};
    cfg.eta_schedule = {0.0};
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg = ExperimentConfig{};
    cfg.potential.periodic_values = {0.0, 1.0};
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}

}  // TEST_SUITE
