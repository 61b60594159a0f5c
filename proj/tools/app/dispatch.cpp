#include "app/dispatch.hpp"

#include <chrono>
#include <ctime>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "app/config.hpp"
#include "json.hpp"
#include "treelab/error.hpp"
#include "treelab/io.hpp"
#include "treelab/parallel.hpp"

namespace treelab::app {

namespace {

using nlohmann::ordered_json;

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void prepare_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
    // Fail before a long run rather than after it.
    const auto probe = dir / ".treelab_write_probe";
    write_text(probe, "");
    std::filesystem::remove(probe, ec);
}

class Outputs {
public:
    explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content) {
        write_text(dir_ / name, content);
        names_.push_back(name);
    }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> names_;
};

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json num(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

bool run_experiment(const ExperimentConfig& cfg, Outputs& out, std::ostringstream& summary) {
    const std::string& ex = cfg.experiment;
    if (ex == "bands") {
        const BandSet bands = ac_bands(cfg.potential.periodic_values, cfg.tree.branching(), cfg.energy_grid.e_min,
                                       cfg.energy_grid.e_max, std::max(100, cfg.energy_grid.points));
        out.write("bands.csv", bands_csv(bands));
        out.write("bands.json", bands_json(bands));
        summary << bands.intervals.size() << " band(s)";
        for (const auto& w : bands.warnings) summary << "\n" << w;
        return true;
    }
    if (ex == "dos") {
        const DosReport rep = run_dos_report(cfg);
        out.write("bands.csv", bands_csv(rep.bands));
        out.write("bands.json", bands_json(rep.bands));
        out.write("dos.csv", curve_csv(rep.dos));
        summary << rep.dos.size() << " DOS points, " << rep.bands.intervals.size() << " band(s)";
        return true;
    }
    if (ex == "continuity") {
        const ContinuityResult r = run_continuity_experiment(cfg);
        out.write("continuity.csv", curve_csv(r.curve));
        out.write("continuity_integrand.csv", curve_csv(r.integrand));
        ordered_json j;
        j["eta"] = r.eta;
        j["integration_window"] = {r.integration_window.lo, r.integration_window.hi};
        j["strictly_decreasing"] = r.strictly_decreasing;
        out.write("continuity.json", dump(j));
        summary << "L1 curve " << (r.strictly_decreasing ? "strictly decreasing" : "NOT strictly decreasing");
        return r.strictly_decreasing;
    }
    if (ex == "cauchy") {
        const CauchyOracleResult r = run_cauchy_oracle(cfg);
        out.write("cauchy.csv", curve_csv(r.records));
        ordered_json j;
        j["pass_fraction"] = r.pass_fraction;
        j["required_fraction"] = cfg.cauchy_pass_fraction;
        j["passed"] = r.passed;
        out.write("cauchy.json", dump(j));
        summary << "Cauchy oracle pass fraction " << r.pass_fraction;
        return r.passed;
    }
    if (ex == "radial_contrast") {
        const RadialContrastResult r = run_radial_contrast(cfg);
        std::vector<CurveRecord> all = r.iid_records;
        all.insert(all.end(), r.radial_records.begin(), r.radial_records.end());
        out.write("radial_contrast.csv", curve_csv(all));
        ordered_json j;
        j["passed"] = r.passed;
        j["points"] = ordered_json::array();
        for (const auto& p : r.points) {
            j["points"].push_back({{"energy", p.energy},
                                   {"gamma_iid", num(p.iid.lyapunov.gamma_mean)},
                                   {"gamma_radial", num(p.radial.lyapunov.gamma_mean)},
                                   {"width_iid", num(p.iid.width.mean)},
                                   {"width_radial", num(p.radial.width.mean)},
                                   {"lyapunov_agree", p.lyapunov_agree},
                                   {"widths_separated", p.widths_separated}});
        }
        out.write("radial_contrast.json", dump(j));
        summary << "radial contrast " << (r.passed ? "passed" : "FAILED");
        return r.passed;
    }
    if (ex == "fluctuation") {
        const FluctuationSuiteResult r = run_fluctuation_suite(cfg);
        out.write("fluctuation_margins.csv", curve_csv(r.margins));
        ordered_json j;
        j["all_passed"] = r.all_passed;
        j["points"] = ordered_json::array();
        for (const auto& p : r.points) {
            ordered_json reports = ordered_json::parse(reports_json(p.reports));
            j["points"].push_back({{"lambda", p.lambda},
                                   {"eta", p.eta},
                                   {"energy", p.energy},
                                   {"gamma", num(p.lyapunov.gamma_mean)},
                                   {"gamma_std_error", num(p.lyapunov.std_error)},
                                   {"equilibration_iterations", p.equilibration.iterations},
                                   {"equilibration_converged", p.equilibration.converged},
                                   {"reports", reports}});
        }
        j["tail_reports"] = ordered_json::parse(reports_json(r.tail_reports));
        out.write("fluctuation_reports.json", dump(j));
        std::size_t failed = 0;
        for (const auto& p : r.points)
            for (const auto& rep : p.reports) failed += rep.passed ? 0 : 1;
        for (const auto& t : r.tail_reports) failed += t.passed ? 0 : 1;
        summary << "fluctuation suite: " << failed << " failed check(s)";
        return r.all_passed;
    }
    throw ArgumentError("unknown experiment " + ex);
}

}  // namespace

const char* artifact_version() noexcept { return TREELAB_VERSION; }

std::string manifest_json(const RunManifest& m) {
    ordered_json j;
    j["config_digest"] = m.config_digest;
    j["seed"] = m.seed;
    j["experiment"] = m.experiment;
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["artifact_version"] = m.artifact_version;
    j["outputs"] = m.outputs;
    j["wall_time_seconds"] = m.wall_time_seconds;
    j["checks_passed"] = m.checks_passed;
    return dump(j);
}

DispatchResult dispatch(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                        const std::string& config_digest) {
    prepare_output_dir(out_dir);
    DispatchResult res;
    RunManifest& m = res.manifest;
    m.config_digest = config_digest;
    m.seed = cfg.seed;
    m.experiment = cfg.experiment;
    m.artifact_version = artifact_version();
    m.started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();

    Outputs outputs(out_dir);
    std::ostringstream summary;
    m.checks_passed = run_experiment(cfg, outputs, summary);

    m.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.finished = utc_now();
    m.outputs = outputs.names();
    m.outputs.push_back("manifest.json");
    write_text(out_dir / "manifest.json", manifest_json(m));
    res.exit_code = m.checks_passed ? kSuccess : kCheckFailed;
    res.summary = summary.str();
    return res;
}

int run_cli(int argc, char** argv) {
    CLI::App cli{"treelab: resolvents, cocycles and population dynamics on regular trees"};
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    cli.add_option("--config", config_path, "JSON experiment config")->required();
    cli.add_option("--out", out_dir, "output directory")->required();
    cli.add_option("--seed", seed, "overrides the config seed");
    cli.add_option("--threads", threads, "worker threads (speed only; results do not change)")
        ->check(CLI::NonNegativeNumber);
    cli.set_version_flag("--version", std::string(artifact_version()));
    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? kSuccess : kConfigError;
    }

    ExperimentConfig cfg;
    std::string digest;
    try {
        const std::string doc = read_text(config_path);
        cfg = parse_config(doc);
        digest = config_digest(doc);
    } catch (const SchemaError& e) {
        std::cerr << "treelab: config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        std::cerr << "treelab: " << e.what() << "\n";
        return kConfigError;
    }
    if (seed) cfg.seed = *seed;
    if (threads > 0) set_worker_count(threads);

    try {
        const DispatchResult r = dispatch(cfg, out_dir, digest);
        std::cout << r.summary << "\n";
        std::cout << "outputs written to " << out_dir << "\n";
        if (r.exit_code == kCheckFailed) std::cerr << "treelab: a check failed\n";
        return r.exit_code;
    } catch (const IoError& e) {
        std::cerr << "treelab: output error: " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        std::cerr << "treelab: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace treelab::app
