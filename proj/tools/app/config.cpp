#include "app/config.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "treelab/error.hpp"

namespace treelab::app {

namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

json parse_json(const std::string& document) {
    try {
        return json::parse(document);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path.empty() ? "$" : path, "expected an object");
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!allowed.count(k)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw SchemaError(join(path, k), "unknown field (expected one of: " + list + ")");
        }
    }
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

long long integer(const json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<long long>();
    if (j.is_number_float()) {
        const double d = j.get<double>();
        if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
    }
    throw SchemaError(path, "expected an integer");
}

std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> number_array(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>()};
    if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index_path(path, i)));
    return out;
}

double num_or(const json& obj, const char* key, double fallback, const std::string& path) {
    return obj.contains(key) ? number(obj.at(key), join(path, key)) : fallback;
}

long long int_or(const json& obj, const char* key, long long fallback, const std::string& path) {
    return obj.contains(key) ? integer(obj.at(key), join(path, key)) : fallback;
}

void strictly_decreasing(const std::vector<double>& v, const std::string& path) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) throw RangeError(index_path(path, i), "schedule must be strictly decreasing");
    }
}

Distribution parse_distribution(const json& j, const std::string& path) {
    require_object(j, path);
    if (!j.contains("type")) throw SchemaError(join(path, "type"), "missing distribution type");
    const std::string type = string(j.at("type"), join(path, "type"));
    if (type == "uniform") {
        allow_keys(j, path, {"type", "lo", "hi"});
        UniformDist d{num_or(j, "lo", -1.0, path), num_or(j, "hi", 1.0, path)};
        if (!(d.lo < d.hi)) throw RangeError(join(path, "hi"), "uniform needs lo < hi");
        return d;
    }
    if (type == "cauchy") {
        allow_keys(j, path, {"type", "scale"});
        CauchyDist d{num_or(j, "scale", 1.0, path)};
        if (!(d.scale > 0)) throw RangeError(join(path, "scale"), "cauchy scale must be > 0");
        return d;
    }
    if (type == "gaussian") {
        allow_keys(j, path, {"type", "mean", "sd"});
        GaussianDist d{num_or(j, "mean", 0.0, path), num_or(j, "sd", 1.0, path)};
        if (!(d.sd > 0)) throw RangeError(join(path, "sd"), "gaussian sd must be > 0");
        return d;
    }
    if (type == "bernoulli") {
        allow_keys(j, path, {"type", "p"});
        BernoulliDist d{num_or(j, "p", 0.5, path)};
        if (!(d.p >= 0 && d.p <= 1)) throw RangeError(join(path, "p"), "bernoulli p must lie in [0, 1]");
        return d;
    }
    if (type == "constant") {
        allow_keys(j, path, {"type", "value"});
        return ConstantDist{num_or(j, "value", 0.0, path)};
    }
    throw SchemaError(join(path, "type"),
                      "unknown distribution '" + type + "' (expected uniform, cauchy, gaussian, bernoulli, constant)");
}

Correlation parse_correlation(const json& j, const std::string& path) {
    if (j.is_string()) {
        const std::string t = j.get<std::string>();
        if (t == "iid") return IidCorrelation{};
        if (t == "radial") return RadialCorrelation{};
        throw SchemaError(path, "unknown correlation '" + t + "' (expected iid, radial, mixture)");
    }
    require_object(j, path);
    if (!j.contains("type")) throw SchemaError(join(path, "type"), "missing correlation type");
    const std::string type = string(j.at("type"), join(path, "type"));
    if (type == "iid" || type == "radial") {
        allow_keys(j, path, {"type"});
        return type == "iid" ? Correlation{IidCorrelation{}} : Correlation{RadialCorrelation{}};
    }
    if (type == "mixture") {
        allow_keys(j, path, {"type", "components"});
        const std::string cpath = join(path, "components");
        if (!j.contains("components") || !j.at("components").is_array() || j.at("components").empty()) {
            throw SchemaError(cpath, "mixture needs a nonempty components array");
        }
        MixtureOfIid m;
        for (std::size_t i = 0; i < j.at("components").size(); ++i) {
            const json& c = j.at("components")[i];
            const std::string p = index_path(cpath, i);
            require_object(c, p);
            allow_keys(c, p, {"distribution", "weight"});
            if (!c.contains("distribution")) throw SchemaError(join(p, "distribution"), "missing");
            MixtureComponent comp{parse_distribution(c.at("distribution"), join(p, "distribution")),
                                  num_or(c, "weight", 1.0, p)};
            if (!(comp.weight > 0)) throw RangeError(join(p, "weight"), "weight must be > 0");
            m.components.push_back(std::move(comp));
        }
        return m;
    }
    throw SchemaError(join(path, "type"), "unknown correlation '" + type + "' (expected iid, radial, mixture)");
}

DisorderSpec parse_disorder(const json& j, const std::string& path) {
    require_object(j, path);
    allow_keys(j, path, {"distribution", "correlation", "kappa"});
    DisorderSpec d;
    if (j.contains("distribution")) d.distribution = parse_distribution(j.at("distribution"), join(path, "distribution"));
    if (j.contains("correlation")) d.correlation = parse_correlation(j.at("correlation"), join(path, "correlation"));
    if (j.contains("kappa")) {
        const double k = number(j.at("kappa"), join(path, "kappa"));
        if (!(k > 0 && k <= 1)) throw RangeError(join(path, "kappa"), "kappa must lie in (0, 1]");
        d.declared_kappa = k;
    }
    return d;
}

}  // namespace

ExperimentConfig parse_config(const std::string& document) {
    const json root = parse_json(document);
    require_object(root, "");
    allow_keys(root, "", {"experiment", "tree", "potential", "energy_grid", "eta_schedule", "lambda_schedule",
                          "pool_size", "seed", "interval", "alpha", "width_alpha", "equilibration", "sampling", "tail",
                          "chain_steps", "cauchy_pass_fraction", "test_hooks"});
    ExperimentConfig cfg;

    if (!root.contains("experiment")) throw SchemaError("experiment", "missing experiment name");
    cfg.experiment = string(root.at("experiment"), "experiment");
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw SchemaError("experiment", "unknown experiment '" + cfg.experiment + "' (valid: " + list + ")");
    }

    // potential first: the period fixes the tree.
    if (!root.contains("potential")) throw SchemaError("potential", "missing potential");
    const json& pot = root.at("potential");
    require_object(pot, "potential");
    allow_keys(pot, "potential", {"u", "lambda", "disorder"});
    if (!pot.contains("u")) throw SchemaError("potential.u", "missing background values");
    cfg.potential.periodic_values = number_array(pot.at("u"), "potential.u");
    if (cfg.potential.periodic_values.empty()) throw RangeError("potential.u", "u needs at least one value");
    cfg.potential.coupling = num_or(pot, "lambda", 0.0, "potential");
    if (!(cfg.potential.coupling >= 0)) throw RangeError("potential.lambda", "lambda must be >= 0");
    if (pot.contains("disorder")) cfg.potential.disorder = parse_disorder(pot.at("disorder"), "potential.disorder");

    if (!root.contains("tree")) throw SchemaError("tree", "missing tree");
    const json& tree = root.at("tree");
    require_object(tree, "tree");
    allow_keys(tree, "tree", {"K", "depth"});
    if (!tree.contains("K")) throw SchemaError("tree.K", "missing branching number");
    const long long k = integer(tree.at("K"), "tree.K");
    if (k < 2) throw RangeError("tree.K", "branching number must satisfy K ≥ 2");
    if (k > 1'000'000) throw RangeError("tree.K", "branching number too large");
    const long long depth = int_or(tree, "depth", 0, "tree");
    if (depth < 0 || depth > 1'000'000) throw RangeError("tree.depth", "depth must satisfy 0 ≤ D");
    try {
        cfg.tree = TreeParams(static_cast<int>(k), static_cast<int>(depth), cfg.potential.period());
    } catch (const BudgetError& e) {
        throw RangeError("tree.depth", e.what());
    }

    if (root.contains("energy_grid")) {
        const json& g = root.at("energy_grid");
        require_object(g, "energy_grid");
        allow_keys(g, "energy_grid", {"e_min", "e_max", "points"});
        cfg.energy_grid.e_min = num_or(g, "e_min", cfg.energy_grid.e_min, "energy_grid");
        cfg.energy_grid.e_max = num_or(g, "e_max", cfg.energy_grid.e_max, "energy_grid");
        const long long pts = int_or(g, "points", cfg.energy_grid.points, "energy_grid");
        if (pts < 1 || pts > 10'000'000) throw RangeError("energy_grid.points", "points must lie in [1, 1e7]");
        cfg.energy_grid.points = static_cast<int>(pts);
        if (!(cfg.energy_grid.e_min <= cfg.energy_grid.e_max)) {
            throw RangeError("energy_grid.e_max", "e_min <= e_max required");
        }
    }

    if (root.contains("eta_schedule")) {
        cfg.eta_schedule = number_array(root.at("eta_schedule"), "eta_schedule");
        if (cfg.eta_schedule.empty()) throw RangeError("eta_schedule", "at least one eta required");
        for (std::size_t i = 0; i < cfg.eta_schedule.size(); ++i) {
            if (!(cfg.eta_schedule[i] > 0)) throw RangeError(index_path("eta_schedule", i), "eta must be > 0");
        }
        strictly_decreasing(cfg.eta_schedule, "eta_schedule");
    }
    if (root.contains("lambda_schedule")) {
        cfg.lambda_schedule = number_array(root.at("lambda_schedule"), "lambda_schedule");
        for (std::size_t i = 0; i < cfg.lambda_schedule.size(); ++i) {
            if (!(cfg.lambda_schedule[i] >= 0)) {
                throw RangeError(index_path("lambda_schedule", i), "lambda must be >= 0");
            }
        }
        strictly_decreasing(cfg.lambda_schedule, "lambda_schedule");
    }

    if (root.contains("pool_size")) {
        const long long n = integer(root.at("pool_size"), "pool_size");
        if (n < 1 || n > 100'000'000) throw RangeError("pool_size", "pool_size must lie in [1, 1e8]");
        cfg.pool_size = static_cast<std::size_t>(n);
    }
    if (root.contains("seed")) {
        const json& s = root.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            throw SchemaError("seed", "expected a nonnegative integer");
        }
        cfg.seed = s.get<std::uint64_t>();
    }

    if (root.contains("interval")) {
        const json& iv = root.at("interval");
        double lo = 0, hi = 0;
        if (iv.is_array()) {
            if (iv.size() != 2) throw SchemaError("interval", "expected [lo, hi]");
            lo = number(iv[0], "interval[0]");
            hi = number(iv[1], "interval[1]");
        } else {
            require_object(iv, "interval");
            allow_keys(iv, "interval", {"lo", "hi"});
            if (!iv.contains("lo") || !iv.contains("hi")) throw SchemaError("interval", "needs lo and hi");
            lo = number(iv.at("lo"), "interval.lo");
            hi = number(iv.at("hi"), "interval.hi");
        }
        if (!(lo < hi)) throw RangeError("interval", "lo < hi required");
        cfg.interval = Interval{lo, hi};
    }

    if (root.contains("alpha")) {
        cfg.alphas = number_array(root.at("alpha"), "alpha");
        if (cfg.alphas.empty()) throw RangeError("alpha", "at least one alpha required");
        for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
            if (!(cfg.alphas[i] > 0 && cfg.alphas[i] <= 0.5)) {
                throw RangeError(index_path("alpha", i), "alpha must lie in (0, 1/2]");
            }
        }
    }
    if (root.contains("width_alpha")) {
        cfg.width_alpha = number(root.at("width_alpha"), "width_alpha");
        if (!(cfg.width_alpha > 0 && cfg.width_alpha <= 0.5)) {
            throw RangeError("width_alpha", "alpha must lie in (0, 1/2]");
        }
    }

    if (root.contains("equilibration")) {
        const json& e = root.at("equilibration");
        require_object(e, "equilibration");
        allow_keys(e, "equilibration", {"max_iter", "ks_tol", "min_iter", "check_every"});
        auto& o = cfg.equilibration;
        o.max_iter = int_or(e, "max_iter", o.max_iter, "equilibration");
        o.ks_tol = num_or(e, "ks_tol", o.ks_tol, "equilibration");
        o.min_iter = int_or(e, "min_iter", o.min_iter, "equilibration");
        o.check_every = int_or(e, "check_every", o.check_every, "equilibration");
        if (o.max_iter < 1) throw RangeError("equilibration.max_iter", "max_iter must be >= 1");
        if (!(o.ks_tol > 0)) throw RangeError("equilibration.ks_tol", "ks_tol must be > 0");
        if (o.min_iter < 0) throw RangeError("equilibration.min_iter", "min_iter must be >= 0");
        if (o.check_every < 1) throw RangeError("equilibration.check_every", "check_every must be >= 1");
    }
    if (root.contains("sampling")) {
        const json& s = root.at("sampling");
        require_object(s, "sampling");
        allow_keys(s, "sampling", {"generations", "batches"});
        cfg.sample_generations = int_or(s, "generations", cfg.sample_generations, "sampling");
        const long long b = int_or(s, "batches", static_cast<long long>(cfg.error_batches), "sampling");
        if (cfg.sample_generations < 1) throw RangeError("sampling.generations", "generations must be >= 1");
        if (b < 2) throw RangeError("sampling.batches", "batches must be >= 2");
        cfg.error_batches = static_cast<std::size_t>(b);
    }
    if (root.contains("tail")) {
        const json& t = root.at("tail");
        require_object(t, "tail");
        allow_keys(t, "tail", {"s", "t"});
        cfg.tail_s = num_or(t, "s", cfg.tail_s, "tail");
        cfg.tail_t = num_or(t, "t", cfg.tail_t, "tail");
        if (!(cfg.tail_s > 0 && cfg.tail_s < 1)) throw RangeError("tail.s", "s must lie in (0, 1)");
        if (!(cfg.tail_t > 0)) throw RangeError("tail.t", "t must be > 0");
    }
    if (root.contains("chain_steps")) {
        cfg.chain_steps = integer(root.at("chain_steps"), "chain_steps");
        if (cfg.chain_steps < 1) throw RangeError("chain_steps", "chain_steps must be >= 1");
    }
    if (root.contains("cauchy_pass_fraction")) {
        cfg.cauchy_pass_fraction = number(root.at("cauchy_pass_fraction"), "cauchy_pass_fraction");
        if (!(cfg.cauchy_pass_fraction > 0 && cfg.cauchy_pass_fraction <= 1)) {
            throw RangeError("cauchy_pass_fraction", "must lie in (0, 1]");
        }
    }
    if (root.contains("test_hooks")) {
        const json& h = root.at("test_hooks");
        require_object(h, "test_hooks");
        allow_keys(h, "test_hooks", {"bound_scale"});
        cfg.bound_scale = num_or(h, "bound_scale", cfg.bound_scale, "test_hooks");
        if (!(cfg.bound_scale > 0)) throw RangeError("test_hooks.bound_scale", "bound_scale must be > 0");
    }

    if (cfg.experiment == "continuity" && !cfg.interval) {
        throw SchemaError("interval", "the continuity experiment needs an interval");
    }
    if (cfg.experiment == "fluctuation" || cfg.experiment == "continuity") {
        if (cfg.lambda_schedule.empty()) throw SchemaError("lambda_schedule", "this experiment needs lambda values");
    }
    try {
        cfg.validate();
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw RangeError("", e.what());
    }
    return cfg;
}

std::string config_digest(const std::string& document) {
    // nlohmann::json keeps object keys sorted.
    const std::string canonical = parse_json(document).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace treelab::app
