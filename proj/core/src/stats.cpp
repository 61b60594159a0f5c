#include "treelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "treelab/error.hpp"

namespace treelab {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw ArgumentError("EmpiricalDistribution: no samples");
    for (double v : samples_) {
        if (!(v >= 0) || !std::isfinite(v)) {
            throw ArgumentError("EmpiricalDistribution: samples must be finite and >= 0");
        }
    }
    std::sort(samples_.begin(), samples_.end());
}

PositiveSample positive_part(std::span<const double> values) {
    PositiveSample out;
    out.values.reserve(values.size());
    for (double v : values) {
        if (v > 0) {
            out.values.push_back(v);
        } else {
            ++out.dropped;
        }
    }
    return out;
}

namespace {

void require_alpha(double alpha, const char* where) {
    if (!(alpha > 0 && alpha <= 0.5)) {
        throw AlphaRangeError(std::string(where) + ": alpha must lie in (0, 1/2], got " + std::to_string(alpha));
    }
}

// floor(alpha N), robust to alpha N landing a rounding error below an integer.
std::size_t floor_mass(double alpha, std::size_t n) {
    const double a = alpha * static_cast<double>(n);
    return static_cast<std::size_t>(std::floor(a + 1e-9 * std::max(1.0, a)));
}

}  // namespace

WidthStats quantile_brackets(const EmpiricalDistribution& dist, double alpha) {
    require_alpha(alpha, "quantile_brackets");
    const std::size_t n = dist.count();
    const std::size_t f = floor_mass(alpha, n);
    const std::size_t k = std::min(n, f + 1);
    const std::size_t m = std::max<std::size_t>(1, n - std::min(n, f));
    WidthStats w;
    w.alpha = alpha;
    w.xi_minus = dist.order_statistic(k);
    w.xi_plus = dist.order_statistic(m);
    // At alpha = 1/2 with even N the atomic brackets can cross (xi_- > xi_+);
    // that is a collapsed width.
    w.delta = w.xi_plus > 0 ? std::clamp(1.0 - w.xi_minus / w.xi_plus, 0.0, 1.0) : 0.0;
    return w;
}

double relative_width(std::span<const double> values, double alpha) {
    return quantile_brackets(EmpiricalDistribution(std::vector<double>(values.begin(), values.end())), alpha).delta;
}

double ks_distance_sorted(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ArgumentError("ks_distance: empty sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return ks_distance_sorted(sa, sb);
}

double ks_critical_value(std::size_t n, std::size_t m, double level) {
    const double c = std::sqrt(-0.5 * std::log(level / 2.0));
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    return c * std::sqrt((dn + dm) / (dn * dm));
}

CheckReport make_report(std::string name, double lhs, double rhs, std::size_t n, double tolerance) {
    CheckReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.passed = std::isfinite(lhs) && lhs <= rhs + tolerance;
    r.n = n;
    return r;
}

namespace {

constexpr double kRuleTolerance = 1e-12;

std::vector<double> mapped(std::span<const double> x, double (*f)(double, double), double p) {
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return f(v, p); });
    return out;
}

void require_positive(std::span<const double> x, const char* where) {
    if (x.empty()) throw ArgumentError(std::string(where) + ": empty sample");
    for (double v : x) {
        if (!(v > 0) || !std::isfinite(v)) throw ArgumentError(std::string(where) + ": values must be positive");
    }
}

}  // namespace

CheckReport check_alpha_monotonicity(std::span<const double> x, double alpha_1, double alpha_2) {
    require_alpha(alpha_1, "rule 1");
    require_alpha(alpha_2, "rule 1");
    if (alpha_1 < alpha_2) throw ArgumentError("rule 1: alpha_1 >= alpha_2 required");
    require_positive(x, "rule 1");
    EmpiricalDistribution dist(std::vector<double>(x.begin(), x.end()));
    auto r = make_report("alpha_monotonicity", quantile_brackets(dist, alpha_1).delta,
                         quantile_brackets(dist, alpha_2).delta, x.size(), kRuleTolerance);
    r.alpha = alpha_1;
    return r;
}

CheckReport check_shift(std::span<const double> x, double eta, double alpha) {
    require_alpha(alpha, "rule 2");
    if (!(eta >= 0)) throw ArgumentError("rule 2: shift must be >= 0");
    require_positive(x, "rule 2");
    const auto shifted = mapped(x, [](double v, double s) { return v + s; }, eta);
    auto r = make_report("shift", relative_width(shifted, alpha), relative_width(x, alpha), x.size(), kRuleTolerance);
    r.alpha = alpha;
    return r;
}

CheckReport check_inversion(std::span<const double> x, double alpha) {
    require_alpha(alpha, "rule 3");
    require_positive(x, "rule 3");
    const auto inverted = mapped(x, [](double v, double) { return 1.0 / v; }, 0.0);
    const double lhs = relative_width(inverted, alpha);
    const double rhs = relative_width(x, alpha);
    auto r = make_report("inversion", lhs, rhs, x.size());
    r.margin = -std::abs(lhs - rhs);
    r.passed = std::abs(lhs - rhs) <= kRuleTolerance;
    r.alpha = alpha;
    return r;
}

CheckReport check_product(std::span<const std::vector<double>> factors, std::span<const double> alphas) {
    if (factors.empty() || factors.size() != alphas.size()) {
        throw ArgumentError("rule 4: need one alpha per factor");
    }
    const std::size_t n = factors.front().size();
    double alpha_sum = 0.0;
    double rhs = 0.0;
    std::vector<double> product(n, 1.0);
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (factors[j].size() != n) throw ArgumentError("rule 4: factors must be jointly sampled");
        require_positive(factors[j], "rule 4");
        require_alpha(alphas[j], "rule 4");
        alpha_sum += alphas[j];
        rhs += relative_width(factors[j], alphas[j]);
        for (std::size_t i = 0; i < n; ++i) product[i] *= factors[j][i];
    }
    require_alpha(alpha_sum, "rule 4 (sum of alphas)");
    auto r = make_report("product", relative_width(product, alpha_sum), rhs, n, kRuleTolerance);
    r.alpha = alpha_sum;
    return r;
}

CheckReport check_iid_sum(std::span<const std::vector<double>> summands, double alpha) {
    if (summands.empty()) throw ArgumentError("rule 5: no summands");
    require_alpha(alpha, "rule 5");
    const double composite = alpha * static_cast<double>(summands.size());
    require_alpha(composite, "rule 5 (K alpha)");
    const std::size_t n = summands.front().size();
    std::vector<double> total(n, 0.0);
    double rhs = 0.0;
    for (const auto& s : summands) {
        if (s.size() != n) throw ArgumentError("rule 5: summands must be jointly sampled");
        require_positive(s, "rule 5");
        rhs = std::max(rhs, relative_width(s, alpha));
        for (std::size_t i = 0; i < n; ++i) total[i] += s[i];
    }
    auto r = make_report("iid_sum", relative_width(total, composite), rhs, n, kRuleTolerance);
    r.alpha = composite;
    return r;
}

std::vector<CheckReport> delta_rules_check(const DeltaRulesInput& input) {
    std::vector<CheckReport> out;
    out.push_back(check_alpha_monotonicity(input.x, input.alpha_larger, input.alpha));
    out.push_back(check_shift(input.x, input.shift, input.alpha));
    out.push_back(check_inversion(input.x, input.alpha));
    if (!input.factors.empty()) out.push_back(check_product(input.factors, input.factor_alphas));
    if (!input.summands.empty()) out.push_back(check_iid_sum(input.summands, input.sum_alpha));
    return out;
}

double jensen_boost_gap(std::span<const double> values) {
    const std::size_t k = values.size();
    if (k < 2) throw ArgumentError("jensen_boost_gap: K >= 2 required");
    double mean = 0.0;
    double mean_log = 0.0;
    for (double v : values) {
        if (!(v > 0)) throw ArgumentError("jensen_boost_gap: values must be positive");
        mean += v;
        mean_log += std::log(v);
    }
    mean /= static_cast<double>(k);
    mean_log /= static_cast<double>(k);
    double pairs = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            const double r = (values[i] - values[j]) / (values[i] + values[j]);
            pairs += r * r;
        }
    }
    const double kk = static_cast<double>(k);
    return std::log(mean) - mean_log - pairs / (2.0 * kk * (kk - 1.0));
}

LyapunovEstimate lyapunov_estimate(std::span<const GammaPool> pools, int branching) {
    if (pools.empty()) throw ArgumentError("lyapunov_estimate: no pools");
    const double log_root_k = 0.5 * std::log(static_cast<double>(branching));
    std::size_t n = 0;
    // Sums shifted by the first value keep the one-pass variance accurate.
    double shift = 0.0;
    double sum_re = 0.0;
    double sum_sq = 0.0;
    double sum_im = 0.0;
    for (const auto& pool : pools) {
        if (pool.samples.empty()) throw ArgumentError("lyapunov_estimate: empty pool");
        for (const cplx& g : pool.samples) {
            const double nrm = std::norm(g);
            if (nrm == 0.0) throw ZeroGammaError("lyapunov_estimate: Gamma = 0 sample");
            const double re = 0.5 * std::log(nrm) + log_root_k;
            if (n == 0) shift = re;
            const double d = re - shift;
            sum_re += d;
            sum_sq += d * d;
            sum_im += std::atan2(g.imag(), g.real());
            ++n;
        }
    }
    const double nd = static_cast<double>(n);
    const double mean_d = sum_re / nd;
    LyapunovEstimate est;
    est.w_mean = {shift + mean_d, sum_im / nd};
    est.gamma_mean = -est.w_mean.real();
    est.sample_count = n;
    if (n > 1) {
        const double var = std::max(0.0, (sum_sq - nd * mean_d * mean_d) / (nd - 1.0));
        est.std_error = std::sqrt(var / nd);
    }
    return est;
}

void LyapunovSeries::add(std::span<const GammaPool> pools) {
    const LyapunovEstimate e = lyapunov_estimate(pools, branching_);
    re_.push_back(e.w_mean.real());
    im_.push_back(e.w_mean.imag());
    samples_ += e.sample_count;
    last_error_ = e.std_error;
}

LyapunovEstimate LyapunovSeries::estimate(std::size_t batches) const {
    if (re_.empty()) throw ArgumentError("LyapunovSeries: no snapshots");
    const MeanEstimate re = batch_means(re_, batches);
    LyapunovEstimate est;
    est.w_mean = {re.mean, std::accumulate(im_.begin(), im_.end(), 0.0) / static_cast<double>(im_.size())};
    est.gamma_mean = -re.mean;
    est.sample_count = samples_;
    est.std_error = re_.size() == 1 ? last_error_ : re.std_error;
    return est;
}

MeanEstimate batch_means(std::span<const double> series, std::size_t batches) {
    if (series.empty()) throw ArgumentError("batch_means: empty series");
    const std::size_t n = series.size();
    MeanEstimate est;
    est.n = n;
    est.mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    if (n == 1) return est;
    const std::size_t b = std::clamp<std::size_t>(batches, 2, n);
    const std::size_t len = n / b;
    const std::size_t skip = n - b * len;
    std::vector<double> means(b, 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < len; ++j) means[i] += series[skip + i * len + j];
        means[i] /= static_cast<double>(len);
    }
    const double m = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(b);
    double ss = 0.0;
    for (double x : means) ss += (x - m) * (x - m);
    est.std_error = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
    return est;
}

FluctuationReport fluctuation_bound_check(std::span<const GammaPool> pools, double alpha, double kappa, double gamma,
                                          int branching, double rhs_scale) {
    require_alpha(alpha, "fluctuation_bound_check");
    if (!(kappa > 0 && kappa <= 1)) throw ArgumentError("fluctuation_bound_check: kappa must lie in (0, 1]");
    if (pools.empty()) throw ArgumentError("fluctuation_bound_check: no pools");

    FluctuationReport rep;
    double im_sq = 0.0;
    double mod = 0.0;
    std::size_t n = 0;
    for (const auto& pool : pools) {
        std::vector<double> im(pool.samples.size());
        std::vector<double> mod2(pool.samples.size());
        for (std::size_t i = 0; i < pool.samples.size(); ++i) {
            im[i] = pool.samples[i].imag();
            mod2[i] = std::norm(pool.samples[i]);
        }
        auto pos = positive_part(im);
        rep.dropped += pos.dropped;
        const double d_im = pos.values.empty() ? 0.0 : relative_width(pos.values, alpha);
        auto pos_mod = positive_part(mod2);
        const double d_mod = pos_mod.values.empty() ? 0.0 : relative_width(pos_mod.values, alpha);
        im_sq += d_im * d_im;
        mod += d_mod;
        n += pool.samples.size();
    }
    const double tau = static_cast<double>(pools.size());
    im_sq /= tau;
    mod /= tau;
    const double k1 = branching + 1.0;
    rep.im_width = make_report("imfoc1", im_sq, rhs_scale * 8.0 * gamma / (kappa * alpha * alpha), n);
    rep.modulus_width =
        make_report("imfoc2", mod * mod, rhs_scale * 32.0 * k1 * k1 * gamma / (kappa * alpha * alpha), n);
    for (auto* r : {&rep.im_width, &rep.modulus_width}) {
        r->alpha = alpha;
        r->kappa = kappa;
    }
    return rep;
}

double fractional_moment_budget(double s, double a, double b) {
    if (!(s > 0 && s < 1)) throw ArgumentError("fractional_moment_budget: 0 < s < 1 required");
    if (!(a < b)) throw ArgumentError("fractional_moment_budget: a < b required");
    return (std::abs(b - a) + 2.0 / (1.0 - s)) / std::cos(std::numbers::pi * s / 2.0);
}

double tail_fraction(std::span<const GammaPool> pools, double t) {
    std::size_t above = 0;
    std::size_t n = 0;
    for (const auto& pool : pools) {
        for (const cplx& g : pool.samples) {
            if (std::abs(g) > t) ++above;
        }
        n += pool.samples.size();
    }
    if (n == 0) throw ArgumentError("tail_fraction: no samples");
    return static_cast<double>(above) / static_cast<double>(n);
}

CheckReport tail_budget_check(std::span<const double> energies, std::span<const double> tail_fractions, double s,
                              double a, double b, double t, double rhs_scale) {
    if (!(t > 0)) throw ArgumentError("tail_budget_check: t > 0 required");
    if (energies.size() != tail_fractions.size()) throw ArgumentError("tail_budget_check: size mismatch");
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (energies[i] < a || energies[i] > b) throw ArgumentError("tail_budget_check: energy outside [a, b]");
        if (i > 0 && !(energies[i] > energies[i - 1])) throw ArgumentError("tail_budget_check: unsorted energies");
    }
    double integral = 0.0;
    for (std::size_t i = 1; i < energies.size(); ++i) {
        integral += 0.5 * (tail_fractions[i] + tail_fractions[i - 1]) * (energies[i] - energies[i - 1]);
    }
    auto r = make_report("tail_budget", integral, rhs_scale * fractional_moment_budget(s, a, b) / std::pow(t, s),
                         energies.size());
    return r;
}

CheckReport kotani_bound_check(std::span<const GammaPool> pools, double gamma, cplx z, int branching,
                               double rhs_scale) {
    const double eta = z.imag();
    if (!(eta > 0)) throw ArgumentError("kotani_bound_check: Im z > 0 required");
    if (pools.empty()) throw ArgumentError("kotani_bound_check: no pools");
    const double shift = eta / (2.0 * branching);
    double lhs = 0.0;
    std::size_t n = 0;
    for (const auto& pool : pools) {
        double s = 0.0;
        for (const cplx& g : pool.samples) s += 1.0 / (g.imag() + shift);
        lhs += s / static_cast<double>(pool.samples.size());
        n += pool.samples.size();
    }
    lhs /= static_cast<double>(pools.size());
    return make_report("kotani", lhs, rhs_scale * 2.0 * branching * gamma / eta, n);
}

MeanEstimate mean_estimate(std::span<const double> values) {
    MeanEstimate m;
    m.n = values.size();
    if (values.empty()) return m;
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(m.n);
    if (m.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.std_error = std::sqrt(ss / static_cast<double>(m.n - 1)) / std::sqrt(static_cast<double>(m.n));
    }
    return m;
}

MeanEstimate width_with_error(std::span<const double> values, double alpha, std::size_t batches) {
    if (batches < 2) throw ArgumentError("width_with_error: at least 2 batches");
    if (values.size() < 2 * batches) throw ArgumentError("width_with_error: too few samples for the batch count");
    MeanEstimate out;
    out.n = values.size();
    out.mean = relative_width(values, alpha);
    std::vector<double> per_batch(batches);
    const std::size_t size = values.size() / batches;
    for (std::size_t b = 0; b < batches; ++b) {
        per_batch[b] = relative_width(values.subspan(b * size, size), alpha);
    }
    const MeanEstimate spread = mean_estimate(per_batch);
    out.std_error = spread.std_error;
    return out;
}

}  // namespace treelab
