#include "lossq/tauberian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lossq/detail/fixed_point.hpp"
#include "lossq/error.hpp"

namespace lossq {

KernelDistribution KernelDistribution::from(std::vector<double> r, std::optional<double> tail_mass) {
    if (r.empty()) throw ValidationError("kernel needs at least r_0");
    long double sum = 0.0L;
    for (double v : r) {
        if (!(std::isfinite(v) && v >= 0.0)) throw ValidationError("kernel entries must be finite and >= 0");
        sum += v;
    }
    if (!(r[0] > 0.0)) throw ValidationError("kernel needs r_0 > 0");
    const double tail = tail_mass ? *tail_mass : std::max(0.0, static_cast<double>(1.0L - sum));
    if (!(tail >= 0.0)) throw ValidationError("kernel tail mass must be >= 0");
    if (std::abs(static_cast<double>(sum + tail - 1.0L)) > 1e-12)
        throw ValidationError("kernel mass plus tail must equal 1");
    return KernelDistribution{std::move(r), tail};
}

KernelDistribution KernelDistribution::from(const PiVector& pi) { return from(pi.probs, pi.tail_mass); }

double KernelDistribution::gf(double z) const {
    double v = 0.0;
    for (std::size_t i = r.size(); i-- > 0;) v = v * z + r[i];
    return v;
}

double KernelDistribution::gf_deriv(double z) const {
    double v = 0.0;
    for (std::size_t i = r.size(); i-- > 1;) v = v * z + static_cast<double>(i) * r[i];
    return v;
}

GammaMoments gamma_moments(const KernelDistribution& kernel) {
    long double g1 = 0.0L, g2 = 0.0L, g3 = 0.0L;
    for (std::size_t i = 1; i < kernel.r.size(); ++i) {
        const long double x = static_cast<long double>(i);
        const long double ri = kernel.r[i];
        g1 += x * ri;
        g2 += x * (x - 1) * ri;
        g3 += x * (x - 1) * (x - 2) * ri;
    }
    GammaMoments gm;
    gm.gamma_1 = static_cast<double>(g1);
    gm.gamma_2 = static_cast<double>(g2);
    gm.gamma_3 = static_cast<double>(g3);
    const double n = static_cast<double>(kernel.r.size());
    gm.tail_bound = {kernel.tail_mass * n, kernel.tail_mass * n * (n - 1), kernel.tail_mass * n * (n - 1) * (n - 2)};
    return gm;
}

const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::subcritical: return "subcritical";
        case Regime::critical: return "critical";
        case Regime::supercritical: return "supercritical";
    }
    return "?";
}

Regime classify_load(double gamma_1) {
    if (std::abs(gamma_1 - 1.0) < kCriticalTol) return Regime::critical;
    return gamma_1 < 1.0 ? Regime::subcritical : Regime::supercritical;
}

RecurrenceSolution::RecurrenceSolution(std::vector<double> scaled, std::vector<int> exponents)
    : scaled_(std::move(scaled)), exponents_(std::move(exponents)) {}

double RecurrenceSolution::value(std::size_t k) const { return std::ldexp(scaled_.at(k), exponents_.at(k)); }

double RecurrenceSolution::log_value(std::size_t k) const {
    return std::log(scaled_.at(k)) + exponents_.at(k) * std::numbers::ln2;
}

std::vector<double> RecurrenceSolution::values() const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = value(k);
    return out;
}

RecurrenceSolution solve_q(const KernelDistribution& kernel, double q0, std::size_t k_max) {
    if (k_max < 1) throw ValidationError("k_max must be >= 1");
    if (!(std::isfinite(q0) && q0 > 0.0)) throw ValidationError("seed Q_0 must be > 0");
    const double r0 = kernel.at(0);
    if (!(r0 >= kMinLeadingKernel)) throw IllConditionedError("kernel r_0 below 1e-14; forward recurrence unusable");

    constexpr int kRescaleBits = 900;
    const double rescale_at = std::ldexp(1.0, kRescaleBits);

    // work[k] = Q_k * 2^-exponent, a shared exponent for the whole window.
    std::vector<double> work(k_max + 1);
    std::vector<double> scaled(k_max + 1);
    std::vector<int> exps(k_max + 1, 0);
    int exponent = 0;
    work[0] = q0;
    scaled[0] = q0;

    const std::size_t depth = kernel.r.size();
    for (std::size_t k = 0; k < k_max; ++k) {
        // Q_k = r_0 Q_{k+1} + sum_{i=1}^k r_i Q_{k-i+1}
        double acc = work[k];
        const std::size_t top = std::min(k, depth - 1);
        for (std::size_t i = 1; i <= top; ++i) acc -= kernel.r[i] * work[k - i + 1];
        double next = acc / r0;
        if (std::abs(next) > rescale_at) {
            for (std::size_t j = 0; j <= k; ++j) work[j] = std::ldexp(work[j], -kRescaleBits);
            next = std::ldexp(next, -kRescaleBits);
            exponent += kRescaleBits;
        }
        work[k + 1] = next;
        scaled[k + 1] = next;
        exps[k + 1] = exponent;
    }
    return RecurrenceSolution(std::move(scaled), std::move(exps));
}

double least_root(const KernelDistribution& kernel) {
    const GammaMoments gm = gamma_moments(kernel);
    if (classify_load(gm.gamma_1) != Regime::supercritical)
        throw RegimeError("least root in (0,1) needs gamma_1 > 1 (got " + std::to_string(gm.gamma_1) + ")");
    return detail::least_fixed_point([&](double z) { return kernel.gf(z); },
                                     [&](double z) { return kernel.gf_deriv(z); });
}

Prediction predict(const KernelDistribution& kernel, double q0, std::size_t k) {
    if (!(std::isfinite(q0) && q0 > 0.0)) throw ValidationError("seed Q_0 must be > 0");
    const GammaMoments gm = gamma_moments(kernel);
    const double kd = static_cast<double>(k);
    Prediction out{classify_load(gm.gamma_1), 0.0, 0.0, std::nullopt, false, std::nullopt, std::nullopt};
    switch (out.regime) {
        case Regime::subcritical:
            out.value = q0 / (1.0 - gm.gamma_1);
            break;
        case Regime::critical:
            if (!(gm.gamma_2 > 0.0)) throw RegimeError("critical kernel with gamma_2 = 0 is degenerate");
            out.value = 2.0 * q0 * kd / gm.gamma_2;
            out.log_remainder = std::isfinite(gm.gamma_3);
            if (kernel.at(0) + kernel.at(1) < 1.0) out.increment = 2.0 * q0 / gm.gamma_2;
            break;
        case Regime::supercritical: {
            const double delta = least_root(kernel);
            const double lead = q0 / (1.0 - kernel.gf_deriv(delta));
            const double limit = q0 / (1.0 - gm.gamma_1);
            out.delta = delta;
            out.normalized = lead + limit * std::pow(delta, kd);
            out.value = lead * std::pow(delta, -kd) + limit;
            out.log_value = std::log(lead) - kd * std::log(delta);
            if (std::isfinite(out.value) && out.value > 0.0) out.log_value = std::log(out.value);
            return out;
        }
    }
    out.log_value = std::log(out.value);
    return out;
}

std::vector<double> critical_deviation(const RecurrenceSolution& sol, const KernelDistribution& kernel) {
    const GammaMoments gm = gamma_moments(kernel);
    if (classify_load(gm.gamma_1) != Regime::critical) throw RegimeError("critical_deviation needs gamma_1 = 1");
    if (!(gm.gamma_2 > 0.0)) throw RegimeError("critical kernel with gamma_2 = 0 is degenerate");
    const double q0 = sol.value(0);
    std::vector<double> dev(sol.size());
    for (std::size_t k = 0; k < sol.size(); ++k)
        dev[k] = sol.value(k) - 2.0 * q0 * static_cast<double>(k) / gm.gamma_2;
    return dev;
}

}  // namespace lossq
