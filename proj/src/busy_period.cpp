#include "lossq/busy_period.hpp"

#include <algorithm>
#include <cmath>

#include "lossq/error.hpp"
#include "lossq/tauberian.hpp"

namespace lossq {
namespace {

void check_inputs(double lambda, double p) {
    if (!(std::isfinite(lambda) && lambda > 0.0)) throw ValidationError("arrival rate must be > 0");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("marking probability must lie in [0, 1]");
}

BusyPeriodCharacteristics from_busy_time(double e_t, double b, double rho, double p) {
    BusyPeriodCharacteristics c;
    c.p_mark = p;
    c.e_t = e_t;
    c.e_p = e_t / b;  // (lambda / rho) E T
    c.e_m = p * c.e_p;
    c.e_r = std::max(0.0, (rho - 1.0) * c.e_p + 1.0);
    return c;
}

}  // namespace

std::vector<BusyPeriodCharacteristics> fixed_characteristics_table(int max_capacity, double lambda,
                                                                   const ServiceDistribution& dist, double p) {
    check_inputs(lambda, p);
    if (max_capacity < 0) throw ValidationError("capacity must be >= 0");
    const double b = dist.mean();
    const double rho = offered_load(dist, lambda);

    // E T_K = sum_{j=0}^K pi_j E T_{K-j+1}, E T_0 = b; depth K needs pi_0..pi_K untruncated.
    const auto pi = pi_probs(dist, lambda, kDefaultTailTol, static_cast<std::size_t>(max_capacity) + 1);
    const auto kernel = KernelDistribution::from(pi);
    const auto sol = solve_q(kernel, b, static_cast<std::size_t>(std::max(max_capacity, 1)));

    std::vector<BusyPeriodCharacteristics> out;
    out.reserve(static_cast<std::size_t>(max_capacity) + 1);
    for (int k = 0; k <= max_capacity; ++k)
        out.push_back(from_busy_time(sol.value(static_cast<std::size_t>(k)), b, rho, p));
    return out;
}

BusyPeriodCharacteristics fixed_characteristics(int capacity, double lambda, const ServiceDistribution& dist,
                                                double p) {
    return fixed_characteristics_table(capacity, lambda, dist, p).back();
}

BusyPeriodCharacteristics mixture_characteristics(const ZetaPmf& zeta, double lambda,
                                                  const ServiceDistribution& dist, double p) {
    const auto table = fixed_characteristics_table(zeta.upper(), lambda, dist, p);
    BusyPeriodCharacteristics mix;
    mix.p_mark = p;
    for (int k = zeta.lower; k <= zeta.upper(); ++k) {
        const double w = zeta.prob(k);
        if (w == 0.0) continue;
        const auto& c = table[static_cast<std::size_t>(k)];
        mix.e_t += w * c.e_t;
        mix.e_p += w * c.e_p;
        mix.e_r += w * c.e_r;
    }
    mix.e_m = p * mix.e_p;
    return mix;
}

double loss_probability(const BusyPeriodCharacteristics& chars) {
    const double denom = chars.e_r + chars.e_p;
    if (!(denom > 0.0)) throw ValidationError("busy-period characteristics must have E R + E P > 0");
    if (std::isinf(denom))
        throw ValidationError("busy-period characteristics overflowed; loss probability needs finite values");
    return std::clamp((chars.e_r + chars.p_mark * chars.e_p) / denom, 0.0, 1.0);
}

}  // namespace lossq
