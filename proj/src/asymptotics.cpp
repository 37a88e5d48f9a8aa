#include "lossq/asymptotics.hpp"

#include <cmath>
#include <string>

#include "lossq/detail/fixed_point.hpp"
#include "lossq/error.hpp"
#include "lossq/tauberian.hpp"

namespace lossq {
namespace {

Regime load_regime(double rho) { return classify_load(rho); }

double exp_ratio(double x) {
    // e^x / (e^x - 1)
    return -1.0 / std::expm1(-x);
}

}  // namespace

const char* to_string(TrafficRegime regime) {
    switch (regime) {
        case TrafficRegime::subcritical: return "subcritical";
        case TrafficRegime::critical: return "critical";
        case TrafficRegime::supercritical: return "supercritical";
        case TrafficRegime::heavy_traffic_C: return "heavy_traffic_C";
        case TrafficRegime::heavy_traffic_zero: return "heavy_traffic_zero";
    }
    return "?";
}

PhiRoot phi_root(double lambda, const ServiceDistribution& dist) {
    if (!(std::isfinite(lambda) && lambda > 0.0)) throw ValidationError("arrival rate must be > 0");
    const double rho = offered_load(dist, lambda);
    if (load_regime(rho) != Regime::supercritical)
        throw RegimeError("phi root needs rho > 1 (got rho = " + std::to_string(rho) + ")");
    auto g = [&](double z) { return lst(dist, lambda - lambda * z); };
    auto dg = [&](double z) { return -lambda * lst_deriv(dist, lambda - lambda * z, 1); };
    const double phi = detail::least_fixed_point(g, dg);
    return {phi, 1.0 + lambda * lst_deriv(dist, lambda - lambda * phi, 1)};
}

RegimeReport classify(double lambda, const ServiceDistribution& dist, const ZetaPmf& zeta, double p,
                      const RegimeOptions& opts) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("marking probability must lie in [0, 1]");
    const auto tm = traffic_moments(dist, lambda, 3);
    RegimeReport rep;
    rep.lambda = lambda;
    rep.rho = tm.rho;
    rep.epsilon = tm.rho - 1.0;
    rep.mean_zeta = zeta.mean;
    rep.p = p;
    rep.rho2 = tm.rho_at(2);
    rep.rho3 = tm.rho_at(3);
    rep.flags.emplace_back(std::isfinite(rep.rho2) ? "rho2 finite" : "rho2 infinite");
    rep.flags.emplace_back(std::isfinite(rep.rho3) ? "rho3 finite (boundedness along N not checked)"
                                                   : "rho3 infinite");

    if (std::abs(rep.epsilon) < opts.critical_tol) {
        rep.regime = TrafficRegime::critical;
        return rep;
    }
    if (rep.epsilon < 0.0) {
        rep.regime = TrafficRegime::subcritical;
        return rep;
    }
    const auto root = phi_root(lambda, dist);
    rep.phi = root.phi;
    rep.slope = root.slope;
    rep.phi_generating = zeta.generating(root.phi);
    rep.C = rep.epsilon * rep.mean_zeta;
    rep.D = p / rep.epsilon;
    if (rep.epsilon <= opts.heavy_traffic_eps) {
        rep.regime = rep.C < opts.zero_c ? TrafficRegime::heavy_traffic_zero : TrafficRegime::heavy_traffic_C;
        rep.flags.emplace_back("C instantiated pointwise as eps * E zeta");
    } else {
        rep.regime = TrafficRegime::supercritical;
    }
    return rep;
}

Asymptote ep_asymptote(double lambda, const ServiceDistribution& dist, const ZetaPmf& zeta) {
    const auto tm = traffic_moments(dist, lambda, 3);
    switch (load_regime(tm.rho)) {
        case Regime::subcritical: return {1.0 / (1.0 - tm.rho), {}};
        case Regime::critical:
            return {2.0 / tm.rho_at(2) * zeta.mean,
                    {std::isfinite(tm.rho_at(3)) ? "O(log N) remainder" : "rho3 infinite: leading order only"}};
        case Regime::supercritical: {
            const auto root = phi_root(lambda, dist);
            return {1.0 / (zeta.generating(root.phi) * root.slope) + 1.0 / (1.0 - tm.rho), {"o(1) remainder"}};
        }
    }
    return {0.0, {}};
}

Asymptote er_asymptote(double lambda, const ServiceDistribution& dist, const ZetaPmf& zeta) {
    const double rho = offered_load(dist, lambda);
    switch (load_regime(rho)) {
        case Regime::subcritical: return {0.0, {"limit as N grows"}};
        case Regime::critical: return {1.0, {}};
        case Regime::supercritical: {
            const auto root = phi_root(lambda, dist);
            return {(rho - 1.0) / (zeta.generating(root.phi) * root.slope), {"o(1) remainder"}};
        }
    }
    return {0.0, {}};
}

HeavyTrafficPrediction heavy_traffic(double epsilon, double C, double rho2_tilde, std::optional<double> mean_zeta) {
    if (!(epsilon > 0.0)) throw RegimeError("heavy-traffic expansion needs eps > 0");
    if (!(C >= 0.0 && std::isfinite(C))) throw ValidationError("C must be finite and >= 0");
    if (!(rho2_tilde > 0.0 && std::isfinite(rho2_tilde))) throw ValidationError("rho2~ must be finite and > 0");
    HeavyTrafficPrediction out{};
    out.phi_expansion = 1.0 - 2.0 * epsilon / rho2_tilde;
    out.slope_expansion = epsilon;
    if (C > 0.0) {
        const double x = 2.0 * C / rho2_tilde;
        out.e_p = std::expm1(x) / epsilon;
        out.e_r = std::exp(x);
    } else {
        if (!mean_zeta) throw ValidationError("C = 0 heavy-traffic prediction needs E zeta");
        out.e_p = 2.0 / rho2_tilde * *mean_zeta;
        out.e_r = 1.0;
    }
    return out;
}

LossAsymptote loss_asymptote(const RegimeReport& report, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("marking probability must lie in [0, 1]");
    const double scale = std::max(1.0, p);
    if (std::abs(report.p - p) > 1e-15 * scale ||
        (report.epsilon > 0.0 && std::abs(report.D * report.epsilon - p) > 1e-12 * scale))
        throw ValidationError("inconsistent (D, p, eps): report was built for p = " + std::to_string(report.p));

    auto need_zeta = [&] {
        if (!(report.mean_zeta > 0.0)) throw ValidationError("this limit needs E zeta > 0");
    };

    switch (report.regime) {
        case TrafficRegime::subcritical: return {p, "rho<1: Pi -> p", {"limit as N grows"}};
        case TrafficRegime::critical:
            need_zeta();
            return {p + (1.0 - p) * report.rho2 / (2.0 * report.mean_zeta),
                    "rho=1: p + (1-p) rho2 / (2 E zeta)",
                    {"O(log N / N^2) remainder"}};
        case TrafficRegime::supercritical: {
            const double rho = report.rho;
            const double sg = *report.slope * *report.phi_generating;
            const double value = (p + rho - 1.0) / rho * ((rho - 1.0) + p * sg) / ((rho - 1.0) + sg);
            return {value, "rho>1: main term in E phi^zeta", {"o(E phi^zeta) remainder dropped"}};
        }
        case TrafficRegime::heavy_traffic_C: {
            const double c = exp_ratio(2.0 * report.C / report.rho2);
            LossAsymptote out{(report.D + c) * report.epsilon, "heavy traffic, eps E zeta -> C > 0", {}};
            if (report.D > 100.0) out.caveats.emplace_back("p/eps large: only p + O(eps) is asserted");
            out.caveats.emplace_back("o(eps) remainder");
            return out;
        }
        case TrafficRegime::heavy_traffic_zero:
            need_zeta();
            return {p + report.rho2 / (2.0 * report.mean_zeta),
                    "heavy traffic, eps E zeta -> 0: p + rho2 / (2 E zeta)",
                    {"o(1/N) remainder"}};
    }
    return {0.0, "?", {}};
}

CapacityIncrements fixed_capacity_increments(int n, double lambda, const ServiceDistribution& dist, double p) {
    if (n < 1) throw ValidationError("n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("marking probability must lie in [0, 1]");
    const auto tm = traffic_moments(dist, lambda, 2);
    if (load_regime(tm.rho) != Regime::critical)
        throw RegimeError("capacity increments need rho = 1 (got rho = " + std::to_string(tm.rho) + ")");
    if (!(lst(dist, lambda) - lambda * lst_deriv(dist, lambda, 1) < 1.0))
        throw ValidationError("service law is degenerate: pi_0 + pi_1 = 1");
    const double a = 2.0 / tm.rho_at(2);
    const double nd = n;
    const double num = a * (p - 1.0) / (nd * (nd + 1.0));
    return {a, num / ((a + 1.0 / (nd + 1.0)) * (a + 1.0 / nd))};
}

}  // namespace lossq
