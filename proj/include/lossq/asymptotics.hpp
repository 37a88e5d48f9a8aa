#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lossq/packetization.hpp"
#include "lossq/service.hpp"

namespace lossq {

enum class TrafficRegime { subcritical, critical, supercritical, heavy_traffic_C, heavy_traffic_zero };

const char* to_string(TrafficRegime regime);

// phi: least root in (0,1) of z = beta(lambda - lambda z); slope = 1 + lambda beta'(lambda - lambda phi).
struct PhiRoot {
    double phi;
    double slope;
};

PhiRoot phi_root(double lambda, const ServiceDistribution& dist);

struct RegimeOptions {
    // |rho - 1| below this is critical.
    double critical_tol = 1e-9;
    // Overloads with rho - 1 <= heavy_traffic_eps are treated as heavy traffic.
    double heavy_traffic_eps = 0.1;
    // Heavy traffic with eps * E zeta below this uses the C -> 0 limit.
    double zero_c = 0.05;
};

struct RegimeReport {
    TrafficRegime regime = TrafficRegime::subcritical;
    double lambda = 0.0;
    double rho = 0.0;
    double epsilon = 0.0;  // rho - 1
    double mean_zeta = 0.0;
    double C = 0.0;  // epsilon * E zeta, the pointwise stand-in for the limit
    double D = 0.0;  // p / epsilon (0 unless overloaded)
    double p = 0.0;
    double rho2 = 0.0;
    double rho3 = 0.0;
    std::optional<double> phi;
    std::optional<double> slope;
    // E phi^zeta, exact from the zeta pmf.
    std::optional<double> phi_generating;
    // Moment conditions that were checked, plus modelling caveats.
    std::vector<std::string> flags;
};

RegimeReport classify(double lambda, const ServiceDistribution& dist, const ZetaPmf& zeta, double p,
                      const RegimeOptions& opts = {});

struct Asymptote {
    double value;
    std::vector<std::string> caveats;
};

// Limit of E P_zeta as the buffer grows, by load regime.
Asymptote ep_asymptote(double lambda, const ServiceDistribution& dist, const ZetaPmf& zeta);
// Limit of E R_zeta as the buffer grows, by load regime.
Asymptote er_asymptote(double lambda, const ServiceDistribution& dist, const ZetaPmf& zeta);

struct HeavyTrafficPrediction {
    double e_p;
    double e_r;
    double phi_expansion;    // 1 - 2 eps / rho2~
    double slope_expansion;  // eps
};

// C > 0 uses the exponential forms; C == 0 needs mean_zeta.
HeavyTrafficPrediction heavy_traffic(double epsilon, double C, double rho2_tilde,
                                     std::optional<double> mean_zeta = std::nullopt);

struct LossAsymptote {
    double value;
    std::string rule;  // which limit was applied
    std::vector<std::string> caveats;
};

LossAsymptote loss_asymptote(const RegimeReport& report, double p);

struct CapacityIncrements {
    double d_p;   // E P_{n+1} - E P_n
    double d_pi;  // Pi_{n+1} - Pi_n
};

// Critical load, fixed number of packets per message.
CapacityIncrements fixed_capacity_increments(int n, double lambda, const ServiceDistribution& dist, double p);

}  // namespace lossq
