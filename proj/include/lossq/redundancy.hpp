#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lossq/asymptotics.hpp"
#include "lossq/packetization.hpp"
#include "lossq/service.hpp"

namespace lossq {

// P{more than recover_threshold of the l + k packets are corrupted}; the
// threshold defaults to k (any k losses are repairable).
double message_corruption_prob(double q, int l, int k, std::optional<int> recover_threshold = std::nullopt);

enum class Verdict { decrease, neutral, increase, requires_case_analysis };

const char* to_string(Verdict verdict);

// Base system (k = 0) plus the redundancy added on top of it. Adding k packets
// scales service times by (l + k) / l and every message's packet count by +k.
struct RedundancyScenario {
    double q = 0.0;
    int l = 1;
    int k = 0;
    std::optional<int> recover_threshold;
    double lambda = 1.0;
    ServiceDistribution service = ServiceDistribution::exponential(1.0);
    PacketLaw nu = PacketLaw::constant(1);
    int buffer = 1;
    RegimeOptions regime_options;

    // The same scenario with `extra` redundant packets.
    RegimeReport report_for(int extra) const;
    ServiceDistribution service_for(int extra) const;
    double corruption_for(int extra) const;
};

struct ScenarioResult {
    TrafficRegime before;
    TrafficRegime after;
    std::optional<double> loss_ratio;  // Pi_after / Pi_before
    Verdict verdict;
    std::string rule;
    // Mixed regimes: both heavy-traffic predictions for the after-system, unasserted.
    std::optional<double> after_prediction_c;
    std::optional<double> after_prediction_zero;
};

inline constexpr double kNeutralTol = 1e-9;

ScenarioResult scenario_eval(const RegimeReport& before, const RegimeReport& after);
ScenarioResult scenario_eval(const RedundancyScenario& scenario);

struct BreakEven {
    // (p - p~) - e^x/(e^x - 1) (eps~ - eps), x = 2C / rho2~: > 0 loss falls, < 0 loss rises.
    double gap;
    bool warning;  // eps~ <= eps: redundancy did not raise the load
};

BreakEven break_even_gap(double p, double p_breve, double eps, double eps_breve, double C, double rho2_tilde);

struct SweepRow {
    int k;
    double p_breve;
    double rho_breve;
    TrafficRegime regime;
    double pi_predicted;
    std::optional<double> pi_exact;
    Verdict verdict;  // against k = 0
};

struct SweepTable {
    std::vector<SweepRow> rows;
    int argmin_k;  // by exact Pi where every row has one, else by prediction
};

struct SweepOptions {
    bool exact = true;
    // Skip the exact route when zeta can exceed this many waiting places.
    int exact_capacity_limit = 20000;
};

SweepTable sweep(const RedundancyScenario& base, const std::vector<int>& k_range, const SweepOptions& opts = {});

}  // namespace lossq
