#include "lossq/redundancy.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "lossq/busy_period.hpp"
#include "lossq/error.hpp"

namespace lossq {
namespace {

bool overloaded(TrafficRegime r) {
    return r == TrafficRegime::supercritical || r == TrafficRegime::heavy_traffic_C ||
           r == TrafficRegime::heavy_traffic_zero;
}

Verdict verdict_from_ratio(double ratio) {
    if (ratio < 1.0 - kNeutralTol) return Verdict::decrease;
    if (ratio > 1.0 + kNeutralTol) return Verdict::increase;
    return Verdict::neutral;
}

// e^x / (e^x - 1)
double exp_ratio(double x) { return -1.0 / std::expm1(-x); }

}  // namespace

double message_corruption_prob(double q, int l, int k, std::optional<int> recover_threshold) {
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("packet corruption probability must lie in [0, 1]");
    if (l < 1) throw ValidationError("messages need at least one base packet");
    if (k < 0) throw ValidationError("redundant packet count must be >= 0");
    const int n = l + k;
    const int threshold = recover_threshold.value_or(k);
    if (threshold < 0) throw ValidationError("recover threshold must be >= 0");
    if (threshold >= n) return 0.0;
    if (q == 0.0) return 0.0;
    if (q == 1.0) return 1.0;
    const boost::math::binomial_distribution<double> bin(n, q);
    return boost::math::cdf(boost::math::complement(bin, static_cast<double>(threshold)));
}

const char* to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::decrease: return "decrease";
        case Verdict::neutral: return "neutral";
        case Verdict::increase: return "increase";
        case Verdict::requires_case_analysis: return "requires-case-analysis";
    }
    return "?";
}

ServiceDistribution RedundancyScenario::service_for(int extra) const {
    return service.scaled(static_cast<double>(l + extra) / l);
}

double RedundancyScenario::corruption_for(int extra) const {
    const int threshold = recover_threshold ? std::min(*recover_threshold, extra) : extra;
    return message_corruption_prob(q, l, extra, threshold);
}

RegimeReport RedundancyScenario::report_for(int extra) const {
    if (extra < 0) throw ValidationError("redundant packet count must be >= 0");
    const ZetaPmf zeta = zeta_pmf(nu.shifted(extra), buffer);
    return classify(lambda, service_for(extra), zeta, corruption_for(extra), regime_options);
}

ScenarioResult scenario_eval(const RegimeReport& before, const RegimeReport& after) {
    ScenarioResult out{before.regime, after.regime, std::nullopt, Verdict::neutral, {}, std::nullopt, std::nullopt};
    const bool over_before = overloaded(before.regime);
    const bool over_after = overloaded(after.regime);

    auto finish = [&](double pi_before, double pi_after) {
        if (pi_before > 0.0) {
            out.loss_ratio = pi_after / pi_before;
            out.verdict = verdict_from_ratio(*out.loss_ratio);
        } else {
            out.verdict = pi_after > 0.0 ? Verdict::increase : Verdict::neutral;
            if (pi_after == 0.0) out.loss_ratio = 1.0;
        }
        return out;
    };

    if (!over_before && !over_after) {
        out.rule = "both rho<=1: Pi -> p on each side";
        return finish(before.p, after.p);
    }
    if (over_before && over_after) {
        if (before.regime == TrafficRegime::heavy_traffic_C && after.regime == TrafficRegime::heavy_traffic_C) {
            out.rule = "both heavy traffic with C > 0";
            const double x = 2.0 * before.C / before.rho2;
            const double xb = 2.0 * after.C / after.rho2;
            const double ex = std::expm1(x), exb = std::expm1(xb);
            const double ratio = ex / exb * (exb * after.p + (exb + 1.0) * after.epsilon) /
                                 (ex * before.p + (ex + 1.0) * before.epsilon);
            out.loss_ratio = ratio;
            out.verdict = verdict_from_ratio(ratio);
            return out;
        }
        if (before.regime == TrafficRegime::heavy_traffic_zero && after.regime == TrafficRegime::heavy_traffic_zero) {
            out.rule = "both heavy traffic with C -> 0";
            return finish(before.p + before.rho2 / (2.0 * before.mean_zeta),
                          after.p + after.rho2 / (2.0 * after.mean_zeta));
        }
        out.rule = "both rho>1: Pi -> (p + rho - 1) / rho";
        return finish((before.p + before.rho - 1.0) / before.rho, (after.p + after.rho - 1.0) / after.rho);
    }

    out.rule = "mixed regimes: needs case analysis";
    out.verdict = Verdict::requires_case_analysis;
    if (over_after && after.epsilon > 0.0) {
        if (after.C > 0.0) out.after_prediction_c = after.p + exp_ratio(2.0 * after.C / after.rho2) * after.epsilon;
        if (after.mean_zeta > 0.0) out.after_prediction_zero = after.p + after.rho2 / (2.0 * after.mean_zeta);
    }
    return out;
}

ScenarioResult scenario_eval(const RedundancyScenario& scenario) {
    return scenario_eval(scenario.report_for(0), scenario.report_for(scenario.k));
}

BreakEven break_even_gap(double p, double p_breve, double eps, double eps_breve, double C, double rho2_tilde) {
    if (!(C > 0.0 && std::isfinite(C))) throw ValidationError("break-even analysis needs C > 0");
    if (!(rho2_tilde > 0.0 && std::isfinite(rho2_tilde))) throw ValidationError("rho2~ must be > 0");
    const double c = exp_ratio(2.0 * C / rho2_tilde);
    return {(p - p_breve) - c * (eps_breve - eps), !(eps_breve > eps)};
}

SweepTable sweep(const RedundancyScenario& base, const std::vector<int>& k_range, const SweepOptions& opts) {
    if (k_range.empty()) throw ValidationError("k range must not be empty");
    const RegimeReport before = base.report_for(0);
    SweepTable table;
    for (int k : k_range) {
        const RegimeReport rep = base.report_for(k);
        SweepRow row{k, rep.p, rep.rho, rep.regime, loss_asymptote(rep, rep.p).value, std::nullopt,
                     scenario_eval(before, rep).verdict};
        if (opts.exact) {
            const ZetaPmf zeta = zeta_pmf(base.nu.shifted(k), base.buffer);
            if (zeta.upper() <= opts.exact_capacity_limit) {
                try {
                    const auto chars = mixture_characteristics(zeta, base.lambda, base.service_for(k), rep.p);
                    row.pi_exact = loss_probability(chars);
                } catch (const ValidationError&) {
                    // overflowed; leave the exact column empty
                }
            }
        }
        table.rows.push_back(row);
    }
    const bool all_exact =
        std::all_of(table.rows.begin(), table.rows.end(), [](const SweepRow& r) { return r.pi_exact.has_value(); });
    auto key = [&](const SweepRow& r) { return all_exact ? *r.pi_exact : r.pi_predicted; };
    const auto best = std::min_element(table.rows.begin(), table.rows.end(), [&](const SweepRow& a, const SweepRow& b) {
        return key(a) < key(b) || (key(a) == key(b) && a.k < b.k);
    });
    table.argmin_k = best->k;
    return table;
}

}  // namespace lossq
