#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "lossq/service.hpp"

namespace lossq {

// Nonnegative kernel r_0, r_1, ... of the recurrence Q_k = sum_{i=0}^k r_i Q_{k-i+1}.
// Entries past r.size() are treated as zero; their mass is tail_mass.
struct KernelDistribution {
    std::vector<double> r;
    double tail_mass = 0.0;

    // Validates r_0 > 0, nonnegativity and sum + tail = 1 (tail computed when omitted).
    static KernelDistribution from(std::vector<double> r, std::optional<double> tail_mass = std::nullopt);
    static KernelDistribution from(const PiVector& pi);

    double at(std::size_t i) const { return i < r.size() ? r[i] : 0.0; }
    // r(z) and its first two derivatives on [0,1], from the stored entries.
    double gf(double z) const;
    double gf_deriv(double z) const;
};

struct GammaMoments {
    double gamma_1 = 0.0;
    double gamma_2 = 0.0;
    double gamma_3 = 0.0;
    // Contribution of the truncated tail if its mass sat just past the last stored
    // index: a lower estimate of the error in each gamma_m.
    std::array<double, 3> tail_bound{};
};

GammaMoments gamma_moments(const KernelDistribution& kernel);

enum class Regime { subcritical, critical, supercritical };

const char* to_string(Regime regime);

inline constexpr double kCriticalTol = 1e-9;

// |x - 1| < kCriticalTol counts as critical.
Regime classify_load(double gamma_1);

// Q_0..Q_kmax. Values beyond double range are kept in log space; value(k) is
// +inf there while log_value(k) stays finite.
class RecurrenceSolution {
public:
    RecurrenceSolution(std::vector<double> scaled, std::vector<int> exponents);

    std::size_t size() const noexcept { return scaled_.size(); }
    double value(std::size_t k) const;
    double log_value(std::size_t k) const;
    std::vector<double> values() const;

private:
    // Q_k = scaled_[k] * 2^exponents_[k].
    std::vector<double> scaled_;
    std::vector<int> exponents_;
};

inline constexpr double kMinLeadingKernel = 1e-14;

RecurrenceSolution solve_q(const KernelDistribution& kernel, double q0, std::size_t k_max);

// Unique root of r(z) = z in (0,1); requires gamma_1 > 1.
double least_root(const KernelDistribution& kernel);

struct Prediction {
    Regime regime;
    // Predicted Q_k (may be +inf for large supercritical k).
    double value;
    double log_value;
    // Critical regime with r_0 + r_1 < 1: limiting increment Q_{k+1} - Q_k.
    std::optional<double> increment;
    // Critical regime: remainder is only O(log k) (gamma_3 finite).
    bool log_remainder = false;
    // Supercritical: root delta and the normalized prediction Q_k * delta^k.
    std::optional<double> delta;
    std::optional<double> normalized;
};

Prediction predict(const KernelDistribution& kernel, double q0, std::size_t k);

// Q_k - 2 Q_0 k / gamma_2 for a critical kernel; the O(log k) remainder is not pinned.
std::vector<double> critical_deviation(const RecurrenceSolution& sol, const KernelDistribution& kernel);

}  // namespace lossq
