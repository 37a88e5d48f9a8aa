#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lossq {

enum class ServiceKind { deterministic, exponential, erlang, hyperexponential, uniform };

const char* to_string(ServiceKind kind);

// One exponential branch of a hyperexponential law.
struct HyperBranch {
    double weight;
    double mean;

    bool operator==(const HyperBranch&) const = default;
};

// Service-time law B(x). Immutable once constructed; factories validate parameters.
class ServiceDistribution {
public:
    static ServiceDistribution deterministic(double mean);
    static ServiceDistribution exponential(double mean);
    static ServiceDistribution erlang(int shape, double mean);
    static ServiceDistribution hyperexponential(std::vector<HyperBranch> branches);
    static ServiceDistribution uniform(double lo, double hi);

    ServiceKind kind() const noexcept { return kind_; }
    double mean() const noexcept { return mean_; }

    // Erlang stage count (1 for other kinds).
    int shape() const noexcept { return shape_; }
    std::span<const HyperBranch> branches() const noexcept { return branches_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    // Raw moment E[X^j], j >= 0.
    double moment(int j) const;

    // Same family with every service time multiplied by factor > 0.
    ServiceDistribution scaled(double factor) const;

    // Canonical "kind params..." text, parseable by parse_service().
    std::string describe() const;

    bool operator==(const ServiceDistribution&) const = default;

private:
    ServiceDistribution() = default;

    ServiceKind kind_ = ServiceKind::exponential;
    double mean_ = 1.0;
    int shape_ = 1;
    std::vector<HyperBranch> branches_;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

// Parses "kind p1 p2 ..." as produced by describe():
//   deterministic <mean> | exponential <mean> | erlang <shape> <mean>
//   hyperexponential <w:mean> <w:mean> ... | uniform <lo> <hi>
ServiceDistribution parse_service(const std::string& text);

// Laplace-Stieltjes transform beta(s) = E exp(-sX), s >= 0.
double lst(const ServiceDistribution& dist, double s);

// order-th derivative of beta at s, i.e. E[(-X)^order exp(-sX)].
double lst_deriv(const ServiceDistribution& dist, double s, int order);

// Highest derivative order with a closed form (factorials past this overflow).
inline constexpr int kMaxLstOrder = 170;

double offered_load(const ServiceDistribution& dist, double lambda);

struct TrafficMoments {
    double lambda = 0.0;
    double rho = 0.0;
    // rho_j[j-1] = lambda^j E[X^j], j = 1..j_max.
    std::vector<double> rho_j;

    double rho_at(int j) const { return rho_j.at(static_cast<std::size_t>(j - 1)); }
};

TrafficMoments traffic_moments(const ServiceDistribution& dist, double lambda, int j_max);

// pi_i = P{i Poisson(lambda) arrivals during one service}, truncated once the
// residual mass drops to tail_tol.
struct PiVector {
    std::vector<double> probs;
    double tail_mass = 0.0;
};

inline constexpr double kDefaultTailTol = 1e-12;
inline constexpr std::size_t kPiHardCap = 1'000'000;

// min_terms forces at least that many entries even when the tail is already
// below tolerance (recurrences of depth K need pi_0..pi_K exactly).
PiVector pi_probs(const ServiceDistribution& dist, double lambda, double tail_tol = kDefaultTailTol,
                  std::size_t min_terms = 0);

// Closed-form single pi_i, no truncation.
double pi_term(const ServiceDistribution& dist, double lambda, std::size_t i);

}  // namespace lossq
