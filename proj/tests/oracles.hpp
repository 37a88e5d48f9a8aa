#pragma once

// Reference implementations used only by the tests. Each one takes a different
// route from the library code it checks.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lossq/packetization.hpp"
#include "lossq/service.hpp"

namespace oracle {

// pi_i by adaptive quadrature of the defining integral against the density.
inline double pi_quadrature(const lossq::ServiceDistribution& d, double lambda, int i) {
    using lossq::ServiceKind;
    const double log_fact = std::lgamma(i + 1.0);
    auto poisson = [&](double x) {
        if (x <= 0.0) return i == 0 ? 1.0 : 0.0;
        return std::exp(-lambda * x + i * std::log(lambda * x) - log_fact);
    };
    std::function<double(double)> density;
    switch (d.kind()) {
        case ServiceKind::deterministic: return poisson(d.mean());
        case ServiceKind::exponential:
            density = [m = d.mean()](double x) { return std::exp(-x / m) / m; };
            break;
        case ServiceKind::erlang:
            density = [k = d.shape(), m = d.mean()](double x) {
                const double rate = k / m;
                if (x <= 0.0) return k == 1 ? rate : 0.0;
                return std::exp(k * std::log(rate) + (k - 1) * std::log(x) - rate * x - std::lgamma(k));
            };
            break;
        case ServiceKind::hyperexponential:
            density = [br = std::vector(d.branches().begin(), d.branches().end())](double x) {
                double s = 0.0;
                for (const auto& b : br) s += b.weight * std::exp(-x / b.mean) / b.mean;
                return s;
            };
            break;
        case ServiceKind::uniform: {
            auto f = [&](double x) { return poisson(x) / (d.hi() - d.lo()); };
            double err = 0.0;
            return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, d.lo(), d.hi(), 30, 1e-14, &err);
        }
    }
    // Split at the mode of the Poisson factor so the peak is resolved.
    auto g = [&](double x) { return poisson(x) * density(x); };
    const double split = std::max(1.0, i / lambda);
    double err = 0.0;
    const double head =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, split, 30, 1e-14, &err);
    boost::math::quadrature::exp_sinh<double> tail_rule;
    const double tail = tail_rule.integrate(g, split, std::numeric_limits<double>::infinity());
    return head + tail;
}

// P{zeta = m} by expanding every packet sequence until the buffer overflows.
inline std::map<int, double> zeta_enumeration(const lossq::PacketLaw& nu, int buffer) {
    std::map<int, double> out;
    const auto pairs = nu.pairs();
    std::function<void(int, int, double)> walk = [&](int used, int count, double prob) {
        for (const auto& [v, p] : pairs) {
            if (used + v > buffer)
                out[count] += prob * p;
            else
                walk(used + v, count + 1, prob * p);
        }
    };
    walk(0, 0, 1.0);
    return out;
}

// P{more than threshold of n packets corrupted} by enumerating all 2^n outcomes.
inline double corruption_enumeration(double q, int n, int threshold) {
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const int bad = __builtin_popcount(mask);
        if (bad > threshold) total += std::pow(q, bad) * std::pow(1.0 - q, n - bad);
    }
    return total;
}

struct ChainResult {
    double e_p;      // messages served per busy period
    double e_r;      // refusals per busy period
    double p_block;  // fraction of arrivals refused
};

// Departure-epoch Markov chain of the M/G/1 queue that holds at most
// capacity + 1 messages, solved as a dense linear system.
inline ChainResult embedded_chain(int capacity, double lambda, const lossq::ServiceDistribution& d) {
    const int n = capacity + 1;  // states 0..capacity left behind by a departure
    std::vector<long double> a;
    for (int j = 0; j <= n || (a.back() > 1e-24 && j < 100000); ++j) a.push_back(pi_quadrature(d, lambda, j));
    // Tail sums taken directly: 1 - sum(head) cancels once the tail is tiny.
    std::vector<long double> tail(a.size() + 1, 0.0L);
    for (std::size_t j = a.size(); j-- > 0;) tail[j] = tail[j + 1] + a[j];
    // Long double: pi_0 can be ~1e-7 here and a double solve only resolves it to eps / pi_0.
    using Matrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    Matrix P = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int base = std::max(i - 1, 0);
        for (int j = base; j < n - 1; ++j) P(i, j) = a[j - base];
        P(i, n - 1) = tail[n - 1 - base];
    }
    // Stationary vector: x (P - I) = 0 with sum x = 1.
    Matrix A = (P - Matrix::Identity(n, n)).transpose();
    A.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0L;
    const Vector x = A.fullPivLu().solve(rhs);
    const double rho = lossq::offered_load(d, lambda);
    const double pi0 = static_cast<double>(x(0));
    const double p_block = 1.0 - 1.0 / (pi0 + rho);
    const double e_p = 1.0 / pi0;
    return {e_p, e_p * p_block / (1.0 - p_block), p_block};
}

// All capacities 0..max_capacity at once: the departure-epoch distribution of
// the finite queue is the normalized head of the unbounded balance recursion.
// Refusals come from the blocking probability, not from the busy-period identity.
inline std::vector<ChainResult> departure_chain_table(int max_capacity, double lambda,
                                                      const lossq::ServiceDistribution& d) {
    const int n = max_capacity + 1;
    std::vector<long double> a(static_cast<std::size_t>(n) + 1), x(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) a[j] = pi_quadrature(d, lambda, j);
    x[0] = 1.0L;
    for (int j = 0; j + 1 < n; ++j) {
        // x_j = x_0 a_j + sum_{i=1}^{j+1} x_i a_{j-i+1}, solved for x_{j+1}.
        long double rest = x[0] * a[j];
        for (int i = 1; i <= j; ++i) rest += x[i] * a[j - i + 1];
        x[j + 1] = (x[j] - rest) / a[0];
    }
    const double rho = lossq::offered_load(d, lambda);
    std::vector<ChainResult> out;
    long double total = 0.0L;
    for (int k = 0; k <= max_capacity; ++k) {
        total += x[k];
        const double pi0 = static_cast<double>(x[0] / total);
        const double p_block = 1.0 - 1.0 / (pi0 + rho);
        const double e_p = 1.0 / pi0;
        out.push_back({e_p, e_p * p_block / (1.0 - p_block), p_block});
    }
    return out;
}

struct CtmcResult {
    double e_t, e_p, e_r;
};

// M/M/1 busy period when every arrival draws its own zeta from pmf: the
// arrival finding n messages is accepted with probability P{zeta >= n}.
inline CtmcResult mm1_iid_zeta(double lambda, double mu, const lossq::ZetaPmf& zeta) {
    const int top = zeta.upper() + 1;  // most messages that can be present
    auto accept = [&](int n) {
        double s = 0.0;
        for (int k = std::max(n, zeta.lower); k <= zeta.upper(); ++k) s += zeta.prob(k);
        return s;
    };
    // Unknowns: remaining expectations from states 1..top; first-step analysis.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(top, top);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(top, 3);
    for (int n = 1; n <= top; ++n) {
        const int row = n - 1;
        const double up = n < top ? lambda * accept(n) : 0.0;
        const double refuse = lambda - up;
        // Leave-rate form: (up + mu) v_n - up v_{n+1} - mu v_{n-1} = reward rate.
        A(row, row) = up + mu;
        if (n < top) A(row, row + 1) = -up;
        if (n > 1) A(row, row - 1) = -mu;
        B(row, 0) = 1.0;     // time
        B(row, 1) = mu;      // departures
        B(row, 2) = refuse;  // refusals
    }
    const Eigen::MatrixXd v = A.fullPivLu().solve(B);
    return {v(0, 0), v(0, 1), v(0, 2)};
}

}  // namespace oracle
