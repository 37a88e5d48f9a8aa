#include "lossq/service.hpp"

#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "lossq/error.hpp"

namespace lossq {
namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Integral of x^n e^{-sx} over [0, c].
double truncated_power_exp(int n, double c, double s) {
    if (c <= 0.0) return 0.0;
    const double x = s * c;
    if (x <= 600.0) {
        // c^{n+1} e^{-x} sum_j x^j / ((n+1)(n+2)...(n+1+j)); all terms positive.
        double term = 1.0 / (n + 1);
        double sum = term;
        for (int j = 1; j < 100000; ++j) {
            term *= x / (n + 1 + j);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return std::pow(c, n + 1) * std::exp(-x) * sum;
    }
    return std::exp(std::lgamma(n + 1.0) - (n + 1) * std::log(s)) * boost::math::gamma_p(n + 1.0, x);
}

}  // namespace

const char* to_string(ServiceKind kind) {
    switch (kind) {
        case ServiceKind::deterministic: return "deterministic";
        case ServiceKind::exponential: return "exponential";
        case ServiceKind::erlang: return "erlang";
        case ServiceKind::hyperexponential: return "hyperexponential";
        case ServiceKind::uniform: return "uniform";
    }
    return "?";
}

ServiceDistribution ServiceDistribution::deterministic(double mean) {
    if (!positive_finite(mean))
        throw ValidationError("deterministic service needs mean > 0 (a point mass at 0 is degenerate)");
    ServiceDistribution d;
    d.kind_ = ServiceKind::deterministic;
    d.mean_ = mean;
    return d;
}

ServiceDistribution ServiceDistribution::exponential(double mean) {
    if (!positive_finite(mean)) throw ValidationError("exponential service needs mean > 0");
    ServiceDistribution d;
    d.kind_ = ServiceKind::exponential;
    d.mean_ = mean;
    return d;
}

ServiceDistribution ServiceDistribution::erlang(int shape, double mean) {
    if (shape < 1) throw ValidationError("erlang shape must be >= 1");
    if (!positive_finite(mean)) throw ValidationError("erlang service needs mean > 0");
    ServiceDistribution d;
    d.kind_ = ServiceKind::erlang;
    d.shape_ = shape;
    d.mean_ = mean;
    return d;
}

ServiceDistribution ServiceDistribution::hyperexponential(std::vector<HyperBranch> branches) {
    if (branches.empty()) throw ValidationError("hyperexponential needs at least one branch");
    double total = 0.0;
    double mean = 0.0;
    for (const auto& br : branches) {
        if (!(std::isfinite(br.weight) && br.weight >= 0.0))
            throw ValidationError("hyperexponential weights must be nonnegative");
        if (!positive_finite(br.mean)) throw ValidationError("hyperexponential branch means must be > 0");
        total += br.weight;
        mean += br.weight * br.mean;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("hyperexponential weights must sum to 1 (got " + fmt_double(total) + ")");
    ServiceDistribution d;
    d.kind_ = ServiceKind::hyperexponential;
    d.branches_ = std::move(branches);
    d.mean_ = mean;
    return d;
}

ServiceDistribution ServiceDistribution::uniform(double lo, double hi) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && hi > lo))
        throw ValidationError("uniform service needs 0 <= lo < hi");
    ServiceDistribution d;
    d.kind_ = ServiceKind::uniform;
    d.lo_ = lo;
    d.hi_ = hi;
    d.mean_ = 0.5 * (lo + hi);
    return d;
}

double ServiceDistribution::moment(int j) const {
    if (j < 0) throw DomainError("moment order must be >= 0");
    if (j == 0) return 1.0;
    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    switch (kind_) {
        case ServiceKind::deterministic: return std::pow(mean_, j);
        case ServiceKind::exponential: return fact * std::pow(mean_, j);
        case ServiceKind::erlang: {
            const double theta = mean_ / shape_;
            double m = 1.0;
            for (int i = 0; i < j; ++i) m *= theta * (shape_ + i);
            return m;
        }
        case ServiceKind::hyperexponential: {
            double m = 0.0;
            for (const auto& br : branches_) m += br.weight * fact * std::pow(br.mean, j);
            return m;
        }
        case ServiceKind::uniform:
            return (std::pow(hi_, j + 1) - std::pow(lo_, j + 1)) / ((j + 1) * (hi_ - lo_));
    }
    return 0.0;
}

ServiceDistribution ServiceDistribution::scaled(double factor) const {
    if (!positive_finite(factor)) throw ValidationError("scale factor must be > 0");
    switch (kind_) {
        case ServiceKind::deterministic: return deterministic(mean_ * factor);
        case ServiceKind::exponential: return exponential(mean_ * factor);
        case ServiceKind::erlang: return erlang(shape_, mean_ * factor);
        case ServiceKind::hyperexponential: {
            auto br = branches_;
            for (auto& b : br) b.mean *= factor;
            return hyperexponential(std::move(br));
        }
        case ServiceKind::uniform: return uniform(lo_ * factor, hi_ * factor);
    }
    return *this;
}

std::string ServiceDistribution::describe() const {
    std::string out = to_string(kind_);
    switch (kind_) {
        case ServiceKind::deterministic:
        case ServiceKind::exponential: out += " " + fmt_double(mean_); break;
        case ServiceKind::erlang: out += " " + std::to_string(shape_) + " " + fmt_double(mean_); break;
        case ServiceKind::hyperexponential:
            for (const auto& br : branches_) out += " " + fmt_double(br.weight) + ":" + fmt_double(br.mean);
            break;
        case ServiceKind::uniform: out += " " + fmt_double(lo_) + " " + fmt_double(hi_); break;
    }
    return out;
}

ServiceDistribution parse_service(const std::string& text) {
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    std::vector<std::string> args;
    for (std::string tok; is >> tok;) args.push_back(tok);

    auto number = [](const std::string& tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw ValidationError("expected a number, got '" + tok + "'");
        return v;
    };
    auto expect_args = [&](std::size_t n) {
        if (args.size() != n)
            throw ValidationError(kind + " expects " + std::to_string(n) + " parameter(s), got " +
                                  std::to_string(args.size()));
    };

    if (kind == "deterministic") {
        expect_args(1);
        return ServiceDistribution::deterministic(number(args[0]));
    }
    if (kind == "exponential") {
        expect_args(1);
        return ServiceDistribution::exponential(number(args[0]));
    }
    if (kind == "erlang") {
        expect_args(2);
        const double shape = number(args[0]);
        if (shape != std::floor(shape) || shape < 1 || shape > 1e6)
            throw ValidationError("erlang shape must be a positive integer");
        return ServiceDistribution::erlang(static_cast<int>(shape), number(args[1]));
    }
    if (kind == "hyperexponential") {
        if (args.empty()) throw ValidationError("hyperexponential expects weight:mean pairs");
        std::vector<HyperBranch> br;
        for (const auto& a : args) {
            const auto colon = a.find(':');
            if (colon == std::string::npos) throw ValidationError("expected weight:mean, got '" + a + "'");
            br.push_back({number(a.substr(0, colon)), number(a.substr(colon + 1))});
        }
        return ServiceDistribution::hyperexponential(std::move(br));
    }
    if (kind == "uniform") {
        expect_args(2);
        return ServiceDistribution::uniform(number(args[0]), number(args[1]));
    }
    throw ValidationError("unknown service kind '" + kind + "'");
}

double lst(const ServiceDistribution& dist, double s) {
    if (!(s >= 0.0)) throw DomainError("transform argument must be >= 0");
    const double b = dist.mean();
    switch (dist.kind()) {
        case ServiceKind::deterministic: return std::exp(-s * b);
        case ServiceKind::exponential: return 1.0 / (1.0 + b * s);
        case ServiceKind::erlang: {
            const double theta = b / dist.shape();
            return std::pow(1.0 + theta * s, -dist.shape());
        }
        case ServiceKind::hyperexponential: {
            double v = 0.0;
            for (const auto& br : dist.branches()) v += br.weight / (1.0 + br.mean * s);
            return v;
        }
        case ServiceKind::uniform: {
            if (s == 0.0) return 1.0;
            const double x = s * (dist.hi() - dist.lo());
            return std::exp(-s * dist.lo()) * (-std::expm1(-x)) / x;
        }
    }
    return 0.0;
}

double lst_deriv(const ServiceDistribution& dist, double s, int order) {
    if (!(s >= 0.0)) throw DomainError("transform argument must be >= 0");
    if (order < 1) throw DomainError("derivative order must be >= 1");
    if (order > kMaxLstOrder)
        throw UnsupportedError("no closed form for transform derivative of order " + std::to_string(order));
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    double fact = 1.0;
    for (int i = 2; i <= order; ++i) fact *= i;
    const double b = dist.mean();
    switch (dist.kind()) {
        case ServiceKind::deterministic: return sign * std::pow(b, order) * std::exp(-s * b);
        case ServiceKind::exponential: return sign * fact * std::pow(b, order) * std::pow(1.0 + b * s, -order - 1);
        case ServiceKind::erlang: {
            const int k = dist.shape();
            const double theta = b / k;
            double rising = 1.0;
            for (int i = 0; i < order; ++i) rising *= theta * (k + i);
            return sign * rising * std::pow(1.0 + theta * s, -k - order);
        }
        case ServiceKind::hyperexponential: {
            double v = 0.0;
            for (const auto& br : dist.branches())
                v += br.weight * fact * std::pow(br.mean, order) * std::pow(1.0 + br.mean * s, -order - 1);
            return sign * v;
        }
        case ServiceKind::uniform: {
            const double span = dist.hi() - dist.lo();
            return sign * (truncated_power_exp(order, dist.hi(), s) - truncated_power_exp(order, dist.lo(), s)) / span;
        }
    }
    return 0.0;
}

double offered_load(const ServiceDistribution& dist, double lambda) { return lambda * dist.mean(); }

TrafficMoments traffic_moments(const ServiceDistribution& dist, double lambda, int j_max) {
    if (!positive_finite(lambda)) throw ValidationError("arrival rate must be > 0");
    if (j_max < 2) throw ValidationError("j_max must be >= 2");
    TrafficMoments tm;
    tm.lambda = lambda;
    tm.rho_j.reserve(static_cast<std::size_t>(j_max));
    for (int j = 1; j <= j_max; ++j) tm.rho_j.push_back(std::pow(lambda, j) * dist.moment(j));
    tm.rho = tm.rho_j.front();
    return tm;
}

double pi_term(const ServiceDistribution& dist, double lambda, std::size_t i) {
    const double b = dist.mean();
    const double di = static_cast<double>(i);
    switch (dist.kind()) {
        case ServiceKind::deterministic:
            return boost::math::pdf(boost::math::poisson_distribution<double>(lambda * b), di);
        case ServiceKind::exponential: {
            const double x = lambda * b;
            return std::pow(x / (1.0 + x), di) / (1.0 + x);
        }
        case ServiceKind::erlang: {
            const double x = lambda * b / dist.shape();
            return boost::math::pdf(
                boost::math::negative_binomial_distribution<double>(dist.shape(), 1.0 / (1.0 + x)), di);
        }
        case ServiceKind::hyperexponential: {
            double v = 0.0;
            for (const auto& br : dist.branches()) {
                const double x = lambda * br.mean;
                v += br.weight * std::pow(x / (1.0 + x), di) / (1.0 + x);
            }
            return v;
        }
        case ServiceKind::uniform: {
            // (1/(lambda(hi-lo))) * [P(i+1, lambda hi) - P(i+1, lambda lo)], P the regularized lower gamma.
            const double a = di + 1.0;
            const double ylo = lambda * dist.lo();
            const double yhi = lambda * dist.hi();
            const double scale = lambda * (dist.hi() - dist.lo());
            const double p_hi = boost::math::gamma_p(a, yhi);
            if (p_hi < 0.5) {
                const double p_lo = ylo > 0.0 ? boost::math::gamma_p(a, ylo) : 0.0;
                return (p_hi - p_lo) / scale;
            }
            const double q_lo = ylo > 0.0 ? boost::math::gamma_q(a, ylo) : 1.0;
            return (q_lo - boost::math::gamma_q(a, yhi)) / scale;
        }
    }
    return 0.0;
}

PiVector pi_probs(const ServiceDistribution& dist, double lambda, double tail_tol, std::size_t min_terms) {
    if (!positive_finite(lambda)) throw ValidationError("arrival rate must be > 0");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ValidationError("tail_tol must lie in (0, 1)");
    if (min_terms > kPiHardCap) throw TruncationError("requested more pi terms than the hard cap");

    PiVector out;
    long double sum = 0.0L;
    for (std::size_t i = 0; i < kPiHardCap; ++i) {
        const double term = pi_term(dist, lambda, i);
        out.probs.push_back(term);
        sum += term;
        const double tail = std::max(0.0, static_cast<double>(1.0L - sum));
        if (tail <= tail_tol && out.probs.size() >= min_terms) {
            out.tail_mass = tail;
            return out;
        }
    }
    throw TruncationError("pi tail did not fall below " + fmt_double(tail_tol) + " within " +
                          std::to_string(kPiHardCap) + " terms");
}

}  // namespace lossq
