#include "lossq/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "lossq/error.hpp"

namespace lossq {
namespace {

double sample_service(const ServiceDistribution& dist, RandomStream& rng) {
    switch (dist.kind()) {
        case ServiceKind::deterministic: return dist.mean();
        case ServiceKind::exponential: return -dist.mean() * std::log(rng.uniform());
        case ServiceKind::erlang: {
            double log_sum = 0.0;
            for (int i = 0; i < dist.shape(); ++i) log_sum += std::log(rng.uniform());
            return -dist.mean() / dist.shape() * log_sum;
        }
        case ServiceKind::hyperexponential: {
            const double u = rng.uniform();
            double acc = 0.0;
            const auto branches = dist.branches();
            double mean = branches.back().mean;
            for (const auto& br : branches) {
                acc += br.weight;
                if (u < acc) {
                    mean = br.mean;
                    break;
                }
            }
            return -mean * std::log(rng.uniform());
        }
        case ServiceKind::uniform: return dist.lo() + (dist.hi() - dist.lo()) * rng.uniform();
    }
    return dist.mean();
}

class ZetaSampler {
public:
    explicit ZetaSampler(const ZetaPmf& zeta) : lower_(zeta.lower) {
        double acc = 0.0;
        for (double p : zeta.probs) {
            acc += p;
            cdf_.push_back(acc);
        }
        cdf_.back() = 1.0;
    }

    int operator()(RandomStream& rng) const {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return lower_ + static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(), std::ssize(cdf_) - 1));
    }

private:
    int lower_;
    std::vector<double> cdf_;
};

long double sq(long double x) { return x * x; }

// Sample variance from sums.
double variance(long double sum, long double sum2, std::int64_t n) {
    if (n < 2) return 0.0;
    const long double mean = sum / n;
    return static_cast<double>(std::max(0.0L, (sum2 - n * mean * mean) / (n - 1)));
}

double covariance(long double sx, long double sy, long double sxy, std::int64_t n) {
    if (n < 2) return 0.0;
    return static_cast<double>((sxy - sx * sy / n) / (n - 1));
}

}  // namespace

const char* to_string(ZetaMode mode) {
    return mode == ZetaMode::iid_per_arrival ? "iid_per_arrival" : "fixed_per_run";
}

ZetaMode parse_zeta_mode(const std::string& text) {
    if (text == "iid_per_arrival") return ZetaMode::iid_per_arrival;
    if (text == "fixed_per_run") return ZetaMode::fixed_per_run;
    throw ValidationError("unknown zeta mode '" + text + "' (iid_per_arrival | fixed_per_run)");
}

void CycleSums::merge(const CycleSums& o) {
    cycles += o.cycles;
    t += o.t, t2 += o.t2, p += o.p, p2 += o.p2, m += o.m, m2 += o.m2, r += o.r, r2 += o.r2;
    a += o.a, a2 += o.a2, l += o.l, l2 += o.l2, la += o.la, mp += o.mp, rp += o.rp;
    idle += o.idle, cycle_time += o.cycle_time;
    conservation_violations += o.conservation_violations;
}

SimEstimate estimate_from(const CycleSums& s) {
    SimEstimate e;
    e.sums = s;
    const std::int64_t n = s.cycles;
    e.n_cycles = n;
    if (n == 0) return e;
    const double rn = std::sqrt(static_cast<double>(n));
    e.e_t = static_cast<double>(s.t / n);
    e.e_p = static_cast<double>(s.p / n);
    e.e_m = static_cast<double>(s.m / n);
    e.e_r = static_cast<double>(s.r / n);
    e.se_t = std::sqrt(variance(s.t, s.t2, n)) / rn;
    e.se_p = std::sqrt(variance(s.p, s.p2, n)) / rn;
    e.se_m = std::sqrt(variance(s.m, s.m2, n)) / rn;
    e.se_r = std::sqrt(variance(s.r, s.r2, n)) / rn;
    // Renewal-reward ratio sum L / sum A, delta-method standard error.
    const double a_bar = static_cast<double>(s.a / n);
    e.pi_hat = static_cast<double>(s.l / s.a);
    const double var_l = variance(s.l, s.l2, n);
    const double var_a = variance(s.a, s.a2, n);
    const double cov_la = covariance(s.l, s.a, s.la, n);
    const double v = var_l - 2.0 * e.pi_hat * cov_la + e.pi_hat * e.pi_hat * var_a;
    e.se_pi = std::sqrt(std::max(0.0, v)) / (a_bar * rn);
    e.arrivals = static_cast<std::int64_t>(s.a);
    e.served = static_cast<std::int64_t>(s.p);
    e.refused = static_cast<std::int64_t>(s.r);
    e.marked = static_cast<std::int64_t>(s.m);
    e.mean_idle = static_cast<double>(s.idle / n);
    e.conservation_violations = s.conservation_violations;
    return e;
}

SimEstimate run_replication(const SimConfig& cfg, const ZetaPmf& zeta, std::uint32_t replication) {
    RandomStream arrivals(cfg.seed, replication, StreamRole::interarrival);
    RandomStream services(cfg.seed, replication, StreamRole::service);
    RandomStream zetas(cfg.seed, replication, StreamRole::zeta);
    RandomStream marks(cfg.seed, replication, StreamRole::marking);
    const ZetaSampler draw_zeta(zeta);
    const double mean_gap = 1.0 / cfg.lambda;
    const bool per_arrival = cfg.zeta_mode == ZetaMode::iid_per_arrival;

    CycleSums sums;
    for (std::int64_t c = 0; c < cfg.n_busy_periods; ++c) {
        // The cycle opens with an arrival to the empty system (always accepted).
        const int cycle_zeta = per_arrival ? 0 : draw_zeta(zetas);
        std::int64_t in_system = 1, arrived = 1, served = 0, marked = 0, refused = 0;
        if (marks.uniform() < cfg.p) ++marked;
        double now = 0.0;
        double next_arrival = -mean_gap * std::log(arrivals.uniform());
        double departure = sample_service(cfg.dist, services);
        std::int64_t events = 0;
        while (in_system > 0) {
            if (++events > cfg.event_cap)
                throw RunawayError("busy cycle exceeded " + std::to_string(cfg.event_cap) + " events");
            if (next_arrival < departure) {
                ++arrived;
                const int limit = per_arrival ? draw_zeta(zetas) : cycle_zeta;
                if (in_system <= limit) {
                    ++in_system;
                    if (marks.uniform() < cfg.p) ++marked;
                } else {
                    ++refused;
                }
                next_arrival += -mean_gap * std::log(arrivals.uniform());
            } else {
                now = departure;
                --in_system;
                ++served;
                if (in_system > 0) departure = now + sample_service(cfg.dist, services);
            }
        }
        const double busy = now;
        const double idle = next_arrival - busy;
        const double cycle = next_arrival;
        if (arrived != served + refused || std::abs(busy + idle - cycle) > 1e-9 * std::max(1.0, cycle))
            ++sums.conservation_violations;

        const long double T = busy, P = served, M = marked, R = refused, A = arrived, L = refused + marked;
        ++sums.cycles;
        sums.t += T, sums.t2 += sq(T);
        sums.p += P, sums.p2 += sq(P);
        sums.m += M, sums.m2 += sq(M);
        sums.r += R, sums.r2 += sq(R);
        sums.a += A, sums.a2 += sq(A);
        sums.l += L, sums.l2 += sq(L);
        sums.la += L * A, sums.mp += M * P, sums.rp += R * P;
        sums.idle += idle, sums.cycle_time += cycle;
    }
    return estimate_from(sums);
}

unsigned worker_count(const SimConfig& cfg) {
    unsigned n = cfg.threads;
    if (n == 0) {
        n = std::max(1u, std::thread::hardware_concurrency());
        if (const char* env = std::getenv("LOSSQ_THREADS")) {
            const long cap = std::strtol(env, nullptr, 10);
            if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
        }
    }
    return std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(std::max(1, cfg.replications))));
}

SimResult run(const SimConfig& cfg) {
    if (!(std::isfinite(cfg.lambda) && cfg.lambda > 0.0)) throw ValidationError("arrival rate must be > 0");
    if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw ValidationError("marking probability must lie in [0, 1]");
    if (cfg.n_busy_periods < 1) throw ValidationError("n_busy_periods must be >= 1");
    if (cfg.replications < 1) throw ValidationError("replications must be >= 1");
    if (cfg.event_cap < 1) throw ValidationError("event cap must be >= 1");
    const ZetaPmf zeta = zeta_pmf(cfg.nu, cfg.buffer);

    SimResult result;
    result.replications.resize(static_cast<std::size_t>(cfg.replications));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int rep = next++; rep < cfg.replications; rep = next++) {
            try {
                result.replications[static_cast<std::size_t>(rep)] =
                    run_replication(cfg, zeta, static_cast<std::uint32_t>(rep));
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned workers = worker_count(cfg);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    // Pool in replication order so the result does not depend on scheduling.
    CycleSums pooled;
    for (const auto& rep : result.replications) pooled.merge(rep.sums);
    result.summary = estimate_from(pooled);
    return result;
}

RatioCheck wald_mark_ratio(const SimEstimate& est) {
    const auto& s = est.sums;
    const std::int64_t n = s.cycles;
    if (n < 2 || s.p <= 0) throw ValidationError("mark ratio needs at least two cycles with service");
    const double ratio = static_cast<double>(s.m / s.p);
    const double p_bar = static_cast<double>(s.p / n);
    const double v = variance(s.m, s.m2, n) - 2.0 * ratio * covariance(s.m, s.p, s.mp, n) +
                     ratio * ratio * variance(s.p, s.p2, n);
    return {ratio, std::sqrt(std::max(0.0, v)) / (p_bar * std::sqrt(static_cast<double>(n)))};
}

RatioCheck wald_refusal_residual(const SimEstimate& est, double rho) {
    const auto& s = est.sums;
    const std::int64_t n = s.cycles;
    if (n < 2) throw ValidationError("refusal residual needs at least two cycles");
    const double k = rho - 1.0;
    const double mean = static_cast<double>((s.r - k * s.p) / n) - 1.0;
    const double v = variance(s.r, s.r2, n) + k * k * variance(s.p, s.p2, n) - 2.0 * k * covariance(s.r, s.p, s.rp, n);
    return {mean, std::sqrt(std::max(0.0, v) / static_cast<double>(n))};
}

ComparisonReport compare(const SimEstimate& est, const BusyPeriodCharacteristics& analytic) {
    ComparisonReport rep;
    rep.entries = {{
        {"e_t", est.e_t, est.se_t, analytic.e_t, 0.0},
        {"e_p", est.e_p, est.se_p, analytic.e_p, 0.0},
        {"e_m", est.e_m, est.se_m, analytic.e_m, 0.0},
        {"e_r", est.e_r, est.se_r, analytic.e_r, 0.0},
        {"pi", est.pi_hat, est.se_pi, loss_probability(analytic), 0.0},
    }};
    rep.pass = true;
    for (auto& e : rep.entries) {
        const double diff = e.simulated - e.analytic;
        if (e.se > 0.0) {
            e.z = diff / e.se;
        } else if (std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(e.analytic))) {
            e.z = 0.0;
        } else {
            throw ComparisonError("zero standard error for " + e.quantity + " but simulated " +
                                  std::to_string(e.simulated) + " != analytic " + std::to_string(e.analytic));
        }
        if (!(std::abs(e.z) <= kZThreshold)) rep.pass = false;
    }
    return rep;
}

std::array<double, 4> agreement_z(const SimEstimate& a, const SimEstimate& b) {
    auto z = [](double x, double sx, double y, double sy) {
        const double se = std::hypot(sx, sy);
        return se > 0.0 ? (x - y) / se : (x == y ? 0.0 : INFINITY);
    };
    return {z(a.e_t, a.se_t, b.e_t, b.se_t), z(a.e_p, a.se_p, b.e_p, b.se_p), z(a.e_r, a.se_r, b.e_r, b.se_r),
            z(a.pi_hat, a.se_pi, b.pi_hat, b.se_pi)};
}

}  // namespace lossq
