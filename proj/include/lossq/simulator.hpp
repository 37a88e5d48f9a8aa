#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lossq/busy_period.hpp"
#include "lossq/packetization.hpp"
#include "lossq/rng.hpp"
#include "lossq/service.hpp"

namespace lossq {

// iid_per_arrival draws a fresh zeta for every arrival; fixed_per_run draws one
// zeta when a regeneration cycle starts and keeps it for the whole cycle.
enum class ZetaMode { iid_per_arrival, fixed_per_run };

const char* to_string(ZetaMode mode);
ZetaMode parse_zeta_mode(const std::string& text);

struct SimConfig {
    double lambda = 1.0;
    ServiceDistribution dist = ServiceDistribution::exponential(1.0);
    PacketLaw nu = PacketLaw::constant(1);
    int buffer = 1;  // N, in packets
    double p = 0.0;
    ZetaMode zeta_mode = ZetaMode::iid_per_arrival;
    std::int64_t n_busy_periods = 100000;  // per replication
    int replications = 1;
    std::uint64_t seed = 1;
    // 0: LOSSQ_THREADS if set, else hardware concurrency.
    unsigned threads = 0;
    std::int64_t event_cap = 1'000'000'000;  // per busy cycle
};

// Running sums over busy cycles; merge() is associative.
struct CycleSums {
    std::int64_t cycles = 0;
    long double t = 0, t2 = 0;
    long double p = 0, p2 = 0;
    long double m = 0, m2 = 0;
    long double r = 0, r2 = 0;
    long double a = 0, a2 = 0;
    long double l = 0, l2 = 0;
    long double la = 0, mp = 0, rp = 0;
    long double idle = 0, cycle_time = 0;
    // Cycles where arrivals != served + refused, or busy + idle != cycle length.
    std::int64_t conservation_violations = 0;

    void merge(const CycleSums& other);
};

struct SimEstimate {
    double e_t = 0, e_p = 0, e_m = 0, e_r = 0, pi_hat = 0;
    double se_t = 0, se_p = 0, se_m = 0, se_r = 0, se_pi = 0;
    std::int64_t n_cycles = 0;
    std::int64_t arrivals = 0, served = 0, refused = 0, marked = 0;
    double mean_idle = 0;
    std::int64_t conservation_violations = 0;
    CycleSums sums;
};

SimEstimate estimate_from(const CycleSums& sums);

struct SimResult {
    SimEstimate summary;
    std::vector<SimEstimate> replications;
};

// Runs all replications (concurrently where allowed) and pools them.
SimResult run(const SimConfig& config);

// One replication; deterministic in (config.seed, replication).
SimEstimate run_replication(const SimConfig& config, const ZetaPmf& zeta, std::uint32_t replication);

unsigned worker_count(const SimConfig& config);

struct RatioCheck {
    double value;
    double se;
};

// M/P against the marking probability.
RatioCheck wald_mark_ratio(const SimEstimate& est);
// Mean of R - ((rho - 1) P + 1) per cycle, zero in expectation.
RatioCheck wald_refusal_residual(const SimEstimate& est, double rho);

struct ComparisonEntry {
    std::string quantity;
    double simulated;
    double se;
    double analytic;
    double z;
};

struct ComparisonReport {
    std::array<ComparisonEntry, 5> entries;
    bool pass = false;
};

inline constexpr double kZThreshold = 3.0;

ComparisonReport compare(const SimEstimate& est, const BusyPeriodCharacteristics& analytic);

// z-scores between two independent estimates (e_t, e_p, e_r, pi).
std::array<double, 4> agreement_z(const SimEstimate& a, const SimEstimate& b);

}  // namespace lossq
