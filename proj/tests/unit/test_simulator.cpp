#include <cmath>
#include <cstdlib>
#include <set>

#include "doctest.h"
#include "lossq/busy_period.hpp"
#include "lossq/error.hpp"
#include "lossq/rng.hpp"
#include "lossq/simulator.hpp"
#include "oracles.hpp"

using namespace lossq;
using doctest::Approx;

namespace {

SimConfig mm1(double lambda, int buffer, double p, std::int64_t cycles) {
    SimConfig c;
    c.lambda = lambda;
    c.dist = ServiceDistribution::exponential(1.0);
    c.buffer = buffer;
    c.p = p;
    c.n_busy_periods = cycles;
    c.replications = 2;
    c.seed = 20240611;
    c.threads = 1;
    return c;
}

}  // namespace

TEST_CASE("philox known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("random streams are reproducible and distinct") {
    RandomStream a(7, 0, StreamRole::service), b(7, 0, StreamRole::service);
    RandomStream c(7, 1, StreamRole::service), d(7, 0, StreamRole::zeta), e(8, 0, StreamRole::service);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        CHECK(x == b());
        seen.insert(x);
        seen.insert(c());
        seen.insert(d());
        seen.insert(e());
    }
    CHECK(seen.size() == 4000);
    RandomStream u(1, 0, StreamRole::marking);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
        sum += v;
    }
    CHECK(sum / 100000 == Approx(0.5).epsilon(0.01));
}

TEST_CASE("simulate M/M/1 with four places matches 1/6") {
    auto cfg = mm1(1.0, 4, 0.0, 500000);
    const auto res = run(cfg);
    CHECK(res.summary.n_cycles == 1000000);
    CHECK(std::abs(res.summary.pi_hat - 1.0 / 6.0) <= 3.0 * res.summary.se_pi);
    CHECK(res.summary.marked == 0);
    CHECK(res.summary.e_m == 0.0);
    CHECK(res.summary.conservation_violations == 0);
    CHECK(res.summary.arrivals == res.summary.served + res.summary.refused);
    CHECK(res.summary.mean_idle == Approx(1.0).epsilon(0.01));
}

TEST_CASE("simulate M/M/1 at load two with one place") {
    const auto res = run(mm1(2.0, 1, 0.0, 200000));
    CHECK(std::abs(res.summary.e_r - 4.0) <= 3.0 * res.summary.se_r);
    CHECK(std::abs(res.summary.e_t - 3.0) <= 3.0 * res.summary.se_t);
}

TEST_CASE("compare examples") {
    SimEstimate est;
    est.e_t = 4, est.e_p = 4, est.e_m = 0.4, est.e_r = 1;
    est.pi_hat = loss_probability({4, 4, 0.4, 1, 0.1});
    est.se_t = est.se_p = est.se_m = est.se_r = est.se_pi = 1e-9;
    auto rep = compare(est, {4, 4, 0.4, 1, 0.1});
    CHECK(rep.pass);
    for (const auto& e : rep.entries) CHECK(e.z == 0.0);

    auto cfg = mm1(1.0, 3, 0.0, 500000);
    const auto res = run(cfg);
    CHECK(compare(res.summary, fixed_characteristics(3, 1.0, cfg.dist, 0.0)).pass);

    rep = compare(res.summary, fixed_characteristics(3, 1.3, cfg.dist, 0.0));
    CHECK(!rep.pass);
    double worst = 0.0;
    for (const auto& e : rep.entries) worst = std::max(worst, std::abs(e.z));
    CHECK(worst > 3.0);

    SimEstimate flat = est;
    flat.se_t = 0.0;
    CHECK_THROWS_AS(compare(flat, {5, 4, 0.4, 1, 0.1}), ComparisonError);
}

TEST_CASE("Wald identities hold in simulation") {
    for (auto mode : {ZetaMode::iid_per_arrival, ZetaMode::fixed_per_run}) {
        auto cfg = mm1(1.2, 6, 0.1, 100000);
        cfg.nu = PacketLaw::from_pairs({{1, 0.5}, {2, 0.5}});
        cfg.zeta_mode = mode;
        const auto res = run(cfg);
        const auto mark = wald_mark_ratio(res.summary);
        CHECK(std::abs(mark.value - 0.1) <= 3.0 * mark.se);
        const auto refusal = wald_refusal_residual(res.summary, 1.2);
        CHECK(std::abs(refusal.value) <= 3.0 * refusal.se);
    }
}

TEST_CASE("fixed_per_run matches the mixture, iid matches the per-arrival chain") {
    const auto nu = PacketLaw::from_pairs({{1, 0.5}, {2, 0.5}});
    const auto zeta = zeta_pmf(nu, 6);
    for (double lambda : {0.8, 1.3}) {
        auto cfg = mm1(lambda, 6, 0.05, 150000);
        cfg.nu = nu;
        cfg.zeta_mode = ZetaMode::fixed_per_run;
        auto res = run(cfg);
        CHECK(compare(res.summary, mixture_characteristics(zeta, lambda, cfg.dist, 0.05)).pass);

        cfg.zeta_mode = ZetaMode::iid_per_arrival;
        res = run(cfg);
        const auto chain = oracle::mm1_iid_zeta(lambda, 1.0, zeta);
        const BusyPeriodCharacteristics iid{chain.e_t, chain.e_p, 0.05 * chain.e_p, chain.e_r, 0.05};
        CHECK(compare(res.summary, iid).pass);
    }
}

TEST_CASE("determinism and thread independence") {
    auto cfg = mm1(1.1, 5, 0.05, 20000);
    cfg.replications = 4;
    const auto a = run(cfg);
    const auto b = run(cfg);
    cfg.threads = 3;
    const auto c = run(cfg);
    for (const auto* other : {&b, &c}) {
        CHECK(a.summary.e_t == other->summary.e_t);
        CHECK(a.summary.se_pi == other->summary.se_pi);
        for (int r = 0; r < 4; ++r) CHECK(a.replications[r].e_r == other->replications[r].e_r);
    }
    CHECK(a.replications[0].e_t != a.replications[1].e_t);
    cfg.seed += 1;
    CHECK(run(cfg).summary.e_t != a.summary.e_t);
}

TEST_CASE("worker count honours LOSSQ_THREADS") {
    SimConfig cfg;
    cfg.replications = 64;
    ::setenv("LOSSQ_THREADS", "1", 1);
    CHECK(worker_count(cfg) == 1);
    cfg.threads = 5;
    CHECK(worker_count(cfg) == 5);
    cfg.replications = 2;
    CHECK(worker_count(cfg) == 2);
    ::unsetenv("LOSSQ_THREADS");
}

TEST_CASE("runaway guard and validation") {
    auto cfg = mm1(3.0, 50, 0.0, 10);
    cfg.event_cap = 20;
    CHECK_THROWS_AS(run(cfg), RunawayError);
    cfg = mm1(1.0, 1, 0.0, 0);
    CHECK_THROWS_AS(run(cfg), ValidationError);
    cfg = mm1(1.0, 1, 0.0, 10);
    cfg.replications = 0;
    CHECK_THROWS_AS(run(cfg), ValidationError);
    CHECK(parse_zeta_mode("fixed_per_run") == ZetaMode::fixed_per_run);
    CHECK_THROWS_AS(parse_zeta_mode("sometimes"), ValidationError);
}

TEST_CASE("non-exponential service in simulation") {
    for (const auto& d : {ServiceDistribution::deterministic(1.0), ServiceDistribution::erlang(3, 1.0),
                          ServiceDistribution::hyperexponential({{0.5, 0.4}, {0.5, 1.6}}),
                          ServiceDistribution::uniform(0.5, 1.5)}) {
        SimConfig cfg;
        cfg.lambda = 0.9;
        cfg.dist = d;
        cfg.buffer = 3;
        cfg.p = 0.02;
        cfg.n_busy_periods = 100000;
        cfg.seed = 99;
        INFO(d.describe());
        CHECK(compare(run(cfg).summary, fixed_characteristics(3, 0.9, d, 0.02)).pass);
    }
}
