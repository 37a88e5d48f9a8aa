#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "lossq/error.hpp"
#include "lossq/service.hpp"
#include "oracles.hpp"

using namespace lossq;
using doctest::Approx;

namespace {

std::vector<ServiceDistribution> zoo() {
    return {ServiceDistribution::deterministic(1.3),
            ServiceDistribution::exponential(0.7),
            ServiceDistribution::erlang(3, 1.1),
            ServiceDistribution::hyperexponential({{0.3, 0.2}, {0.7, 1.5}}),
            ServiceDistribution::uniform(0.2, 1.8)};
}

}  // namespace

TEST_CASE("lst examples") {
    const auto e1 = ServiceDistribution::exponential(1.0);
    CHECK(lst(e1, 0.0) == 1.0);
    CHECK(lst(e1, 1.0) == Approx(0.5).epsilon(1e-15));
    CHECK(lst(ServiceDistribution::deterministic(2.0), 1.0) == Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(lst(e1, -0.1), DomainError);
    for (const auto& d : zoo()) CHECK(lst(d, 0.0) == 1.0);
}

TEST_CASE("lst_deriv examples") {
    const auto e1 = ServiceDistribution::exponential(1.0);
    CHECK(lst_deriv(e1, 0.0, 1) == Approx(-1.0).epsilon(1e-15));
    CHECK(lst_deriv(e1, 1.0, 1) == Approx(-0.25).epsilon(1e-15));
    CHECK(lst_deriv(ServiceDistribution::deterministic(1.0), 0.0, 2) == Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(lst_deriv(e1, 0.0, 0), DomainError);
    CHECK_THROWS_AS(lst_deriv(e1, -1.0, 1), DomainError);
    CHECK_THROWS_AS(lst_deriv(e1, 0.0, kMaxLstOrder + 1), UnsupportedError);
}

TEST_CASE("lst derivatives at zero are signed raw moments") {
    for (const auto& d : zoo()) {
        for (int m = 1; m <= 4; ++m) {
            const double sign = m % 2 ? -1.0 : 1.0;
            CHECK(lst_deriv(d, 0.0, m) == Approx(sign * d.moment(m)).epsilon(1e-12));
        }
    }
}

TEST_CASE("lst derivatives match finite differences") {
    for (const auto& d : zoo()) {
        for (double s : {0.3, 1.0, 2.5}) {
            const double h = 1e-5;
            const double fd = (lst(d, s + h) - lst(d, s - h)) / (2 * h);
            CHECK(lst_deriv(d, s, 1) == Approx(fd).epsilon(1e-7));
            const double fd2 = (lst_deriv(d, s + h, 1) - lst_deriv(d, s - h, 1)) / (2 * h);
            CHECK(lst_deriv(d, s, 2) == Approx(fd2).epsilon(1e-7));
        }
    }
}

TEST_CASE("lst is completely monotone") {
    for (const auto& d : zoo()) {
        for (double s = 0.0; s <= 10.0; s += 0.25) {
            CHECK(lst(d, s) > 0.0);
            CHECK(lst(d, s) <= 1.0);
            for (int m = 1; m <= 3; ++m) CHECK(std::pow(-1.0, m) * lst_deriv(d, s, m) >= 0.0);
        }
    }
}

TEST_CASE("traffic_moments examples") {
    const auto e1 = ServiceDistribution::exponential(1.0);
    auto tm = traffic_moments(e1, 1.0, 2);
    CHECK(tm.rho == 1.0);
    CHECK(tm.rho_at(1) == 1.0);
    CHECK(tm.rho_at(2) == Approx(2.0).epsilon(1e-15));
    tm = traffic_moments(ServiceDistribution::deterministic(1.0), 1.0, 3);
    CHECK(tm.rho_at(1) == 1.0);
    CHECK(tm.rho_at(2) == 1.0);
    CHECK(tm.rho_at(3) == 1.0);
    tm = traffic_moments(e1, 2.0, 2);
    CHECK(tm.rho == Approx(2.0));
    CHECK(tm.rho_at(2) == Approx(8.0).epsilon(1e-15));
    CHECK_THROWS_AS(traffic_moments(e1, 1.0, 1), ValidationError);
    CHECK_THROWS_AS(traffic_moments(e1, 0.0, 2), ValidationError);
}

TEST_CASE("traffic moments satisfy Jensen") {
    for (const auto& d : zoo()) {
        const auto tm = traffic_moments(d, 0.9, 4);
        CHECK(tm.rho_at(2) >= tm.rho * tm.rho * (1 - 1e-15));
        for (double v : tm.rho_j) CHECK(v > 0.0);
    }
}

TEST_CASE("pi_probs examples") {
    auto pv = pi_probs(ServiceDistribution::deterministic(1.0), 1.0);
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(pv.probs[i] == Approx(std::exp(-1.0) / std::tgamma(i + 1.0)).epsilon(1e-14));
    pv = pi_probs(ServiceDistribution::exponential(1.0), 1.0);
    for (std::size_t i = 0; i < 30; ++i) CHECK(pv.probs[i] == Approx(std::pow(0.5, i + 1.0)).epsilon(1e-14));
    for (const auto& d : zoo()) {
        pv = pi_probs(d, 0.8);
        const long double total = std::accumulate(pv.probs.begin(), pv.probs.end(), 0.0L);
        CHECK(std::abs(static_cast<double>(total) + pv.tail_mass - 1.0) < 1e-12);
        CHECK(pv.tail_mass <= kDefaultTailTol);
        for (double p : pv.probs) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
}

TEST_CASE("pi_probs honours min_terms and the hard cap") {
    const auto pv = pi_probs(ServiceDistribution::deterministic(0.1), 1.0, kDefaultTailTol, 500);
    CHECK(pv.probs.size() >= 500);
    CHECK_THROWS_AS(pi_probs(ServiceDistribution::exponential(1.0), 1.0, kDefaultTailTol, kPiHardCap + 1),
                    TruncationError);
    CHECK_THROWS_AS(pi_probs(ServiceDistribution::exponential(1.0), 1.0, 0.0), ValidationError);
    // A geometric with ratio 1 - 1e-7 cannot shed its tail within the cap.
    CHECK_THROWS_AS(pi_probs(ServiceDistribution::exponential(1e7), 1.0), TruncationError);
}

TEST_CASE("pi moment identities") {
    for (const auto& d : zoo()) {
        for (double lambda : {0.4, 1.0, 1.7}) {
            const auto pv = pi_probs(d, lambda);
            const auto tm = traffic_moments(d, lambda, 2);
            long double m1 = 0, m2 = 0;
            for (std::size_t i = 0; i < pv.probs.size(); ++i) {
                m1 += i * pv.probs[i];
                m2 += i * (i - 1.0L) * pv.probs[i];
            }
            const double n = static_cast<double>(pv.probs.size());
            CHECK(std::abs(static_cast<double>(m1) - tm.rho) < 1e-9 + n * pv.tail_mass);
            CHECK(std::abs(static_cast<double>(m2) - tm.rho_at(2)) < 1e-9 + n * n * pv.tail_mass);
        }
    }
}

TEST_CASE("pi0 + pi1 stays below one") {
    for (const auto& d : zoo()) {
        for (double lambda : {0.01, 0.5, 1.0, 3.0, 20.0}) {
            const double head = lst(d, lambda) - lambda * lst_deriv(d, lambda, 1);
            CHECK(head == Approx(pi_term(d, lambda, 0) + pi_term(d, lambda, 1)).epsilon(1e-12));
            CHECK(head < 1.0 - 1e-12);
        }
    }
}

TEST_CASE("closed-form pi agrees with quadrature") {
    for (const auto& d : zoo()) {
        for (double lambda : {0.5, 1.0, 2.0}) {
            for (int i : {0, 1, 2, 5, 10, 20}) {
                INFO(d.describe(), " lambda=", lambda, " i=", i);
                CHECK(std::abs(pi_term(d, lambda, static_cast<std::size_t>(i)) -
                               oracle::pi_quadrature(d, lambda, i)) < 1e-10);
            }
        }
    }
}

TEST_CASE("service construction and parsing") {
    CHECK_THROWS_AS(ServiceDistribution::deterministic(0.0), ValidationError);
    CHECK_THROWS_AS(ServiceDistribution::exponential(-1.0), ValidationError);
    CHECK_THROWS_AS(ServiceDistribution::erlang(0, 1.0), ValidationError);
    CHECK_THROWS_AS(ServiceDistribution::hyperexponential({{0.5, 1.0}, {0.4, 2.0}}), ValidationError);
    CHECK_THROWS_AS(ServiceDistribution::uniform(1.0, 1.0), ValidationError);
    for (const auto& d : zoo()) CHECK(parse_service(d.describe()) == d);
    const auto e = parse_service("erlang 2 1");
    CHECK(e.kind() == ServiceKind::erlang);
    CHECK(traffic_moments(e, 1.0, 2).rho_at(2) == Approx(1.5));
    CHECK_THROWS_AS(parse_service("gamma 1 2"), ValidationError);
    CHECK_THROWS_AS(parse_service("exponential"), ValidationError);
    CHECK_THROWS_AS(parse_service("exponential x"), ValidationError);
    CHECK(ServiceDistribution::exponential(2.0).scaled(1.5).mean() == Approx(3.0));
}
