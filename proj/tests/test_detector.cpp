#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "airkit/detector.hpp"
#include "airkit/error.hpp"
#include "oracles.hpp"

using namespace airkit;

TEST_CASE("q_function") {
    CHECK(q_function(0.0) == 0.5);
    CHECK(q_function(8.0) < 1e-15);
    // frozen from the quadrature oracle: gaussian_tail(1.6448536270) = 0.05000000000
    CHECK(std::abs(q_function(1.6448536270) - 0.05) <= 1e-9);
    CHECK(std::abs(oracle::gaussian_tail(1.6448536270) - 0.05) <= 1e-9);
    for (double x = -8.0; x <= 8.0; x += 0.25) {
        CHECK(std::abs(q_function(x) - oracle::gaussian_tail(x)) <= 1e-12);
    }
}

TEST_CASE("q_inverse") {
    CHECK(q_inverse(0.5) == 0.0);
    CHECK(std::abs(q_inverse(0.05) - 1.6448536270) <= 1e-9);
    CHECK(std::abs(q_inverse(q_function(2.5)) - 2.5) <= 1e-9);
    CHECK_THROWS_AS(q_inverse(0.0), DomainError);
    CHECK_THROWS_AS(q_inverse(1.0), DomainError);
    CHECK_THROWS_AS(q_inverse(-0.2), DomainError);

    for (double p : {1e-6, 1e-4, 0.01, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.999, 1 - 1e-6}) {
        CHECK(std::abs(q_inverse(p) - oracle::gaussian_tail_inverse(p)) <= 1e-9);
    }
    for (int i = -600; i <= 600; ++i) {
        const double x = i * 0.01;
        // A double probability near 1 carries only ~2^-54 absolute resolution,
        // which limits recoverable x to about 2^-53 / phi(x) in the far left tail.
        const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        const double resolvable = 0x1p-53 / density;
        CHECK(std::abs(q_inverse(q_function(x)) - x) <= 1e-9 + resolvable);
        if (x > -5.5) CHECK(std::abs(q_inverse(q_function(x)) - x) <= 1e-9);
    }
}

TEST_CASE("Neyman-Pearson threshold") {
    const auto t = np_threshold(TargetFalseAlarm(0.5), 50, NoisePower::from_dbm(-100.0));
    CHECK(std::abs(t.eta_mw - 1e-10) / 1e-10 < 1e-12);
    CHECK_FALSE(t.nonpositive());

    // 1 + Q^{-1}(0.1) / sqrt(50), Q^{-1}(0.1) = 1.2815515655 from the bisection oracle
    const auto t2 = np_threshold(TargetFalseAlarm(0.1), 50, NoisePower::from_mw(1.0));
    CHECK(std::abs(t2.eta_mw - 1.1812386) <= 1e-6);
    CHECK(std::abs(t2.eta_mw - (1.0 + oracle::gaussian_tail_inverse(0.1) / std::sqrt(50.0))) <= 1e-9);

    const auto neg = np_threshold(TargetFalseAlarm(0.999), 1, NoisePower::from_mw(1.0));
    CHECK(neg.eta_mw < 0.0);
    CHECK(neg.nonpositive());
    CHECK(detect(0.0, neg) == Decision::Present);

    CHECK_THROWS_AS(TargetFalseAlarm(1.0), DomainError);
    CHECK_THROWS_AS(np_threshold(TargetFalseAlarm(0.5), 0, NoisePower::from_mw(1.0)), InvalidParameter);
}

TEST_CASE("detect tie rule") {
    const auto t = np_threshold(TargetFalseAlarm(0.1), 50, NoisePower::from_mw(1.0));
    CHECK(detect(t.eta_mw, t) == Decision::Present);
    CHECK(detect(0.0, t) == Decision::Absent);
    CHECK(detect(2 * t.eta_mw, t) == Decision::Present);
}

TEST_CASE("theoretical_pd") {
    const TargetFalseAlarm half(0.5);
    // Q(-gamma sqrt(50) / (1 + gamma)) evaluated with the quadrature oracle
    auto oracle_pd = [](double db) {
        const double g = std::pow(10.0, db / 10.0);
        return oracle::gaussian_tail(-g * std::sqrt(50.0) / (1.0 + g));
    };
    CHECK(std::abs(theoretical_pd(SnrSpec::from_db(-20), 50, half) - 0.528) <= 0.001);
    CHECK(std::abs(theoretical_pd(SnrSpec::from_db(-6), 50, half) - 0.922) <= 0.001);
    CHECK(std::abs(theoretical_pd(SnrSpec::from_db(0), 50, half) - 0.9998) <= 0.0002);
    for (double db : {-20.0, -10.0, -6.0, 0.0}) {
        CHECK(std::abs(theoretical_pd(SnrSpec::from_db(db), 50, half) - oracle_pd(db)) <= 1e-10);
    }
}

TEST_CASE("theoretical_pd dips below the target when n is too small for the approximation") {
    const TargetFalseAlarm target(0.9);
    CHECK(theoretical_pd(SnrSpec::from_db(-10.0), 1, target) < 0.9);
    CHECK(theoretical_pd(SnrSpec::from_db(-10.0), 2, target) > 0.9);
}

TEST_CASE("theoretical_pd is monotone and beats chance") {
    for (double pf : {0.05, 0.1, 0.5, 0.9}) {
        const TargetFalseAlarm target(pf);
        for (std::size_t n : {1u, 10u, 50u, 200u}) {
            // The Gaussian-approximation P_d rises with SNR only while
            // sqrt(n) > -Q^{-1}(pf); below that (pf = 0.9, n = 1) it dips first.
            if (std::sqrt(static_cast<double>(n)) <= -q_inverse(pf)) continue;
            double prev = 0.0;
            for (double db = -30.0; db <= 10.0; db += 0.5) {
                const double pd = theoretical_pd(SnrSpec::from_db(db), n, target);
                // strictly increasing until the double rounds to 1
                if (prev < 1.0 - 1e-12) CHECK(pd > prev); else CHECK(pd >= prev);
                CHECK(pd >= pf);
                prev = pd;
            }
        }
        for (double db : {-20.0, -6.0, 0.0}) {
            double prev = 0.0;
            for (std::size_t n = 1; n <= 400; n += 7) {
                const double pd = theoretical_pd(SnrSpec::from_db(db), n, target);
                if (prev < 1.0 - 1e-12) CHECK(pd > prev); else CHECK(pd >= prev);
                prev = pd;
            }
        }
    }
}

TEST_CASE("Monte Carlo basics") {
    const auto noise = NoisePower::from_dbm(-100.0);
    const auto r1 = monte_carlo_rates(noise, SnrSpec::from_db(0), 50, TargetFalseAlarm(0.5), 1, 3);
    CHECK((r1.pd == 0.0 || r1.pd == 1.0));
    CHECK((r1.pf == 0.0 || r1.pf == 1.0));
    CHECK(r1.half_width == doctest::Approx(0.98));
    CHECK_THROWS_AS(monte_carlo_rates(noise, SnrSpec::from_db(0), 50, TargetFalseAlarm(0.5), 0, 3),
                    InvalidParameter);

    const auto a = monte_carlo_rates(noise, SnrSpec::from_db(-6), 50, TargetFalseAlarm(0.5), 2000, 11);
    const auto b = monte_carlo_rates(noise, SnrSpec::from_db(-6), 50, TargetFalseAlarm(0.5), 2000, 11);
    CHECK(a.pd == b.pd);
    CHECK(a.pf == b.pf);
}

TEST_CASE("Monte Carlo detection at 0 dB") {
    const auto r = monte_carlo_rates(NoisePower::from_dbm(-100.0), SnrSpec::from_db(0), 50, TargetFalseAlarm(0.5),
                                     100000, 5);
    CHECK(r.pd >= 0.999);
}

// The CLT threshold is not exactly calibrated: (1/N) sum |w|^2 is Gamma
// distributed. Empirical rates are checked against the exact Gamma tail.
TEST_CASE("Monte Carlo rates agree with the exact Gamma tail") {
    const auto noise = NoisePower::from_dbm(-100.0);
    const std::size_t trials = 100000;
    for (double pf : {0.05, 0.1, 0.5, 0.9}) {
        for (std::size_t n : {10u, 50u, 200u}) {
            const auto t = np_threshold(TargetFalseAlarm(pf), n, noise);
            const double exact = oracle::energy_test_exact(n, t.eta_mw, noise.mw());
            const double measured = monte_carlo_rate(Hypothesis::H0, noise, SnrSpec::from_db(0), n, t, trials, 99);
            const double se = std::sqrt(exact * (1 - exact) / trials);
            INFO("pf* = " << pf << ", N = " << n << ", exact = " << exact << ", measured = " << measured);
            CHECK(std::abs(measured - exact) <= 4 * se);
        }
    }
    const auto t = np_threshold(TargetFalseAlarm(0.5), 50, noise);
    for (double db : {-20.0, -10.0, -6.0, 0.0}) {
        const auto snr = SnrSpec::from_db(db);
        const double exact = oracle::energy_test_exact(50, t.eta_mw, noise.mw() * (1 + snr.linear()));
        const double measured = monte_carlo_rate(Hypothesis::H1, noise, snr, 50, t, trials, 17);
        const double se = std::sqrt(exact * (1 - exact) / trials);
        INFO("SNR " << db << " dB, exact = " << exact << ", measured = " << measured);
        CHECK(std::abs(measured - exact) <= 4 * se + 1e-12);
        // Gaussian approximation stays within 0.02 of the simulation
        CHECK(std::abs(measured - theoretical_pd(snr, 50, TargetFalseAlarm(0.5))) <= 0.02);
    }
}
