#include <doctest.h>

#include <cmath>
#include <sstream>

#include "airkit/error.hpp"
#include "airkit/signal.hpp"

using namespace airkit;

TEST_CASE("dBm conversion") {
    CHECK(dbm_to_linear(0.0) == 1.0);
    CHECK(dbm_to_linear(-100.0) == doctest::Approx(1e-10).epsilon(1e-12));
    CHECK(dbm_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-12));

    const auto n = NoisePower::from_dbm(-100.0);
    CHECK(std::abs(n.mw() - 1e-10) / 1e-10 < 1e-12);
    const auto s = SnrSpec::from_db(-6.0);
    CHECK(std::abs(s.linear() - std::pow(10.0, -0.6)) / s.linear() < 1e-12);
    CHECK_THROWS_AS(NoisePower::from_mw(0.0), InvalidParameter);
    CHECK_THROWS_AS(SnrSpec::from_linear(-1.0), InvalidParameter);
}

TEST_CASE("hypothesis literals") {
    CHECK(to_string(Hypothesis::H0) == "H0");
    CHECK(to_string(Hypothesis::H1) == "H1");
    CHECK(parse_hypothesis("H1") == Hypothesis::H1);
    CHECK_THROWS_AS(parse_hypothesis("h1"), FormatError);
}

TEST_CASE("empirical energy") {
    const std::vector<ComplexSample> zeros(4);
    CHECK(empirical_energy(zeros) == 0.0);
    CHECK(empirical_energy(std::vector<ComplexSample>{{1.0, 0.0}}) == 1.0);
    CHECK(empirical_energy(std::vector<ComplexSample>{{1.0, 0.0}, {0.0, 2.0}}) == 2.5);
}

TEST_CASE("generate_frame rejects bad parameters") {
    const auto noise = NoisePower::from_mw(1.0);
    CHECK_THROWS_AS(generate_frame(Hypothesis::H0, noise, SnrSpec::from_db(0), 0, 1), InvalidParameter);
}

TEST_CASE("frame statistics over 1e5 samples") {
    const auto noise = NoisePower::from_mw(1.0);
    const auto snr = SnrSpec::from_linear(1.0);
    const std::size_t n = 100000;

    // plain loops, independent of the kernel path
    const auto h0 = generate_frame(Hypothesis::H0, noise, snr, n, 7);
    double mean = 0.0, mean_re = 0.0, mean_im = 0.0;
    for (const auto& x : h0.samples) {
        mean += x.re * x.re + x.im * x.im;
        mean_re += x.re;
        mean_im += x.im;
    }
    mean /= n;
    mean_re /= n;
    mean_im /= n;
    CHECK(mean >= 0.99);
    CHECK(mean <= 1.01);

    double var = 0.0;
    for (const auto& x : h0.samples) {
        const double e = x.re * x.re + x.im * x.im;
        var += (e - mean) * (e - mean);
    }
    var /= (n - 1);
    // |w|^2 is exponential with mean sigma^2, so its variance is sigma^4
    CHECK(std::abs(var - 1.0) <= 0.05);

    // each component has variance sigma^2 / 2
    const double se = std::sqrt(0.5 / n);
    CHECK(std::abs(mean_re) <= 3 * se);
    CHECK(std::abs(mean_im) <= 3 * se);

    const auto h1 = generate_frame(Hypothesis::H1, noise, snr, n, 7);
    double mean1 = 0.0;
    for (const auto& x : h1.samples) mean1 += x.re * x.re + x.im * x.im;
    mean1 /= n;
    CHECK(mean1 >= 1.98);
    CHECK(mean1 <= 2.02);
}

TEST_CASE("generation is deterministic and prefix-stable") {
    const auto noise = NoisePower::from_dbm(-100.0);
    const auto snr = SnrSpec::from_db(-6.0);
    const auto a = generate_frame(Hypothesis::H1, noise, snr, 50, 42);
    const auto b = generate_frame(Hypothesis::H1, noise, snr, 50, 42);
    CHECK(frame_to_json(a) == frame_to_json(b));
    CHECK(a.samples == b.samples);

    const auto longer = generate_frame(Hypothesis::H1, noise, snr, 80, 42);
    CHECK(std::equal(a.samples.begin(), a.samples.end(), longer.samples.begin()));

    const auto other = generate_frame(Hypothesis::H1, noise, snr, 50, 43);
    CHECK(other.samples != a.samples);
}

TEST_CASE("frame JSON export") {
    const auto noise = NoisePower::from_dbm(-100.0);
    const auto h0 = generate_frame(Hypothesis::H0, noise, SnrSpec::from_db(0), 3, 9);
    const std::string text = frame_to_json(h0);
    CHECK(text.starts_with("{\"truth\": \"H0\", \"noise_dbm\": -100, \"snr_db\": null, \"seed\": 9, \"samples\": [["));
    const auto back = frame_from_json(text);
    CHECK(back.samples == h0.samples);  // 17 significant digits round-trip exactly
    CHECK(back.truth == Hypothesis::H0);

    const auto h1 = generate_frame(Hypothesis::H1, noise, SnrSpec::from_db(-6.0), 2, 9);
    const std::string t1 = frame_to_json(h1);
    CHECK(t1.find("\"snr_db\": -6,") != std::string::npos);
    CHECK(frame_from_json(t1).snr.db() == -6.0);

    CHECK_THROWS_AS(frame_from_json("{\"truth\": \"H0\"}"), FormatError);
}
