#include "airkit/detector.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "airkit/digest.hpp"
#include "airkit/error.hpp"

namespace airkit {

TargetFalseAlarm::TargetFalseAlarm(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0)) {
        throw DomainError("target false alarm must lie in (0, 1), got " + std::to_string(value));
    }
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation of the standard normal quantile
// (relative error ~1.15e-9), used as the starting point for Newton.
double normal_quantile_initial(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double q_inverse(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("q_inverse: probability must lie in (0, 1), got " + std::to_string(p));
    }
    if (p == 0.5) return 0.0;
    // Work on the small tail; 1 - p is exact for p in (0.5, 1).
    if (p > 0.5) return -q_inverse(1.0 - p);
    // Q^{-1}(p) = Phi^{-1}(1 - p) = -Phi^{-1}(p)
    double x = -normal_quantile_initial(p);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (int step = 0; step < 2; ++step) {
        const double density = inv_sqrt_2pi * std::exp(-0.5 * x * x);
        if (density == 0.0) break;
        // d/dx Q(x) = -phi(x)
        x += (q_function(x) - p) / density;
    }
    return x;
}

EnergyThreshold np_threshold(TargetFalseAlarm pf_target, std::size_t n, NoisePower noise) {
    if (n == 0) throw InvalidParameter("sample count must be at least 1");
    const double eta = (1.0 + std::sqrt(1.0 / static_cast<double>(n)) * q_inverse(pf_target.value())) *
                       noise.mw();
    return {eta, n, pf_target, noise};
}

Decision detect(double statistic_mw, const EnergyThreshold& threshold) {
    return statistic_mw >= threshold.eta_mw ? Decision::Present : Decision::Absent;
}

double binomial_half_width(std::size_t trials) {
    if (trials == 0) return 0.0;
    return 1.96 * 0.5 / std::sqrt(static_cast<double>(trials));
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial, Hypothesis truth) {
    return derive_seed(seed, 2 * static_cast<std::uint64_t>(trial) + (truth == Hypothesis::H1 ? 1 : 0));
}

double monte_carlo_rate(Hypothesis truth, NoisePower noise, SnrSpec snr, std::size_t n,
                        const EnergyThreshold& threshold, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw InvalidParameter("trial count must be at least 1");
    if (n == 0) throw InvalidParameter("sample count must be at least 1");
    std::vector<ComplexSample> buffer(n);
    std::size_t present = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        fill_samples(buffer, truth, noise, snr, trial_seed(seed, t, truth));
        if (detect(empirical_energy(buffer), threshold) == Decision::Present) ++present;
    }
    return static_cast<double>(present) / static_cast<double>(trials);
}

RatePair monte_carlo_rates(NoisePower noise, SnrSpec snr, std::size_t n, TargetFalseAlarm pf_target,
                           std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw InvalidParameter("trial count must be at least 1");
    const EnergyThreshold threshold = np_threshold(pf_target, n, noise);
    RatePair out;
    out.pf = monte_carlo_rate(Hypothesis::H0, noise, snr, n, threshold, trials, seed);
    out.pd = monte_carlo_rate(Hypothesis::H1, noise, snr, n, threshold, trials, seed);
    out.trials = trials;
    out.half_width = binomial_half_width(trials);
    return out;
}

double theoretical_pd(SnrSpec snr, std::size_t n, TargetFalseAlarm pf_target) {
    if (n == 0) throw InvalidParameter("sample count must be at least 1");
    const double gamma = snr.linear();
    const double arg = (q_inverse(pf_target.value()) - gamma * std::sqrt(static_cast<double>(n))) /
                       (1.0 + gamma);
    return q_function(arg);
}

}  // namespace airkit
