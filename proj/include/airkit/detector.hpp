#pragma once
// Neyman-Pearson energy detector with the CLT threshold
//   eta = (1 + Q^{-1}(Pf*) / sqrt(N)) * sigma_n^2
// and its Monte Carlo / closed-form evaluation.

#include <cstddef>
#include <cstdint>

#include "airkit/signal.hpp"

namespace airkit {

class TargetFalseAlarm {
  public:
    // Throws DomainError unless 0 < value < 1.
    explicit TargetFalseAlarm(double value);
    double value() const { return value_; }

  private:
    double value_;
};

struct EnergyThreshold {
    double eta_mw;
    std::size_t n;
    TargetFalseAlarm pf_target;
    NoisePower noise;

    // The NP threshold can go nonpositive for large Pf* and small N; every frame
    // is then declared present.
    bool nonpositive() const { return eta_mw <= 0.0; }
};

enum class Decision { Present, Absent };

struct RatePair {
    double pd = 0.0;
    double pf = 0.0;
    std::size_t trials = 0;
    double half_width = 0.0;
};

// Gaussian upper tail, 0.5 * erfc(x / sqrt 2).
double q_function(double x);
// Inverse of q_function on (0, 1); DomainError outside.
double q_inverse(double p);

EnergyThreshold np_threshold(TargetFalseAlarm pf_target, std::size_t n, NoisePower noise);

// Present iff statistic >= eta (ties declare Present).
Decision detect(double statistic_mw, const EnergyThreshold& threshold);

// Worst-case (p = 1/2) normal-approximation 95% half-width: 0.98 / sqrt(trials).
double binomial_half_width(std::size_t trials);

// Empirical Pr{declare H1 | truth} over `trials` frames. Trial t uses the frame
// seed derive_seed(seed, 2t) under H0 and derive_seed(seed, 2t + 1) under H1.
double monte_carlo_rate(Hypothesis truth, NoisePower noise, SnrSpec snr, std::size_t n,
                        const EnergyThreshold& threshold, std::size_t trials, std::uint64_t seed);

RatePair monte_carlo_rates(NoisePower noise, SnrSpec snr, std::size_t n, TargetFalseAlarm pf_target,
                           std::size_t trials, std::uint64_t seed);

// Gaussian-approximation detection probability for the threshold above:
//   Q((Q^{-1}(Pf*) - gamma * sqrt(N)) / (1 + gamma))
double theoretical_pd(SnrSpec snr, std::size_t n, TargetFalseAlarm pf_target);

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial, Hypothesis truth);

}  // namespace airkit
