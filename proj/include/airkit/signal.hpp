#pragma once
// Baseband observations for the binary spectrum-sensing test:
//   H0: x(n) = w(n)          H1: x(n) = s(n) + w(n)
// with w, s independent circular complex Gaussian. Powers are linear mW.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace airkit {

enum class Hypothesis { H0, H1 };

std::string_view to_string(Hypothesis h);
// Accepts exactly "H0" or "H1".
Hypothesis parse_hypothesis(std::string_view text);

double dbm_to_linear(double dbm);
double linear_to_dbm(double mw);

class NoisePower {
  public:
    static NoisePower from_dbm(double dbm);
    static NoisePower from_mw(double mw);

    double mw() const { return mw_; }
    double dbm() const { return dbm_; }

  private:
    NoisePower(double mw, double dbm) : mw_(mw), dbm_(dbm) {}
    double mw_;
    double dbm_;
};

class SnrSpec {
  public:
    static SnrSpec from_db(double db);
    static SnrSpec from_linear(double linear);

    double db() const { return db_; }
    double linear() const { return linear_; }

  private:
    SnrSpec(double linear, double db) : linear_(linear), db_(db) {}
    double linear_;
    double db_;
};

struct ComplexSample {
    double re = 0.0;  // sqrt(mW)
    double im = 0.0;

    friend bool operator==(const ComplexSample&, const ComplexSample&) = default;
};
static_assert(sizeof(ComplexSample) == 2 * sizeof(double));

struct SensingFrame {
    std::vector<ComplexSample> samples;
    Hypothesis truth = Hypothesis::H0;
    NoisePower noise = NoisePower::from_mw(1.0);
    SnrSpec snr = SnrSpec::from_linear(1.0);  // ignored under H0
    std::uint64_t seed = 0;
};

// Writes samples for (truth, noise, snr, seed) into `out`. Sample k depends
// only on (seed, k), so shorter frames are prefixes of longer ones.
void fill_samples(std::span<ComplexSample> out, Hypothesis truth, NoisePower noise, SnrSpec snr,
                  std::uint64_t seed);

SensingFrame generate_frame(Hypothesis truth, NoisePower noise, SnrSpec snr, std::size_t n,
                            std::uint64_t seed);

// (1/N) * sum |x(n)|^2
double empirical_energy(std::span<const ComplexSample> samples);
inline double empirical_energy(const SensingFrame& frame) { return empirical_energy(frame.samples); }

// |x(n)|^2 for every sample, in order.
std::vector<double> sample_energies(std::span<const ComplexSample> samples);

std::span<const double> as_interleaved(std::span<const ComplexSample> samples);

// JSON export: {"truth", "noise_dbm", "snr_db", "seed", "samples"} in that
// order, floats with 17 significant digits, snr_db null under H0.
void write_frame_json(std::ostream& out, const SensingFrame& frame);
std::string frame_to_json(const SensingFrame& frame);
SensingFrame frame_from_json(std::string_view text);

}  // namespace airkit
