#include "airkit/signal.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "airkit/digest.hpp"
#include "airkit/error.hpp"
#include "airkit/kernels.hpp"

namespace airkit {

std::string_view to_string(Hypothesis h) { return h == Hypothesis::H0 ? "H0" : "H1"; }

Hypothesis parse_hypothesis(std::string_view text) {
    if (text == "H0") return Hypothesis::H0;
    if (text == "H1") return Hypothesis::H1;
    throw FormatError("hypothesis must be \"H0\" or \"H1\", got \"" + std::string(text) + "\"");
}

double dbm_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }

double linear_to_dbm(double mw) { return 10.0 * std::log10(mw); }

NoisePower NoisePower::from_dbm(double dbm) {
    if (!std::isfinite(dbm)) throw InvalidParameter("noise power must be finite");
    return NoisePower(dbm_to_linear(dbm), dbm);
}

NoisePower NoisePower::from_mw(double mw) {
    if (!(mw > 0.0) || !std::isfinite(mw)) throw InvalidParameter("noise power must be positive");
    return NoisePower(mw, linear_to_dbm(mw));
}

SnrSpec SnrSpec::from_db(double db) {
    if (!std::isfinite(db)) throw InvalidParameter("SNR must be finite");
    return SnrSpec(dbm_to_linear(db), db);
}

SnrSpec SnrSpec::from_linear(double linear) {
    if (!(linear > 0.0) || !std::isfinite(linear)) throw InvalidParameter("SNR must be positive");
    return SnrSpec(linear, linear_to_dbm(linear));
}

namespace {

constexpr std::uint64_t kNoiseStream = 0;
constexpr std::uint64_t kSignalStream = 1;

// Box-Muller on draws 2k and 2k+1 of the stream; returns a standard complex
// pair (two independent N(0,1) values).
ComplexSample box_muller(std::uint64_t key, std::uint64_t k) {
    const double u1 = unit_open_closed(splitmix64_at(key, 2 * k));
    const double u2 = unit_closed_open(splitmix64_at(key, 2 * k + 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

void fill_samples(std::span<ComplexSample> out, Hypothesis truth, NoisePower noise, SnrSpec snr,
                  std::uint64_t seed) {
    const std::uint64_t noise_key = derive_seed(seed, kNoiseStream);
    const double noise_scale = std::sqrt(noise.mw() / 2.0);
    if (truth == Hypothesis::H0) {
        for (std::size_t k = 0; k < out.size(); ++k) {
            const ComplexSample w = box_muller(noise_key, k);
            out[k] = {noise_scale * w.re, noise_scale * w.im};
        }
        return;
    }
    const std::uint64_t signal_key = derive_seed(seed, kSignalStream);
    const double signal_scale = std::sqrt(snr.linear() * noise.mw() / 2.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const ComplexSample w = box_muller(noise_key, k);
        const ComplexSample s = box_muller(signal_key, k);
        out[k] = {signal_scale * s.re + noise_scale * w.re, signal_scale * s.im + noise_scale * w.im};
    }
}

SensingFrame generate_frame(Hypothesis truth, NoisePower noise, SnrSpec snr, std::size_t n,
                            std::uint64_t seed) {
    if (n == 0) throw InvalidParameter("frame length must be at least 1");
    SensingFrame frame{std::vector<ComplexSample>(n), truth, noise, snr, seed};
    fill_samples(frame.samples, truth, noise, snr, seed);
    return frame;
}

std::span<const double> as_interleaved(std::span<const ComplexSample> samples) {
    return {reinterpret_cast<const double*>(samples.data()), 2 * samples.size()};
}

std::vector<double> sample_energies(std::span<const ComplexSample> samples) {
    std::vector<double> out(samples.size());
    kernels::magnitude_squared(as_interleaved(samples), out);
    return out;
}

double empirical_energy(std::span<const ComplexSample> samples) {
    if (samples.empty()) return 0.0;
    thread_local std::vector<double> scratch;
    scratch.resize(samples.size());
    kernels::magnitude_squared(as_interleaved(samples), scratch);
    return kernels::sum(scratch) / static_cast<double>(samples.size());
}

namespace {

void put_double(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace

void write_frame_json(std::ostream& out, const SensingFrame& frame) {
    out << "{\"truth\": \"" << to_string(frame.truth) << "\", \"noise_dbm\": ";
    put_double(out, frame.noise.dbm());
    out << ", \"snr_db\": ";
    if (frame.truth == Hypothesis::H1) {
        put_double(out, frame.snr.db());
    } else {
        out << "null";
    }
    out << ", \"seed\": " << frame.seed << ", \"samples\": [";
    for (std::size_t k = 0; k < frame.samples.size(); ++k) {
        if (k > 0) out << ", ";
        out << '[';
        put_double(out, frame.samples[k].re);
        out << ", ";
        put_double(out, frame.samples[k].im);
        out << ']';
    }
    out << "]}";
}

std::string frame_to_json(const SensingFrame& frame) {
    std::ostringstream os;
    write_frame_json(os, frame);
    return os.str();
}

SensingFrame frame_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        SensingFrame frame;
        frame.truth = parse_hypothesis(j.at("truth").get<std::string>());
        frame.noise = NoisePower::from_dbm(j.at("noise_dbm").get<double>());
        if (!j.at("snr_db").is_null()) frame.snr = SnrSpec::from_db(j.at("snr_db").get<double>());
        frame.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& pair : j.at("samples")) {
            if (!pair.is_array() || pair.size() != 2) throw FormatError("frame sample must be [re, im]");
            frame.samples.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
        if (frame.samples.empty()) throw FormatError("frame has no samples");
        return frame;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("frame JSON: ") + e.what());
    }
}

}  // namespace airkit
