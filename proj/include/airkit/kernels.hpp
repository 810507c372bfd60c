#pragma once
// Data-parallel inner loops used by the sensing and allocation code.
//
// Every kernel has a portable scalar reference and, where the target allows,
// a vector variant selected once at runtime. The scalar code reproduces the
// vector lane layout (four double accumulators, fixed horizontal reduction),
// so all variants return bit-identical results.

#include <cstddef>
#include <span>
#include <string_view>

namespace airkit::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    const char* name;
    // out[k] = re[k]^2 + im[k]^2 over `count` interleaved (re, im) pairs.
    void (*magnitude_squared)(const double* interleaved, std::size_t count, double* out);
    // Four-lane blocked sum; tail elements are added after the lane reduction.
    double (*sum)(const double* values, std::size_t count);
    // out[k] = max(0, level - inverse[k])
    void (*clipped_level)(const double* inverse, std::size_t count, double level, double* out);
};

const KernelTable& scalar_table();
// nullptr when the variant is not compiled in or the CPU lacks the extension.
const KernelTable* avx2_table();

// The table in use. Resolved on first call: AIRKIT_SIMD=scalar|avx2 in the
// environment overrides detection.
const KernelTable& active();
std::string_view active_name();
// Tests and benchmarks only; not thread-safe against concurrent kernel calls.
void force(Isa isa);

inline void magnitude_squared(std::span<const double> interleaved, std::span<double> out) {
    active().magnitude_squared(interleaved.data(), interleaved.size() / 2, out.data());
}

inline double sum(std::span<const double> values) {
    return active().sum(values.data(), values.size());
}

inline void clipped_level(std::span<const double> inverse, double level, std::span<double> out) {
    active().clipped_level(inverse.data(), inverse.size(), level, out.data());
}

}  // namespace airkit::kernels
