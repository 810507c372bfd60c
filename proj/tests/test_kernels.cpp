#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "airkit/kernels.hpp"

using namespace airkit;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("scalar reference kernels") {
    const auto& s = kernels::scalar_table();
    const std::vector<double> iq{1.0, 0.0, 0.0, 2.0, 3.0, -4.0};
    std::vector<double> mag(3);
    s.magnitude_squared(iq.data(), 3, mag.data());
    CHECK(mag == std::vector<double>{1.0, 4.0, 25.0});

    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7};
    CHECK(s.sum(v.data(), v.size()) == 28.0);
    CHECK(s.sum(v.data(), 0) == 0.0);

    const std::vector<double> inv{0.5, 1.0, 2.0};
    std::vector<double> p(3);
    s.clipped_level(inv.data(), 3, 1.25, p.data());
    CHECK(p == std::vector<double>{0.75, 0.25, 0.0});
}

TEST_CASE("vector variants are bit-identical to the scalar reference") {
    const kernels::KernelTable* avx2 = kernels::avx2_table();
    if (avx2 == nullptr) {
        MESSAGE("AVX2 variant unavailable on this build/CPU; scalar only");
        return;
    }
    const auto& ref = kernels::scalar_table();
    for (std::size_t n = 0; n < 70; ++n) {
        const auto iq = random_values(2 * n, 100 + n, -3.0, 3.0);
        std::vector<double> a(n), b(n);
        ref.magnitude_squared(iq.data(), n, a.data());
        avx2->magnitude_squared(iq.data(), n, b.data());
        CHECK(a == b);

        const auto vals = random_values(n, 200 + n, -1e3, 1e3);
        CHECK(ref.sum(vals.data(), n) == avx2->sum(vals.data(), n));

        const auto inv = random_values(n, 300 + n, 0.0, 2.0);
        ref.clipped_level(inv.data(), n, 1.0, a.data());
        avx2->clipped_level(inv.data(), n, 1.0, b.data());
        CHECK(a == b);
    }
}

TEST_CASE("runtime selection can be forced") {
    kernels::force(kernels::Isa::Scalar);
    CHECK(kernels::active_name() == "scalar");
    if (kernels::avx2_table() != nullptr) {
        kernels::force(kernels::Isa::Avx2);
        CHECK(kernels::active_name() == "avx2");
    }
    const std::vector<double> v{0.5, 0.25, 0.125, 0.125, 1.0};
    CHECK(kernels::sum(v) == 2.0);
}
