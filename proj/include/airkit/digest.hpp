#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace airkit {

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Counter-based generator: the value SplitMix64 produces at position
// `counter` (0-based) of the stream seeded with `key`. Pure, so any draw can
// be recomputed independently of the others.
constexpr std::uint64_t splitmix64_at(std::uint64_t key, std::uint64_t counter) {
    std::uint64_t z = key + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent child seed, e.g. one per trial or per stream.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
    return splitmix64_at(parent ^ 0xA0761D6478BD642FULL, tag);
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);

// Uniform on (0, 1]; never returns 0 so it is safe under log().
constexpr double unit_open_closed(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Uniform on [0, 1).
constexpr double unit_closed_open(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace airkit
