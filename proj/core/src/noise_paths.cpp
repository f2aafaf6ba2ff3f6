#include "spde/noise_paths.hpp"

#include "spde/philox.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace spde {

namespace {

constexpr int quantum_exponent = -40;
constexpr double max_horizon = 65536.0;

double to_unit_open(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (std::uint64_t{hi} << 32 | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

// Two independent standard normals from one Philox block.
std::pair<double, double> normal_pair(std::uint64_t master_seed, std::uint64_t sample_index,
                                      std::uint64_t block) noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                  static_cast<std::uint32_t>(sample_index),
                                  static_cast<std::uint32_t>(sample_index >> 32)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)};
    const auto r = Philox4x32::generate(ctr, key);
    const double radius = std::sqrt(-2.0 * std::log(to_unit_open(r[0], r[1])));
    const double angle = 2.0 * std::numbers::pi * to_unit_open(r[2], r[3]);
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace

BrownianPath::BrownianPath(double horizon, int level, std::vector<double> increments, SeedRecord seed)
    : horizon_(horizon), level_(level), increments_(std::move(increments)), seed_(seed) {
    if (level < 0 || level > max_path_level) {
        throw std::invalid_argument("path level must be in [0, 24], got " + std::to_string(level));
    }
    if (increments_.size() != (std::size_t{1} << level)) {
        throw std::invalid_argument("path needs exactly 2^level increments");
    }
}

std::vector<double> BrownianPath::coarsen(int j) const {
    if (j < 0 || j > level_) {
        throw std::invalid_argument("cannot coarsen level-" + std::to_string(level_) + " path to level " +
                                    std::to_string(j));
    }
    const std::size_t children = std::size_t{1} << (level_ - j);
    std::vector<double> out(std::size_t{1} << j);
    for (std::size_t m = 0; m < out.size(); ++m) {
        double s = 0.0;
        for (std::size_t c = 0; c < children; ++c) s += increments_[m * children + c];
        out[m] = s;
    }
    return out;
}

double BrownianPath::endpoint() const noexcept {
    double s = 0.0;
    for (double d : increments_) s += d;
    return s;
}

double standard_normal(std::uint64_t master_seed, std::uint64_t sample_index, std::uint64_t index) noexcept {
    const auto [even, odd] = normal_pair(master_seed, sample_index, index >> 1);
    return (index & 1) ? odd : even;
}

BrownianPath sample_path(double horizon, int level, std::uint64_t master_seed, std::uint64_t sample_index) {
    if (!(horizon > 0.0) || horizon > max_horizon) {
        throw std::invalid_argument("path horizon must be in (0, 65536]");
    }
    if (level < 0 || level > max_path_level) {
        throw std::invalid_argument("path level must be in [0, 24], got " + std::to_string(level));
    }
    const std::size_t count = std::size_t{1} << level;
    const double sigma = std::sqrt(horizon / static_cast<double>(count));
    std::vector<double> inc(count);
    for (std::size_t i = 0; i < count; i += 2) {
        const auto [even, odd] = normal_pair(master_seed, sample_index, i >> 1);
        inc[i] = even;
        if (i + 1 < count) inc[i + 1] = odd;
    }

    for (double& d : inc) {
        d = std::ldexp(std::nearbyint(std::ldexp(d * sigma, -quantum_exponent)), quantum_exponent);
    }
    return BrownianPath(horizon, level, std::move(inc), SeedRecord{master_seed, sample_index});
}

std::vector<double> coarsen(const BrownianPath& path, int level) { return path.coarsen(level); }

std::uint64_t increment_checksum(std::span<const double> increments) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (double d : increments) {
        auto bits = std::bit_cast<std::uint64_t>(d);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

}  // namespace spde
