#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace spde {

/// Name of the Gaussian sampling method, echoed in report metadata.
inline constexpr std::string_view rng_method_name = "philox4x32-10/box-muller/q2^-40";

/// Largest supported finest level (2^24 increments).
inline constexpr int max_path_level = 24;

struct SeedRecord {
    std::uint64_t master_seed = 0;
    std::uint64_t sample_index = 0;
};

/// Scalar Brownian increments on [0, T] at the finest step T / 2^L.
///
/// Increments are quantised to multiples of 2^-40, so every partial sum of up
/// to 2^24 of them is exact in double precision. Coarse increments and
/// Brownian values at shared times are therefore bit-identical whichever
/// level they are computed from.
class BrownianPath {
public:
    BrownianPath(double horizon, int level, std::vector<double> increments, SeedRecord seed);

    double horizon() const noexcept { return horizon_; }
    int level() const noexcept { return level_; }
    double finest_step() const noexcept { return horizon_ / static_cast<double>(std::uint64_t{1} << level_); }
    std::span<const double> increments() const noexcept { return increments_; }
    const SeedRecord& seed() const noexcept { return seed_; }

    /// 2^j increments; entry m is the sum of fine increments
    /// m * 2^(L-j) .. (m+1) * 2^(L-j) - 1 in ascending order.
    std::vector<double> coarsen(int j) const;

    /// beta(T).
    double endpoint() const noexcept;

private:
    double horizon_;
    int level_;
    std::vector<double> increments_;
    SeedRecord seed_;
};

/// Increment `index` of sample `sample_index` as a standard normal variate.
/// A pure function of its arguments.
double standard_normal(std::uint64_t master_seed, std::uint64_t sample_index, std::uint64_t index) noexcept;

/// Deterministic path for (master_seed, sample_index): increments are
/// i.i.d. N(0, T / 2^L). Requires 0 < T <= 65536 and 0 <= L <= 24.
BrownianPath sample_path(double horizon, int level, std::uint64_t master_seed, std::uint64_t sample_index);

std::vector<double> coarsen(const BrownianPath& path, int level);

/// FNV-1a hash over the bit patterns of a sequence of increments.
std::uint64_t increment_checksum(std::span<const double> increments) noexcept;

}  // namespace spde
