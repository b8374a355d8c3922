#pragma once

// Monte-Carlo calibration of T_N(eps) under pure white noise.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "smre/mrstat.hpp"

namespace smre {

struct QuantileTable {
  std::vector<double> by_replicate;  // T_N(eps_r) in replicate order
  std::vector<double> sorted;        // ascending copy
  std::uint64_t seed = 0;

  std::size_t size() const { return sorted.size(); }
  static QuantileTable from_samples(std::vector<double> samples, std::uint64_t seed = 0);
};

/// M independent draws of T_N(eps). Replicate r always uses noise stream r, so
/// the table does not depend on `threads` (0 = hardware concurrency).
QuantileTable simulate(const MrStatistic& stat, std::size_t M, std::uint64_t seed,
                       unsigned threads = 0);
QuantileTable simulate(const Dictionary& dict, const MrFamily& family, std::size_t M,
                       std::uint64_t seed, unsigned threads = 0);

/// inf{q : ecdf(q) >= 1 - alpha}: the smallest sample whose ecdf reaches 1 - alpha.
double quantile(const QuantileTable& table, double alpha);
/// Standard error of quantile(table, alpha) from the binomial order-statistic
/// interval: half the spread between the order statistics one binomial sd
/// either side of the quantile's rank.
double quantile_se(const QuantileTable& table, double alpha);
double median(const QuantileTable& table);

/// med + L sqrt(-2 log(2 alpha)), alpha in (0, 1/2).
double borel_bound(double median, double lipschitz, double alpha);

/// Exact (1 - alpha)-quantile of max_{n <= N} |Z_n| for i.i.d. standard normals,
/// i.e. of the plain statistic over an orthonormal dictionary.
double max_abs_normal_quantile(std::size_t N, double alpha);

/// CSV with header `replicate,statistic`.
void write_table_csv(const std::filesystem::path& path, const QuantileTable& table);
QuantileTable read_table_csv(const std::filesystem::path& path);

}  // namespace smre
