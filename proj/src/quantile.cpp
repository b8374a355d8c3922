#include "smre/quantile.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "smre/detail/format.hpp"
#include "smre/error.hpp"

namespace smre {

QuantileTable QuantileTable::from_samples(std::vector<double> samples, std::uint64_t seed) {
  require(samples.size() >= 1, "QuantileTable: no samples");
  QuantileTable t;
  t.by_replicate = std::move(samples);
  t.sorted = t.by_replicate;
  std::sort(t.sorted.begin(), t.sorted.end());
  t.seed = seed;
  return t;
}

QuantileTable simulate(const MrStatistic& stat, std::size_t M, std::uint64_t seed, unsigned threads) {
  require(M >= 2, "simulate: need at least two draws");
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, M));
  const Dictionary& dict = stat.dictionary();
  const Grid& grid = dict.grid();
  const NoiseModel noise{1.0, seed};
  std::vector<double> out(M);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    Projector proj(dict);
    std::vector<double> coeff(dict.size());
    for (std::size_t r = next++; r < M; r = next++) {
      const Signal eps = draw_white_noise(grid, noise, r);
      out[r] = stat.evaluate(proj, eps.values(), coeff).value;
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return QuantileTable::from_samples(std::move(out), seed);
}

QuantileTable simulate(const Dictionary& dict, const MrFamily& family, std::size_t M,
                       std::uint64_t seed, unsigned threads) {
  return simulate(MrStatistic(dict, family), M, seed, threads);
}

namespace {

// 0-based index of the smallest sample with ecdf >= p.
std::size_t ecdf_rank(std::size_t M, double p) {
  const double target = p * static_cast<double>(M);
  auto k = static_cast<std::size_t>(std::ceil(target - 1e-9 * static_cast<double>(M)));
  k = std::clamp<std::size_t>(k, 1, M);
  return k - 1;
}

}  // namespace

double quantile(const QuantileTable& table, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "quantile: alpha must lie in (0, 1)");
  return table.sorted[ecdf_rank(table.size(), 1.0 - alpha)];
}

double quantile_se(const QuantileTable& table, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "quantile_se: alpha must lie in (0, 1)");
  const std::size_t M = table.size();
  const double p = 1.0 - alpha;
  const double sd = std::sqrt(static_cast<double>(M) * p * (1.0 - p));
  const auto k = static_cast<double>(ecdf_rank(M, p));
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(k - sd)));
  const auto hi = static_cast<std::size_t>(std::min(static_cast<double>(M - 1), std::ceil(k + sd)));
  return 0.5 * (table.sorted[hi] - table.sorted[lo]);
}

double median(const QuantileTable& table) { return quantile(table, 0.5); }

double borel_bound(double med, double lipschitz, double alpha) {
  require(alpha > 0.0 && alpha < 0.5, "borel_bound: alpha must lie in (0, 1/2)");
  return med + lipschitz * std::sqrt(-2.0 * std::log(2.0 * alpha));
}

double max_abs_normal_quantile(std::size_t N, double alpha) {
  require(N >= 1, "max_abs_normal_quantile: N must be positive");
  require(alpha > 0.0 && alpha < 1.0, "max_abs_normal_quantile: alpha must lie in (0, 1)");
  // P(max|Z| <= x) = (2 Phi(x) - 1)^N = 1 - alpha. Written via log1p/expm1 so
  // that tiny per-coordinate tail masses survive for large N.
  const double tail = -std::expm1(std::log1p(-alpha) / static_cast<double>(N));  // P(|Z| > x)
  boost::math::normal_distribution<double> nd;
  return boost::math::quantile(boost::math::complement(nd, 0.5 * tail));
}

void write_table_csv(const std::filesystem::path& path, const QuantileTable& table) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("write_table_csv: cannot open " + path.string());
  out << "replicate,statistic\n";
  for (std::size_t r = 0; r < table.by_replicate.size(); ++r)
    out << r << ',' << detail::format_double(table.by_replicate[r]) << '\n';
}

QuantileTable read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("read_table_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("replicate,statistic", 0) != 0)
    throw InvalidArgument("read_table_csv: expected header 'replicate,statistic'");
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("read_table_csv: malformed row");
    std::string field = line.substr(comma + 1);
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw InvalidArgument("read_table_csv: malformed value '" + field + "'");
    values.push_back(v);
  }
  return QuantileTable::from_samples(std::move(values));
}

}  // namespace smre
