#include "smre/signal_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "smre/detail/format.hpp"
#include "smre/error.hpp"

namespace smre::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
void put_le(std::ofstream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::ifstream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!in) throw InvalidArgument("read_raw: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const Signal& s) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("write_csv: cannot open " + path.string());
  out << "value\n";
  for (double v : s.values()) out << detail::format_double(v) << '\n';
}

Signal read_csv(const std::filesystem::path& path, const std::optional<Grid>& grid) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("read_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "value")
    throw InvalidArgument("read_csv: expected header 'value' in " + path.string());
  std::vector<double> values;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
      throw InvalidArgument("read_csv: malformed value '" + t + "'");
    values.push_back(v);
  }
  Grid g = grid ? *grid : Grid::line(values.size());
  Signal s(g, std::move(values));
  if (!s.all_finite()) throw InvalidArgument("read_csv: non-finite value");
  return s;
}

void write_raw(const std::filesystem::path& path, const Signal& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("write_raw: cannot open " + path.string());
  const auto& dims = s.grid().dims();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dims[0]));
  put_le<std::uint32_t>(out, dims.size() == 2 ? static_cast<std::uint32_t>(dims[1]) : 0U);
  for (double v : s.values()) put_le<double>(out, v);
}

Signal read_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("read_raw: cannot open " + path.string());
  const auto n0 = get_le<std::uint32_t>(in);
  const auto n1 = get_le<std::uint32_t>(in);
  Grid g = n1 == 0 ? Grid::line(n0) : Grid({n0, n1});
  Signal s(g);
  for (auto& v : s.values()) v = get_le<double>(in);
  return s;
}

}  // namespace smre::io
