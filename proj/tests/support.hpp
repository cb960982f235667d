#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hsi/hsi.hpp"

namespace support {

inline hsi::HyperCube random_cube(std::size_t r, std::size_t c, std::size_t b, std::uint64_t seed) {
  hsi::RandomStream rng(seed, "test-cube");
  hsi::HyperCube x(r, c, b);
  for (double& v : x.storage()) v = rng.normal();
  return x;
}

inline hsi::FpaImage random_image(std::size_t r, std::size_t c, std::uint64_t seed) {
  hsi::RandomStream rng(seed, "test-image");
  hsi::FpaImage y(r, c);
  for (double& v : y.storage()) v = rng.normal();
  return y;
}

inline std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hsi_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) { return hsi::detail::read_file(p.string()); }

}  // namespace support
