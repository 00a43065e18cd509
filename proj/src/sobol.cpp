#include "wrbf/error.hpp"
#include "wrbf/geometry.hpp"

#include <array>
#include <cstdint>

namespace wrbf {

namespace {

constexpr int kBits = 32;

struct DirectionInit {
  int degree;                 // s
  std::uint32_t poly;         // a, interior coefficients of the primitive polynomial
  std::array<std::uint32_t, 5> m;  // initial m_1..m_s
};

// Joe & Kuo, new-joe-kuo-6.21201, dimensions 2..8. Dimension 1 is the
// van der Corput sequence.
constexpr std::array<DirectionInit, kSobolMaxDim - 1> kJoeKuo = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
}};

std::array<std::uint32_t, kBits> direction_numbers(int dim) {
  std::array<std::uint32_t, kBits> v{};
  if (dim == 0) {
    for (int i = 0; i < kBits; ++i) v[i] = std::uint32_t{1} << (kBits - 1 - i);
    return v;
  }
  const auto& init = kJoeKuo[static_cast<std::size_t>(dim - 1)];
  const int s = init.degree;
  for (int i = 0; i < s; ++i) v[i] = init.m[i] << (kBits - 1 - i);
  for (int i = s; i < kBits; ++i) {
    std::uint32_t value = v[i - s] ^ (v[i - s] >> s);
    for (int k = 1; k < s; ++k) {
      if ((init.poly >> (s - 1 - k)) & 1u) value ^= v[i - k];
    }
    v[i] = value;
  }
  return v;
}

}  // namespace

PointSet sobol_points(int d, int count) {
  require(d >= 1 && d <= kSobolMaxDim, ErrorCode::invalid_argument,
          "sobol_points supports 1 <= d <= " + std::to_string(kSobolMaxDim));
  require(count >= 0, ErrorCode::invalid_argument, "sobol_points needs count >= 0");
  require(static_cast<long long>(count) < (1LL << kBits) - 1, ErrorCode::out_of_range,
          "sobol_points count exceeds the 32-bit sequence length");

  std::vector<std::array<std::uint32_t, kBits>> dirs;
  dirs.reserve(static_cast<std::size_t>(d));
  for (int m = 0; m < d; ++m) dirs.push_back(direction_numbers(m));

  constexpr double scale = 1.0 / 4294967296.0;  // 2^-32
  PointSet out(count, d);
  std::vector<std::uint32_t> state(static_cast<std::size_t>(d), 0u);
  // Gray-code ordering; index i produces point i + 1 of the sequence.
  for (int i = 0; i < count; ++i) {
    std::uint32_t c = 0;
    for (std::uint32_t value = static_cast<std::uint32_t>(i); value & 1u; value >>= 1) ++c;
    for (int m = 0; m < d; ++m) {
      state[m] ^= dirs[m][c];
      out(i, m) = 2.0 * (state[m] * scale) - 1.0;
    }
  }
  return out;
}

}  // namespace wrbf
