#pragma once

// Deterministic low-discrepancy sampling of chart domains. Halton radical
// inverse in bases 2, 3, 5; the seed offsets the sequence start index.

#include <array>
#include <cstdint>
#include <vector>

namespace crcx {

inline double radical_inverse(std::uint64_t n, std::uint32_t base) {
  double inv = 1.0 / base, x = 0.0, scale = inv;
  while (n != 0) {
    x += static_cast<double>(n % base) * scale;
    n /= base;
    scale *= inv;
  }
  return x;
}

inline std::array<double, 3> halton3(std::uint64_t index) {
  return {radical_inverse(index, 2), radical_inverse(index, 3), radical_inverse(index, 5)};
}

struct Box {
  std::array<double, 3> lo{-1, -1, -1};
  std::array<double, 3> hi{1, 1, 1};
};

// Points in the box with a fractional margin kept clear on every side.
inline std::vector<std::array<double, 3>> sample_box(const Box& box, int count,
                                                     std::uint64_t seed,
                                                     double margin_fraction = 0.05) {
  std::vector<std::array<double, 3>> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    const auto h = halton3(1 + seed + static_cast<std::uint64_t>(n));
    std::array<double, 3> p{};
    for (int i = 0; i < 3; ++i) {
      const double lo = box.lo[static_cast<std::size_t>(i)], hi = box.hi[static_cast<std::size_t>(i)];
      const double m = margin_fraction * (hi - lo);
      p[static_cast<std::size_t>(i)] = lo + m + (hi - lo - 2 * m) * h[static_cast<std::size_t>(i)];
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace crcx
