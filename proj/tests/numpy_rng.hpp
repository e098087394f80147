// Bit-exact clone of the legacy numpy RandomState normal generator (MT19937
// with scalar seeding, 53-bit doubles, polar Gaussians with a cached spare).
// Used to regenerate reference datasets whose test statistics were frozen
// from an independent statistics package.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace testutil {

class NumpyRandom {
 public:
  explicit NumpyRandom(std::uint32_t seed) { init_genrand(seed); }

  std::uint32_t next_u32() {
    if (index_ >= kN) generate();
    std::uint32_t y = mt_[index_++];
    y ^= y >> 11;
    y ^= (y << 7) & 0x9d2c5680u;
    y ^= (y << 15) & 0xefc60000u;
    y ^= y >> 18;
    return y;
  }

  double next_double() {
    const std::uint32_t a = next_u32() >> 5, b = next_u32() >> 6;
    return (a * 67108864.0 + b) / 9007199254740992.0;
  }

  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double x1, x2, r2;
    do {
      x1 = 2.0 * next_double() - 1.0;
      x2 = 2.0 * next_double() - 1.0;
      r2 = x1 * x1 + x2 * x2;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = f * x1;
    has_spare_ = true;
    return f * x2;
  }

  std::vector<double> standard_normal(std::size_t n) {
    std::vector<double> out(n);
    for (double& x : out) x = gauss();
    return out;
  }

 private:
  static constexpr int kN = 624;

  void init_genrand(std::uint32_t s) {
    mt_[0] = s;
    for (int i = 1; i < kN; ++i)
      mt_[i] = 1812433253u * (mt_[i - 1] ^ (mt_[i - 1] >> 30)) + static_cast<std::uint32_t>(i);
    index_ = kN;
  }

  void generate() {
    constexpr std::uint32_t kUpper = 0x80000000u, kLower = 0x7fffffffu;
    constexpr std::uint32_t kMag[2] = {0u, 0x9908b0dfu};
    for (int i = 0; i < kN; ++i) {
      const std::uint32_t y = (mt_[i] & kUpper) | (mt_[(i + 1) % kN] & kLower);
      mt_[i] = mt_[(i + 397) % kN] ^ (y >> 1) ^ kMag[y & 1u];
    }
    index_ = 0;
  }

  std::uint32_t mt_[kN] = {};
  int index_ = kN;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace testutil
