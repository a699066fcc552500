#pragma once

#include <cstddef>
#include <numbers>

namespace ve2d {

/// Periodic n x n box of side L. Physical coordinates are centered,
/// x = -L/2 + i*h for i in [0, n); wavenumbers are 2*pi*m/L with integer
/// m in [-n/2, n/2).
///
/// Sample (i1, i2) lives at offset i1*n + i2, so x2 is the fast index. The
/// half spectrum keeps the full m1 axis and m2 in [0, n/2].
class Grid {
 public:
  Grid(int n, double box_len);

  int n() const noexcept { return n_; }
  double box_len() const noexcept { return box_len_; }
  double spacing() const noexcept { return box_len_ / n_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  int half_n() const noexcept { return n_ / 2 + 1; }
  std::size_t spectral_size() const noexcept {
    return static_cast<std::size_t>(n_) * half_n();
  }

  double coord(int i) const noexcept { return -0.5 * box_len_ + i * spacing(); }
  /// Signed integer mode of full-axis index p.
  int mode(int p) const noexcept { return p < n_ / 2 ? p : p - n_; }
  double wavenumber(int m) const noexcept {
    return 2.0 * std::numbers::pi * m / box_len_;
  }

  std::size_t index(int i1, int i2) const noexcept {
    return static_cast<std::size_t>(i1) * n_ + i2;
  }
  std::size_t spectral_index(int p1, int p2) const noexcept {
    return static_cast<std::size_t>(p1) * half_n() + p2;
  }

  bool operator==(const Grid&) const = default;

 private:
  int n_;
  double box_len_;
};

}  // namespace ve2d
