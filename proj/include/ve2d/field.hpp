#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

#include "ve2d/grid.hpp"

namespace ve2d {

namespace detail {
void* fftw_allocate(std::size_t bytes);
void fftw_release(void* p) noexcept;
}  // namespace detail

/// SIMD-aligned storage so every buffer can be handed to a cached FFT plan.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(detail::fftw_allocate(n * sizeof(T)));
  }
  void deallocate(T* p, std::size_t) noexcept { detail::fftw_release(p); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using Complex = std::complex<double>;
using RealBuffer = std::vector<double, FftwAllocator<double>>;
using ComplexBuffer = std::vector<Complex, FftwAllocator<Complex>>;

/// Real samples of a field on the grid (physical representation).
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid);
  ScalarField(const Grid& grid, RealBuffer values);

  template <class F>
  static ScalarField from_function(const Grid& grid, F&& f) {
    ScalarField out(grid);
    for (int i1 = 0; i1 < grid.n(); ++i1) {
      const double x1 = grid.coord(i1);
      for (int i2 = 0; i2 < grid.n(); ++i2) {
        out.values_[grid.index(i1, i2)] = f(x1, grid.coord(i2));
      }
    }
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int i1, int i2) const noexcept { return values_[grid_.index(i1, i2)]; }
  double& operator()(int i1, int i2) noexcept { return values_[grid_.index(i1, i2)]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  double& operator[](std::size_t k) noexcept { return values_[k]; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  /// this += s * o
  ScalarField& axpy(double s, const ScalarField& o);

  bool is_finite() const noexcept;

 private:
  Grid grid_;
  RealBuffer values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator-(ScalarField a);
/// Pointwise product.
ScalarField multiply(const ScalarField& a, const ScalarField& b);

/// Half-spectrum Fourier coefficients, normalized so that coefficient (0,0)
/// is the field mean.
class Spectrum {
 public:
  explicit Spectrum(const Grid& grid);
  Spectrum(const Grid& grid, ComplexBuffer coeffs);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }
  Complex* data() noexcept { return coeffs_.data(); }
  const Complex* data() const noexcept { return coeffs_.data(); }
  std::size_t size() const noexcept { return coeffs_.size(); }

  Complex operator()(int p1, int p2) const noexcept { return coeffs_[grid_.spectral_index(p1, p2)]; }
  Complex& operator()(int p1, int p2) noexcept { return coeffs_[grid_.spectral_index(p1, p2)]; }

  Spectrum& operator+=(const Spectrum& o);
  Spectrum& operator-=(const Spectrum& o);
  Spectrum& operator*=(double s);
  Spectrum& axpy(double s, const Spectrum& o);

 private:
  Grid grid_;
  ComplexBuffer coeffs_;
};

Spectrum operator+(Spectrum a, const Spectrum& b);
Spectrum operator-(Spectrum a, const Spectrum& b);
Spectrum operator*(double s, Spectrum a);

/// Two scalar components on one shared grid. Components are numbered 1 and 2
/// in the math; operator[] takes 0 or 1.
class VectorField2 {
 public:
  explicit VectorField2(const Grid& grid);
  VectorField2(ScalarField first, ScalarField second);

  const Grid& grid() const noexcept { return c_[0].grid(); }
  const ScalarField& operator[](int i) const noexcept { return c_[i]; }
  ScalarField& operator[](int i) noexcept { return c_[i]; }

  VectorField2& operator+=(const VectorField2& o);
  VectorField2& operator-=(const VectorField2& o);
  VectorField2& operator*=(double s);

 private:
  ScalarField c_[2];
};

/// L2 norm by rectangle-rule quadrature (spectrally exact on the torus).
double l2_norm(const ScalarField& f);
double l2_norm_sq(const ScalarField& f);
double l2_norm_sq(const VectorField2& f);
double linf_norm(const ScalarField& f);
double linf_norm(const VectorField2& f);
/// Parseval sum h^2 n^2 sum |c_m|^2 over the full spectrum.
double spectral_l2_norm_sq(const Spectrum& s);

void require_same_grid(const Grid& a, const Grid& b);

}  // namespace ve2d
