#include "ve2d/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>

#include "ve2d/error.hpp"

namespace ve2d {

namespace detail {
void* fftw_allocate(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}
void fftw_release(void* p) noexcept { fftw_free(p); }
}  // namespace detail

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw InvalidArgument("fields live on different grids");
}

ScalarField::ScalarField(const Grid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const Grid& grid, RealBuffer values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid.size()) throw InvalidArgument("sample count does not match grid");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * o.values_[k];
  return *this;
}

bool ScalarField::is_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField out(a.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

Spectrum::Spectrum(const Grid& grid) : grid_(grid), coeffs_(grid.spectral_size(), Complex{}) {}

Spectrum::Spectrum(const Grid& grid, ComplexBuffer coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid.spectral_size()) {
    throw InvalidArgument("coefficient count does not match grid");
  }
}

Spectrum& Spectrum::operator+=(const Spectrum& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  return *this;
}

Spectrum& Spectrum::operator-=(const Spectrum& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  return *this;
}

Spectrum& Spectrum::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

Spectrum& Spectrum::axpy(double s, const Spectrum& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += s * o.coeffs_[k];
  return *this;
}

Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
Spectrum operator*(double s, Spectrum a) { return a *= s; }

VectorField2::VectorField2(const Grid& grid) : c_{ScalarField(grid), ScalarField(grid)} {}

VectorField2::VectorField2(ScalarField first, ScalarField second)
    : c_{std::move(first), std::move(second)} {
  require_same_grid(c_[0].grid(), c_[1].grid());
}

VectorField2& VectorField2::operator+=(const VectorField2& o) {
  c_[0] += o.c_[0];
  c_[1] += o.c_[1];
  return *this;
}

VectorField2& VectorField2::operator-=(const VectorField2& o) {
  c_[0] -= o.c_[0];
  c_[1] -= o.c_[1];
  return *this;
}

VectorField2& VectorField2::operator*=(double s) {
  c_[0] *= s;
  c_[1] *= s;
  return *this;
}

double l2_norm_sq(const ScalarField& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v * v;
  const double h = f.grid().spacing();
  return acc * h * h;
}

double l2_norm(const ScalarField& f) { return std::sqrt(l2_norm_sq(f)); }

double l2_norm_sq(const VectorField2& f) { return l2_norm_sq(f[0]) + l2_norm_sq(f[1]); }

double linf_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double linf_norm(const VectorField2& f) { return std::max(linf_norm(f[0]), linf_norm(f[1])); }

double spectral_l2_norm_sq(const Spectrum& s) {
  const Grid& g = s.grid();
  const int n = g.n();
  double acc = 0.0;
  for (int p1 = 0; p1 < n; ++p1) {
    for (int p2 = 0; p2 <= n / 2; ++p2) {
      const double w = (p2 == 0 || p2 == n / 2) ? 1.0 : 2.0;
      acc += w * std::norm(s(p1, p2));
    }
  }
  return acc * g.box_len() * g.box_len();
}

}  // namespace ve2d
