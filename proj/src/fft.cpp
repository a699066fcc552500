#include "ve2d/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace ve2d {

namespace {

// Plans are created once per grid size under a lock; executing a plan on
// fresh arrays of matching alignment is thread safe.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  explicit PlanPair(int n) {
    RealBuffer r(static_cast<std::size_t>(n) * n);
    ComplexBuffer c(static_cast<std::size_t>(n) * (n / 2 + 1));
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    forward = fftw_plan_dft_r2c_2d(n, n, r.data(), cp, FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_2d(n, n, cp, r.data(), FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
  ~PlanPair() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
};

const PlanPair& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<PlanPair>(n);
  return *slot;
}

}  // namespace

Spectrum to_spectral(const ScalarField& f) {
  const Grid& g = f.grid();
  const PlanPair& p = plans_for(g.n());
  Spectrum out(g);
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(f.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out.coeffs()) c *= scale;
  return out;
}

ScalarField to_physical(const Spectrum& s) {
  const Grid& g = s.grid();
  const PlanPair& p = plans_for(g.n());
  ComplexBuffer scratch(s.coeffs().begin(), s.coeffs().end());
  ScalarField out(g);
  fftw_execute_dft_c2r(p.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  return out;
}

}  // namespace ve2d
