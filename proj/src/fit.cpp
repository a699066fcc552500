#include <cmath>
#include <sstream>

#include "ve2d/diagnostics.hpp"
#include "ve2d/error.hpp"

namespace ve2d {

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, double t0, double t1) {
  if (!(t0 < t1)) throw InvalidArgument("fit window must satisfy t0 < t1");
  std::vector<double> xs, ys;
  for (const auto& [t, v] : series) {
    if (t < t0 || t > t1) continue;
    if (!(t > 0.0) || !(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "cannot fit a power law through t = " << t << ", value = " << v;
      throw InvalidArgument(msg.str());
    }
    xs.push_back(std::log(t));
    ys.push_back(std::log(v));
  }
  const std::size_t n = xs.size();
  if (n < 8) {
    std::ostringstream msg;
    msg << "fit window holds " << n << " samples; at least 8 are required";
    throw InvalidArgument(msg.str());
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit window has no spread in t");
  DecayFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.samples = n;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ssr += e * e;
  }
  fit.stderr_ = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return fit;
}

}  // namespace ve2d
