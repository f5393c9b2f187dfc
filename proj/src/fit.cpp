#include "agsp/fit.hpp"

#include <cmath>

#include "agsp/types.hpp"

namespace agsp {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("linear_fit: x and y differ in length");
  if (x.size() < 2) throw InvalidArgument("linear_fit: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("linear_fit: all x values coincide");
  LinearFit f;
  f.points = static_cast<int>(x.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ssr += r * r;
  }
  f.r2 = syy == 0.0 ? 1.0 : 1.0 - ssr / syy;
  return f;
}

LinearFit log2_fit(const std::vector<double>& x, const std::vector<double>& value, double lo, double hi) {
  if (x.size() != value.size()) throw InvalidArgument("log2_fit: x and values differ in length");
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (value[i] >= lo && value[i] <= hi && value[i] > 0.0) {
      fx.push_back(x[i]);
      fy.push_back(std::log2(value[i]));
    }
  return linear_fit(fx, fy);
}

}  // namespace agsp
