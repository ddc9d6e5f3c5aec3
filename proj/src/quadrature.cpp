#include "freeprob/quadrature.hpp"

#include <algorithm>

namespace freeprob {

double simpson(const std::function<double(double)>& f, double a, double b, int points) {
  int intervals = std::max(points, 3) - 1;
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double odd = 0.0;
  double even = 0.0;
  for (int i = 1; i < intervals; ++i) {
    const double x = a + h * i;
    (i % 2 != 0 ? odd : even) += f(x);
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

}  // namespace freeprob
