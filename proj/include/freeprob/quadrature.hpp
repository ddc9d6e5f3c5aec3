#pragma once

#include <functional>

namespace freeprob {

/// Composite Simpson rule on [a, b] using `points` equally spaced nodes.  An
/// even point count is raised by one so the interval count is even; at least
/// three nodes are used.
double simpson(const std::function<double(double)>& f, double a, double b, int points);

}  // namespace freeprob
