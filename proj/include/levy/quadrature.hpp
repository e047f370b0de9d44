#pragma once

#include <functional>

namespace levy::quad {

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (31 points) on [a, b]; b may be +infinity.
/// Semi-infinite ranges are split at a + 64 so slowly decaying log-scale
/// integrands keep their resolution near the left end.
double integrate(const Integrand& f, double a, double b, double rel_tol);

/// Fixed 15-point Gauss-Legendre rule on [a, b].
double gauss15(const Integrand& f, double a, double b);

}  // namespace levy::quad
