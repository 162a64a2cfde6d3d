#pragma once

namespace egrowth {

/// Modified Bessel function I0 by its power series sum (x/2)^{2k} / (k!)^2,
/// summed until terms fall below 1e-17 relative.
double bessel_i0(double x);

/// d/dx I0(x) = I1(x).
double bessel_i1(double x);

}  // namespace egrowth
