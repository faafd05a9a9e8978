#pragma once

namespace deceptive {

// Principal branch W_0 on [0, inf): the w >= 0 with w e^w = x.
// Throws std::domain_error for x < 0 or NaN.
double lambert_w(double x);

}  // namespace deceptive
