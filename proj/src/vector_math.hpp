#pragma once

#include <cstddef>

namespace deceptive::detail {

// In-place batch transcendentals. Use glibc's vector math library on CPUs
// with AVX2 when it was found at configure time, std:: otherwise.
void erfc_inplace(double* x, std::size_t n);
void exp_inplace(double* x, std::size_t n);

// True when the vector path is active on this machine.
bool vector_math_active();

}  // namespace deceptive::detail
