#pragma once

#include <cstddef>

namespace csdk {

/// Unit roundoff of IEEE double precision, 2^-53.
inline constexpr double unit_roundoff = 1.1102230246251565e-16;

/// Tolerances are expressed as c * n * u. The default constant c is 50.
struct Tolerance {
  double c = 50.0;

  [[nodiscard]] double scaled(std::ptrdiff_t n) const {
    return c * static_cast<double>(n < 1 ? 1 : n) * unit_roundoff;
  }
};

/// Number of OpenMP threads the kernels may use. Reads CSDK_THREADS once;
/// falls back to the OpenMP default when unset or invalid.
int thread_limit();

/// Overrides the thread limit for the rest of the process.
void set_thread_limit(int threads);

}  // namespace csdk
