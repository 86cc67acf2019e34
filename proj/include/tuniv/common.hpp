#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace tuniv {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Thrown when a bounded numeric search fails to produce the witness it
/// was asked to certify (subfamily search exhausted, endpoint iteration
/// not converging, ...). Distinct from std::invalid_argument, which keeps
/// its usual meaning of a caller-side contract violation.
class certification_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double sqr(double x) { return x * x; }

}  // namespace tuniv
