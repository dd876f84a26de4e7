#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace bisweep {

using Vec2 = Eigen::Vector2d;
using cplx = std::complex<double>;

inline cplx to_cplx(const Vec2& v) { return {v.x(), v.y()}; }
inline Vec2 to_vec2(cplx z) { return {z.real(), z.imag()}; }

constexpr double pi = 3.14159265358979323846;

// Error taxonomy; the CLI maps these to exit codes (input 2, numeric 3,
// nonconvergence 4).
struct input_error : std::runtime_error {
  explicit input_error(const std::string& m) : std::runtime_error(m) {}
};
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& m) : std::runtime_error(m) {}
};
struct nonconvergence_error : std::runtime_error {
  explicit nonconvergence_error(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace bisweep
