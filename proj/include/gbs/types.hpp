#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace gbs {

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using CMatrix = MatrixX<Complex>;
using CVector = VectorX<Complex>;

// Bad arguments, malformed inputs, broken file schemas.  CLI exit code 2.
struct validation_error : std::invalid_argument {
  explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// A guarded computation would exceed its declared budget.  CLI exit code 3.
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical integrity check failed (non-real determinant, indefinite Q, ...).
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gbs
