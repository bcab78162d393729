#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace emtherm {

using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: config files, geometry parameters, malformed mesh files,
// schema violations. The CLI maps this to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Solver breakdowns: singular or indefinite systems, residual tolerance not
// met, NaN in a state vector. The CLI maps this to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

enum class SolverBackend {
  direct,  // sparse LDLT factorization
  cg,      // conjugate gradient with incomplete-Cholesky preconditioner
};

// Relative residual bound every linear solve is verified against, whichever
// backend produced the solution.
inline constexpr double kLinearSolveTolerance = 1e-10;

inline constexpr const char* kVersion = "0.1.0";

}  // namespace emtherm
