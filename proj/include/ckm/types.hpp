#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace ckm {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Fractional assignment matrix: entry (v,c) is how much node v is assigned
/// to node c; the diagonal holds the openings.
template <typename Scalar>
using FractionalAssignment = MatrixX<Scalar>;

using Edge = std::array<int, 2>;
using EdgeList = std::vector<Edge>;

/// Numeric policy per scalar type. Exact scalars (e.g. a rational type)
/// compare with zero tolerance; floating point uses 1e-9.
template <typename Scalar>
struct scalar_traits {
  static constexpr bool is_exact = true;
  static Scalar tolerance() { return Scalar(0); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool is_exact = false;
  static double tolerance() { return 1e-9; }
};

template <typename Scalar>
Scalar default_tol() {
  return scalar_traits<Scalar>::tolerance();
}

/// A call violated a documented precondition.
struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};

/// The requested problem has no feasible solution.
struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An internal guarantee failed; indicates a bug or numeric breakdown
/// upstream, never bad user input.
struct invariant_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numeric failure or resource cap inside a solver.
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Variant { disjoint, non_disjoint };

}  // namespace ckm
