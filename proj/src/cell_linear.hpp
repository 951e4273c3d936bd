#pragma once

// Internal per-cell propagation kernels for linear (and measure-driven linear)
// problems. One RK4 step across a cell, with A and the source sampled at the
// cell endpoints and interpolated linearly at the midpoint. Every linear
// solver in the toolkit shares these kernels so that the Picard and
// Duhamel routes discretize the same fixed point.

#include <Eigen/Dense>

namespace pmpkit::detail {

/// RK4 one-step transfer matrix of dZ/dt = A(t) Z across one cell.
inline Eigen::MatrixXd cell_transfer(const Eigen::MatrixXd& A0, const Eigen::MatrixXd& A1,
                                     double h) {
  const Eigen::Index n = A0.rows();
  const Eigen::MatrixXd Am = 0.5 * (A0 + A1);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd K1 = A0;
  const Eigen::MatrixXd K2 = Am * (I + 0.5 * h * K1);
  const Eigen::MatrixXd K3 = Am * (I + 0.5 * h * K2);
  const Eigen::MatrixXd K4 = A1 * (I + h * K3);
  return I + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
}

/// RK4 integral of the inhomogeneity: value at the cell's right edge of
/// v' = A(t) v + g(t), v(left edge) = 0. Approximates
/// int_cell Z(right, tau) g(tau) dtau to the same order as cell_transfer.
inline Eigen::VectorXd cell_source_forward(const Eigen::MatrixXd& A0, const Eigen::MatrixXd& A1,
                                           const Eigen::VectorXd& g0, const Eigen::VectorXd& g1,
                                           double h) {
  const Eigen::MatrixXd Am = 0.5 * (A0 + A1);
  const Eigen::VectorXd gm = 0.5 * (g0 + g1);
  const Eigen::VectorXd k1 = g0;
  const Eigen::VectorXd k2 = Am * (0.5 * h * k1) + gm;
  const Eigen::VectorXd k3 = Am * (0.5 * h * k2) + gm;
  const Eigen::VectorXd k4 = A1 * (h * k3) + g1;
  return (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Backward analog: value at the cell's left edge of -p' = A(t)^T p + g(t),
/// p(right edge) = 0. Approximates int_cell Z(tau, left)^T g(tau) dtau.
inline Eigen::VectorXd cell_source_backward(const Eigen::MatrixXd& A0, const Eigen::MatrixXd& A1,
                                            const Eigen::VectorXd& g0, const Eigen::VectorXd& g1,
                                            double h) {
  const Eigen::MatrixXd Am = 0.5 * (A0 + A1).transpose();
  const Eigen::MatrixXd A0t = A0.transpose();
  const Eigen::VectorXd gm = 0.5 * (g0 + g1);
  // Time-reflected forward RK4 of -p' = A^T p + g from the right edge.
  const Eigen::VectorXd k1 = g1;
  const Eigen::VectorXd k2 = Am * (0.5 * h * k1) + gm;
  const Eigen::VectorXd k3 = Am * (0.5 * h * k2) + gm;
  const Eigen::VectorXd k4 = A0t * (h * k3) + g0;
  return (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace pmpkit::detail
