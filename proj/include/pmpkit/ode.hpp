#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "pmpkit/grid.hpp"
#include "pmpkit/problem.hpp"

namespace pmpkit {

enum class Direction { Forward, Backward };

/// Piecewise-constant control on right-open cells: the dynamics see the value
/// of cell k on [t_k, t_{k+1}).
class ControlSignal {
 public:
  ControlSignal(TimeGrid grid, std::vector<Eigen::VectorXd> cell_values);
  static ControlSignal constant(TimeGrid grid, const Eigen::VectorXd& value);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }
  const Eigen::VectorXd& cell_value(std::size_t k) const { return values_[k]; }
  const Eigen::VectorXd& value(double t) const { return values_[grid_.cell_of(t)]; }

  /// max over cells of the max-abs component.
  double linf_norm() const;

  ControlSignal resampled_on(const TimeGrid& finer) const;

 private:
  TimeGrid grid_;
  std::vector<Eigen::VectorXd> values_;
  int dim_ = 0;
};

/// L1 distance of two controls (Euclidean norm in R^m inside the integral),
/// evaluated exactly on the merged grid.
double l1_distance(const ControlSignal& a, const ControlSignal& b);

/// State samples at nodes; continuous interpretation by linear interpolation.
class Trajectory {
 public:
  Trajectory(TimeGrid grid, std::vector<Eigen::VectorXd> states);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }
  const Eigen::VectorXd& state(std::size_t k) const { return states_[k]; }
  Eigen::VectorXd value(double t) const;

  double sup_distance(const Trajectory& other) const;

 private:
  TimeGrid grid_;
  std::vector<Eigen::VectorXd> states_;
  int dim_ = 0;
};

/// Classical RK4 on the cells of `grid` (which must refine the control's
/// grid, so the control is constant on every integration cell).
/// Throws BlowUp when the state's max-abs component exceeds 1e8.
Trajectory solve_forward(const Problem& problem, const ControlSignal& u, const TimeGrid& grid);

/// State-transition matrices Z(t_i, t_j) of dZ/dt = A(t) Z, stored as the
/// column Z(t_k, 0) plus LU factors composed on demand.
class TransitionTable {
 public:
  TransitionTable(TimeGrid grid, std::vector<Eigen::MatrixXd> z_from_origin);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return static_cast<int>(z_[0].rows()); }

  const Eigen::MatrixXd& from_origin(std::size_t k) const { return z_[k]; }
  /// Z(t_i, t_j) = Z(t_i, 0) Z(t_j, 0)^{-1}.
  Eigen::MatrixXd between(std::size_t i, std::size_t j) const;
  Eigen::VectorXd solve_from_origin(std::size_t k, const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd solve_transpose_from_origin(std::size_t k, const Eigen::VectorXd& rhs) const;

 private:
  TimeGrid grid_;
  std::vector<Eigen::MatrixXd> z_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_transpose_;
};

/// Z(., 0) by RK4 on the matrix equation, A sampled at nodes and interpolated
/// linearly inside cells. Throws SingularTransition when any Z(t_k, 0) has
/// condition number above 1e12.
TransitionTable transition_matrix(const std::vector<Eigen::MatrixXd>& a_at_nodes,
                                  const TimeGrid& grid);

/// Duhamel evaluation of the linear Cauchy problems
///   forward:  q' = A q + B,  q(0) = boundary,
///   backward: -p' = A^T p + B,  p(T) = boundary,
/// with A, B sampled at nodes. Cell sources are integrated by the same
/// fourth-order kernel as the transition matrices.
Trajectory duhamel_linear(const std::vector<Eigen::MatrixXd>& a_at_nodes,
                          const std::vector<Eigen::VectorXd>& b_at_nodes,
                          const Eigen::VectorXd& boundary, Direction direction,
                          const TimeGrid& grid);

struct LipschitzEstimate {
  double R = 0.0;  // control bound defining the tube
  double L = 0.0;  // bound on f and its first partials over the sampled tube
  double C = 0.0;  // L * exp(T * L)
};

/// Samples the tube { |x - q(t,u)| <= 1, |v| <= R } at all grid nodes with
/// axis-aligned state offsets and Omega corner/center controls. The result is
/// a deterministic finite-design bound, i.e. a lower estimate of the true
/// supremum.
LipschitzEstimate estimate_lipschitz(const Problem& problem, const ControlSignal& u, double R,
                                     const TimeGrid& grid);

}  // namespace pmpkit
