#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pmpkit/grid.hpp"

namespace pmpkit {

/// Vector-valued function of bounded variation: piecewise linear between
/// nodes with jumps only at nodes, stored as a left and a right limit per
/// node. The pointwise value at an interior node follows the left-continuous
/// convention; the value at T is the right slot (so a jump at T is included),
/// and the two slots agree at t = 0.
class BvPath {
 public:
  BvPath(TimeGrid grid, std::vector<Eigen::VectorXd> left, std::vector<Eigen::VectorXd> right);

  /// Constant path equal to `value` everywhere.
  static BvPath constant(TimeGrid grid, const Eigen::VectorXd& value);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }

  const Eigen::VectorXd& left(std::size_t k) const { return left_[k]; }
  const Eigen::VectorXd& right(std::size_t k) const { return right_[k]; }

  /// Pointwise value under the conventions above; linear interpolation
  /// strictly inside cells.
  Eigen::VectorXd value(double t) const;

  Eigen::VectorXd jump(std::size_t k) const { return right_[k] - left_[k]; }

  double sup_norm() const;

 private:
  TimeGrid grid_;
  std::vector<Eigen::VectorXd> left_, right_;
  int dim_ = 0;
};

/// Exact variation of the piecewise-linear-with-jumps representative:
/// sum of segment displacements plus jump magnitudes (Euclidean norms).
double total_variation(const BvPath& path);

/// Shift a scalar path so its value at 0 vanishes. The jump data is
/// unchanged, so Stieltjes integrals of continuous integrands are preserved;
/// the result is read under the left-continuous convention.
BvPath normalize_bv(const BvPath& path);

/// Monotone nondecreasing normalized BV multiplier: nonnegative atoms a_k at
/// nodes t_k (k >= 1) plus nonnegative constant densities on cells. Induces
/// the measure with d eta([a,b)) = eta(b) - eta(a); operationally every
/// integral over (from, to] owns the atoms at times s with from < s <= to,
/// so the atom at t = T belongs to every integral reaching T.
class NbvMeasure {
 public:
  NbvMeasure(TimeGrid grid, std::vector<double> atoms, std::vector<double> densities);

  static NbvMeasure zero(TimeGrid grid);
  static NbvMeasure single_atom(TimeGrid grid, double time, double weight);
  static NbvMeasure lebesgue(TimeGrid grid, double density = 1.0);

  const TimeGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& densities() const noexcept { return densities_; }

  /// Left-continuous normalized representative; eta(T) includes the atom at T.
  double eta(double t) const;
  double total_variation() const;
  bool is_zero() const;

  BvPath as_bvpath() const;

  NbvMeasure scaled(double factor) const;

 private:
  TimeGrid grid_;
  std::vector<double> atoms_;       // one per node, atoms_[0] == 0
  std::vector<double> densities_;   // one per cell
};

/// Riemann-Stieltjes integral of a continuous scalar integrand sampled at the
/// measure's grid nodes, over (from, to]. Atoms are exact; density parts use
/// the trapezoid rule on the sampled integrand.
double stieltjes_integral(const std::vector<double>& z_at_nodes, const NbvMeasure& eta,
                          double from, double to);

/// Componentwise vector version sharing the same conventions.
Eigen::VectorXd stieltjes_integral(const std::vector<Eigen::VectorXd>& z_at_nodes,
                                   const NbvMeasure& eta, double from, double to);

/// |LHS - RHS| of the Fubini-type identity
///   int_0^T (int_0^tau Phi(tau,s) ds) d eta(tau)
///     = int_0^T (int_s^T Phi(tau,s) d eta(tau)) ds,
/// with Phi sampled on the grid x grid lattice (phi[k*N + l] = Phi(t_k, t_l))
/// and all plain integrals by the trapezoid rule.
double fubini_residual(const std::vector<double>& phi_lattice, const NbvMeasure& eta);

}  // namespace pmpkit
