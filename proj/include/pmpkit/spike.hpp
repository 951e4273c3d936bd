#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "pmpkit/grid.hpp"
#include "pmpkit/ode.hpp"
#include "pmpkit/problem.hpp"

namespace pmpkit {

/// Finite union of disjoint subintervals of [0, T] with total length rho * T.
class SpikeSet {
 public:
  SpikeSet(double rho, std::vector<std::pair<double, double>> intervals, double horizon);

  double rho() const noexcept { return rho_; }
  double horizon() const noexcept { return horizon_; }
  const std::vector<std::pair<double, double>>& intervals() const noexcept { return intervals_; }

  double total_length() const;
  bool contains(double t) const;
  std::vector<double> endpoints() const;

 private:
  double rho_;
  double horizon_;
  std::vector<std::pair<double, double>> intervals_;  // right-open [a, b)
};

/// Constructive selection set: h is read as piecewise constant on the grid
/// cells (left-node sample); cells are split until each carries at most
/// rho^2 / (2 (rho + 1)) of the mass of |h|, then the leading subinterval of
/// proportion rho of every cell is selected. The selection is exact per cell,
/// so lambda(Q_rho) = rho T and the running-integral bound
///   sup_t | int_0^t (1 - 1_Q/rho) h | <= rho
/// is verified internally at all breakpoints before returning.
SpikeSet build_qrho(const std::vector<Eigen::VectorXd>& h_at_nodes, double rho,
                    const TimeGrid& grid);

/// Control equal to u_prime on the spike set and u elsewhere, realized
/// exactly on the merged grid refined with the spike endpoints.
ControlSignal spike_control(const ControlSignal& u, const ControlSignal& u_prime,
                            const SpikeSet& spikes);

/// h_{u,u'}(t_k) = f(q(t_k,u), u'(t_k), t_k) - f(q(t_k,u), u(t_k), t_k).
std::vector<Eigen::VectorXd> spike_direction(const Problem& problem, const Trajectory& q,
                                             const ControlSignal& u, const ControlSignal& u_prime,
                                             const TimeGrid& grid);

/// Variation vector: solves w' = d1f(q(.,u), u, .) w + h_{u,u'}, w(0) = 0.
Trajectory variation_vector(const Problem& problem, const ControlSignal& u,
                            const ControlSignal& u_prime, const TimeGrid& grid);

/// For each rho: err(rho) = sup | (q(., u(., rho)) - q(., u)) / rho - w |.
std::vector<std::pair<double, double>> differentiability_probe(const Problem& problem,
                                                               const ControlSignal& u,
                                                               const ControlSignal& u_prime,
                                                               const std::vector<double>& rhos,
                                                               const TimeGrid& grid);

}  // namespace pmpkit
