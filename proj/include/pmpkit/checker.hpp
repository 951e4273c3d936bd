#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "pmpkit/bv.hpp"
#include "pmpkit/ode.hpp"
#include "pmpkit/problem.hpp"
#include "pmpkit/stieltjes_cauchy.hpp"

namespace pmpkit {

/// Candidate for the necessary conditions: control, cost multiplier and one
/// monotone normalized multiplier measure per constraint. The state is always
/// recomputed from the control, never trusted as input.
struct Candidate {
  ControlSignal u;
  double psi = 1.0;
  std::vector<NbvMeasure> etas;
};

struct CheckTolerances {
  double feasibility = 1e-6;
  double hamiltonian_sup = 1e-3;
  double slackness = 1e-4;
  double transversality = 1e-8;
  double nontriviality_floor = 1e-10;
};

enum class Verdict { Pass, Fail, Error };

struct ConditionResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Certificate {
  Verdict verdict = Verdict::Error;
  std::vector<ConditionResult> conditions;
  double psi = 0.0;
  double nontriviality = 0.0;       // psi^2 + sum_i V(eta_i)^2
  double hamiltonian_l1 = 0.0;      // informational
  bool monotone_multipliers = true;
  std::string error_message;        // set when verdict == Error
};

/// Adjoint of the necessary conditions: backward Cauchy-Stieltjes solve with
/// A = d1f along (q*, u*), B_i = d1G_i along q*, p(T) = psi grad Psi(q*(T)).
BvPath assemble_adjoint(const Problem& problem, const Candidate& candidate, const Trajectory& q,
                        const TimeGrid& grid);

struct HamiltonianReport {
  double sup_residual = 0.0;  // over non-atom nodes
  double l1_residual = 0.0;
  std::vector<double> per_node;
  std::vector<Eigen::VectorXd> minimizer;
};

/// Pointwise Hamiltonian gap H(q*, u*, p, t) - min_Omega H at every node.
/// p is read by its left value at interior nodes. Nodes listed in
/// `excluded_nodes` (atom times) do not enter the sup.
HamiltonianReport hamiltonian_residual(const Problem& problem, const Trajectory& q,
                                       const ControlSignal& u, const BvPath& p,
                                       const std::vector<std::size_t>& excluded_nodes = {});

/// | int_0^T G_i(q*(t), t) d eta_i | per constraint.
std::vector<double> slackness_residual(const Problem& problem, const Trajectory& q,
                                       const std::vector<NbvMeasure>& etas);

Certificate check_certificate(const Problem& problem, const Candidate& candidate,
                              const TimeGrid& grid, const CheckTolerances& tolerances = {});

/// Minimize H(q, ., p, t) = <p, f(q, ., t)> over the control set.
/// FiniteSet: exact enumeration. Box: 33-point tensor grid plus 20 rounds of
/// per-axis golden-section refinement. Ball: interval search for m = 1,
/// radial x angular grid for m = 2; UnsupportedOmega beyond.
std::pair<double, Eigen::VectorXd> minimize_hamiltonian(const Problem& problem,
                                                        const Eigen::VectorXd& q,
                                                        const Eigen::VectorXd& p, double t);

}  // namespace pmpkit
