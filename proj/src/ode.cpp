#include "pmpkit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cell_linear.hpp"
#include "pmpkit/errors.hpp"

namespace pmpkit {

namespace {
constexpr double kBlowUpThreshold = 1e8;
constexpr double kConditionLimit = 1e12;
}  // namespace

ControlSignal::ControlSignal(TimeGrid grid, std::vector<Eigen::VectorXd> cell_values)
    : grid_(std::move(grid)), values_(std::move(cell_values)) {
  if (values_.size() != grid_.cell_count())
    throw Error(ErrorCode::DimensionMismatch, "control needs one value per cell");
  dim_ = static_cast<int>(values_.front().size());
  for (const auto& v : values_) {
    if (static_cast<int>(v.size()) != dim_)
      throw Error(ErrorCode::DimensionMismatch, "control values must share one dimension");
    if (!v.allFinite())
      throw Error(ErrorCode::NonFiniteValue, "control values must be finite");
  }
}

ControlSignal ControlSignal::constant(TimeGrid grid, const Eigen::VectorXd& value) {
  std::vector<Eigen::VectorXd> vals(grid.cell_count(), value);
  return ControlSignal(std::move(grid), std::move(vals));
}

double ControlSignal::linf_norm() const {
  double best = 0.0;
  for (const auto& v : values_) best = std::max(best, v.lpNorm<Eigen::Infinity>());
  return best;
}

ControlSignal ControlSignal::resampled_on(const TimeGrid& finer) const {
  if (!finer.refines(grid_))
    throw Error(ErrorCode::InvalidArgument, "resampling grid must refine the control grid");
  std::vector<Eigen::VectorXd> vals;
  vals.reserve(finer.cell_count());
  for (std::size_t k = 0; k < finer.cell_count(); ++k)
    vals.push_back(values_[grid_.cell_of(finer.node(k))]);
  return ControlSignal(finer, std::move(vals));
}

double l1_distance(const ControlSignal& a, const ControlSignal& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorCode::DimensionMismatch, "controls must share one dimension");
  const TimeGrid merged = a.grid().merged_with(b.grid());
  double acc = 0.0;
  for (std::size_t k = 0; k < merged.cell_count(); ++k) {
    const double t = merged.node(k);
    acc += (a.value(t) - b.value(t)).norm() * merged.cell_length(k);
  }
  return acc;
}

Trajectory::Trajectory(TimeGrid grid, std::vector<Eigen::VectorXd> states)
    : grid_(std::move(grid)), states_(std::move(states)) {
  if (states_.size() != grid_.node_count())
    throw Error(ErrorCode::DimensionMismatch, "trajectory needs one state per node");
  dim_ = static_cast<int>(states_.front().size());
}

Eigen::VectorXd Trajectory::value(double t) const {
  const std::size_t node = grid_.find_node(t);
  if (node < grid_.node_count()) return states_[node];
  const std::size_t k = grid_.cell_of(t);
  const double t0 = grid_.node(k), t1 = grid_.node(k + 1);
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * states_[k] + w * states_[k + 1];
}

double Trajectory::sup_distance(const Trajectory& other) const {
  const TimeGrid merged = grid_.merged_with(other.grid());
  double best = 0.0;
  for (double t : merged.nodes()) best = std::max(best, (value(t) - other.value(t)).norm());
  return best;
}

Trajectory solve_forward(const Problem& problem, const ControlSignal& u, const TimeGrid& grid) {
  if (!grid.refines(u.grid()))
    throw Error(ErrorCode::InvalidArgument, "integration grid must refine the control grid");
  if (u.dim() != problem.m)
    throw Error(ErrorCode::DimensionMismatch, "control dimension does not match the problem");

  std::vector<Eigen::VectorXd> states;
  states.reserve(grid.node_count());
  Eigen::VectorXd q = problem.q0;
  states.push_back(q);
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    const double t = grid.node(k);
    const double h = grid.cell_length(k);
    const Eigen::VectorXd& uk = u.cell_value(u.grid().cell_of(t));
    const Eigen::VectorXd k1 = problem.dynamics(q, uk, t);
    const Eigen::VectorXd k2 = problem.dynamics(q + 0.5 * h * k1, uk, t + 0.5 * h);
    const Eigen::VectorXd k3 = problem.dynamics(q + 0.5 * h * k2, uk, t + 0.5 * h);
    const Eigen::VectorXd k4 = problem.dynamics(q + h * k3, uk, t + h);
    q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = grid.node(k + 1);
    if (!q.allFinite())
      throw Error(ErrorCode::NonFiniteValue, "state became non-finite at t = " + std::to_string(t_next))
          .with_time(t_next);
    if (q.lpNorm<Eigen::Infinity>() > kBlowUpThreshold) {
      char msg[96];
      std::snprintf(msg, sizeof(msg), "trajectory exceeded 1e8 at t = %.12g", t_next);
      throw Error(ErrorCode::BlowUp, msg).with_time(t_next);
    }
    states.push_back(q);
  }
  return Trajectory(grid, std::move(states));
}

TransitionTable::TransitionTable(TimeGrid grid, std::vector<Eigen::MatrixXd> z_from_origin)
    : grid_(std::move(grid)), z_(std::move(z_from_origin)) {
  if (z_.size() != grid_.node_count())
    throw Error(ErrorCode::DimensionMismatch, "transition table needs one matrix per node");
  // The table composes through inverses of Z(t_k, 0); refuse tables whose
  // factors are numerically singular.
  for (std::size_t k = 0; k < z_.size(); ++k) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(z_[k]);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > kConditionLimit) {
      char msg[96];
      std::snprintf(msg, sizeof(msg), "transition matrix ill-conditioned at t = %.12g",
                    grid_.node(k));
      throw Error(ErrorCode::SingularTransition, msg).with_time(grid_.node(k));
    }
  }
  lu_.reserve(z_.size());
  lu_transpose_.reserve(z_.size());
  for (const auto& z : z_) {
    lu_.emplace_back(z);
    lu_transpose_.emplace_back(z.transpose().eval());
  }
}

Eigen::MatrixXd TransitionTable::between(std::size_t i, std::size_t j) const {
  if (i == j) return Eigen::MatrixXd::Identity(z_[0].rows(), z_[0].cols());
  // Z(t_i, t_j) = Z_i Z_j^{-1}, via Z_j^T Y^T = Z_i^T.
  return lu_transpose_[j].solve(z_[i].transpose().eval()).transpose();
}

Eigen::VectorXd TransitionTable::solve_from_origin(std::size_t k, const Eigen::VectorXd& rhs) const {
  return lu_[k].solve(rhs);
}

Eigen::VectorXd TransitionTable::solve_transpose_from_origin(std::size_t k,
                                                             const Eigen::VectorXd& rhs) const {
  return lu_transpose_[k].solve(rhs);
}

TransitionTable transition_matrix(const std::vector<Eigen::MatrixXd>& a_at_nodes,
                                  const TimeGrid& grid) {
  if (a_at_nodes.size() != grid.node_count())
    throw Error(ErrorCode::DimensionMismatch, "A must be sampled at every grid node");
  const Eigen::Index n = a_at_nodes.front().rows();
  std::vector<Eigen::MatrixXd> z;
  z.reserve(grid.node_count());
  Eigen::MatrixXd current = Eigen::MatrixXd::Identity(n, n);
  z.push_back(current);
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    const double h = grid.cell_length(k);
    current = detail::cell_transfer(a_at_nodes[k], a_at_nodes[k + 1], h) * current;
    z.push_back(current);
  }
  return TransitionTable(grid, std::move(z));
}

Trajectory duhamel_linear(const std::vector<Eigen::MatrixXd>& a_at_nodes,
                          const std::vector<Eigen::VectorXd>& b_at_nodes,
                          const Eigen::VectorXd& boundary, Direction direction,
                          const TimeGrid& grid) {
  if (a_at_nodes.size() != grid.node_count() || b_at_nodes.size() != grid.node_count())
    throw Error(ErrorCode::DimensionMismatch, "A and B must be sampled at every grid node");
  const std::size_t nodes = grid.node_count();
  std::vector<Eigen::VectorXd> values(nodes);

  if (direction == Direction::Forward) {
    Eigen::VectorXd q = boundary;
    values[0] = q;
    for (std::size_t k = 0; k + 1 < nodes; ++k) {
      const double h = grid.cell_length(k);
      const Eigen::MatrixXd P = detail::cell_transfer(a_at_nodes[k], a_at_nodes[k + 1], h);
      q = P * q + detail::cell_source_forward(a_at_nodes[k], a_at_nodes[k + 1], b_at_nodes[k],
                                              b_at_nodes[k + 1], h);
      values[k + 1] = q;
    }
  } else {
    Eigen::VectorXd p = boundary;
    values[nodes - 1] = p;
    for (std::size_t k = nodes - 1; k-- > 0;) {
      const double h = grid.cell_length(k);
      const Eigen::MatrixXd P = detail::cell_transfer(a_at_nodes[k], a_at_nodes[k + 1], h);
      p = P.transpose() * p + detail::cell_source_backward(a_at_nodes[k], a_at_nodes[k + 1],
                                                           b_at_nodes[k], b_at_nodes[k + 1], h);
      values[k] = p;
    }
  }
  return Trajectory(grid, std::move(values));
}

LipschitzEstimate estimate_lipschitz(const Problem& problem, const ControlSignal& u, double R,
                                     const TimeGrid& grid) {
  if (!(R > u.linf_norm()))
    throw Error(ErrorCode::InvalidArgument, "R must exceed the control's L-infinity norm");
  const Trajectory q = solve_forward(problem, u, grid);

  // Control samples: Omega corners and center, clipped into the R-ball.
  std::vector<Eigen::VectorXd> controls = problem.omega.corner_and_center_points();
  for (auto& v : controls) {
    const double norm = v.lpNorm<Eigen::Infinity>();
    if (norm > R) v *= R / norm;
  }

  double L = 0.0;
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const double t = grid.node(k);
    const Eigen::VectorXd center = q.state(k);
    for (int offset = -1; offset < 2 * problem.n; ++offset) {
      Eigen::VectorXd x = center;
      if (offset >= 0) x[offset / 2] += (offset % 2 == 0) ? 1.0 : -1.0;
      for (const auto& v : controls) {
        const Eigen::VectorXd fx = problem.dynamics(x, v, t);
        const Eigen::MatrixXd jq = problem.dynamics_jacobian_state(x, v, t);
        const Eigen::MatrixXd ju = problem.dynamics_jacobian_control(x, v, t);
        L = std::max(L, fx.lpNorm<Eigen::Infinity>());
        L = std::max(L, jq.cwiseAbs().rowwise().sum().maxCoeff());
        L = std::max(L, ju.cwiseAbs().rowwise().sum().maxCoeff());
      }
    }
  }
  const double T = grid.horizon();
  return LipschitzEstimate{R, L, L * std::exp(T * L)};
}

}  // namespace pmpkit
