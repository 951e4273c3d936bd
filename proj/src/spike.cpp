#include "pmpkit/spike.hpp"

#include <algorithm>
#include <cmath>

#include "pmpkit/errors.hpp"

namespace pmpkit {

SpikeSet::SpikeSet(double rho, std::vector<std::pair<double, double>> intervals, double horizon)
    : rho_(rho), horizon_(horizon), intervals_(std::move(intervals)) {
  if (!(rho > 0.0 && rho < 1.0))
    throw Error(ErrorCode::InvalidArgument, "rho must lie in (0, 1)");
  double prev_end = -1.0;
  for (const auto& [a, b] : intervals_) {
    if (!(a < b) || a < 0.0 || b > horizon_ + 1e-12 * horizon_)
      throw Error(ErrorCode::InvalidArgument, "spike intervals must be ordered within [0, T]");
    if (a < prev_end)
      throw Error(ErrorCode::InvalidArgument, "spike intervals must be disjoint");
    prev_end = b;
  }
}

double SpikeSet::total_length() const {
  // Compensated summation keeps the measure exact to ~1e-16 relative.
  double sum = 0.0, carry = 0.0;
  for (const auto& [a, b] : intervals_) {
    const double y = (b - a) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

bool SpikeSet::contains(double t) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                             [](double v, const std::pair<double, double>& iv) { return v < iv.first; });
  if (it == intervals_.begin()) return false;
  --it;
  return t >= it->first && t < it->second;
}

std::vector<double> SpikeSet::endpoints() const {
  std::vector<double> pts;
  pts.reserve(2 * intervals_.size());
  for (const auto& [a, b] : intervals_) {
    pts.push_back(a);
    pts.push_back(b);
  }
  return pts;
}

namespace {

struct WorkCell {
  double start, length;
  Eigen::VectorXd value;  // h on the cell
};

// Exact extrema of phi(t) = int_0^t (1 - 1_Q/rho) h over one work cell whose
// leading rho-fraction is selected: phi moves with slope h (1 - 1/rho) on the
// selected part and slope h afterwards, returning to its cell-start value.
double max_deviation(const std::vector<WorkCell>& cells, double rho) {
  const Eigen::Index n = cells.front().value.size();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  double worst = 0.0;
  for (const auto& cell : cells) {
    const Eigen::VectorXd at_split = phi + cell.value * (1.0 - 1.0 / rho) * rho * cell.length;
    worst = std::max(worst, at_split.norm());
    phi = at_split + cell.value * (1.0 - rho) * cell.length;
    worst = std::max(worst, phi.norm());
  }
  return worst;
}

}  // namespace

SpikeSet build_qrho(const std::vector<Eigen::VectorXd>& h_at_nodes, double rho,
                    const TimeGrid& grid) {
  if (!(rho > 0.0 && rho < 1.0))
    throw Error(ErrorCode::InvalidArgument, "rho must lie in (0, 1)");
  if (h_at_nodes.size() != grid.node_count())
    throw Error(ErrorCode::DimensionMismatch, "h must be sampled at every grid node");

  std::vector<WorkCell> cells;
  cells.reserve(grid.cell_count());
  for (std::size_t k = 0; k < grid.cell_count(); ++k)
    cells.push_back({grid.node(k), grid.cell_length(k), h_at_nodes[k]});

  double bound = rho * rho / (2.0 * (rho + 1.0));
  constexpr std::size_t kWorkCellBudget = 4'000'000;
  for (int attempt = 0; attempt < 4; ++attempt) {
    // Split cells until none carries more than `bound` of |h| mass. h is
    // piecewise constant, so splitting is exact.
    std::vector<WorkCell> refined;
    refined.reserve(cells.size());
    for (const auto& cell : cells) {
      const double mass = cell.value.norm() * cell.length;
      std::size_t pieces = 1;
      if (mass > bound) pieces = static_cast<std::size_t>(std::ceil(mass / bound));
      if (refined.size() + pieces > kWorkCellBudget)
        throw Error(ErrorCode::BoundNotAchieved,
                    "selection refinement exceeds the work-cell budget (pathological h)");
      const double piece_len = cell.length / static_cast<double>(pieces);
      for (std::size_t p = 0; p < pieces; ++p)
        refined.push_back({cell.start + piece_len * static_cast<double>(p), piece_len, cell.value});
    }
    cells.swap(refined);

    if (max_deviation(cells, rho) <= rho) {
      std::vector<std::pair<double, double>> intervals;
      intervals.reserve(cells.size());
      for (const auto& cell : cells)
        intervals.emplace_back(cell.start, cell.start + rho * cell.length);
      // Rounding in the interval endpoints accumulates across cells; absorb
      // the deficit into the last interval so lambda(Q) = rho T holds to
      // ~1e-16 relative.
      double achieved = 0.0, carry = 0.0;
      for (const auto& [a, b] : intervals) {
        const double y = (b - a) - carry;
        const double t = achieved + y;
        carry = (t - achieved) - y;
        achieved = t;
      }
      auto& [last_a, last_b] = intervals.back();
      const double cell_end = cells.back().start + cells.back().length;
      last_b = std::min(last_b + (rho * grid.horizon() - achieved), cell_end);
      return SpikeSet(rho, std::move(intervals), grid.horizon());
    }
    bound *= 0.5;
  }
  throw Error(ErrorCode::BoundNotAchieved,
              "spike selection bound not achieved after maximal refinement");
}

ControlSignal spike_control(const ControlSignal& u, const ControlSignal& u_prime,
                            const SpikeSet& spikes) {
  if (u.dim() != u_prime.dim())
    throw Error(ErrorCode::DimensionMismatch, "controls must share one dimension");
  const std::vector<double> pts = spikes.endpoints();
  TimeGrid refined = u.grid().merged_with(u_prime.grid()).with_points(pts);
  std::vector<Eigen::VectorXd> values;
  values.reserve(refined.cell_count());
  for (std::size_t k = 0; k < refined.cell_count(); ++k) {
    const double mid = refined.node(k) + 0.5 * refined.cell_length(k);
    values.push_back(spikes.contains(mid) ? u_prime.value(refined.node(k))
                                          : u.value(refined.node(k)));
  }
  // Coalesce runs of identical values; exact for piecewise-constant controls
  // and keeps iterated spikes from inflating the grid with no-op nodes.
  std::vector<double> nodes{refined.node(0)};
  std::vector<Eigen::VectorXd> merged;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const bool new_run =
        merged.empty() || (merged.back().array() != values[k].array()).any();
    if (!new_run) continue;
    merged.push_back(values[k]);
    if (k > 0) nodes.push_back(refined.node(k));
  }
  nodes.push_back(refined.horizon());
  return ControlSignal(TimeGrid(std::move(nodes)), std::move(merged));
}

std::vector<Eigen::VectorXd> spike_direction(const Problem& problem, const Trajectory& q,
                                             const ControlSignal& u, const ControlSignal& u_prime,
                                             const TimeGrid& grid) {
  std::vector<Eigen::VectorXd> h;
  h.reserve(grid.node_count());
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const double t = grid.node(k);
    const Eigen::VectorXd qk = q.value(t);
    h.push_back(problem.dynamics(qk, u_prime.value(t), t) - problem.dynamics(qk, u.value(t), t));
  }
  return h;
}

Trajectory variation_vector(const Problem& problem, const ControlSignal& u,
                            const ControlSignal& u_prime, const TimeGrid& grid) {
  const Trajectory q = solve_forward(problem, u, grid);
  std::vector<Eigen::MatrixXd> a;
  a.reserve(grid.node_count());
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const double t = grid.node(k);
    a.push_back(problem.dynamics_jacobian_state(q.state(k), u.value(t), t));
  }
  const std::vector<Eigen::VectorXd> h = spike_direction(problem, q, u, u_prime, grid);
  return duhamel_linear(a, h, Eigen::VectorXd::Zero(problem.n), Direction::Forward, grid);
}

std::vector<std::pair<double, double>> differentiability_probe(const Problem& problem,
                                                               const ControlSignal& u,
                                                               const ControlSignal& u_prime,
                                                               const std::vector<double>& rhos,
                                                               const TimeGrid& grid) {
  const TimeGrid base = grid.merged_with(u.grid()).merged_with(u_prime.grid());
  const Trajectory q = solve_forward(problem, u, base);
  const Trajectory w = variation_vector(problem, u, u_prime, base);
  const std::vector<Eigen::VectorXd> h = spike_direction(problem, q, u, u_prime, base);

  std::vector<std::pair<double, double>> table;
  table.reserve(rhos.size());
  for (double rho : rhos) {
    const SpikeSet spikes = build_qrho(h, rho, base);
    const ControlSignal spiked = spike_control(u, u_prime, spikes);
    const TimeGrid fine = base.merged_with(spiked.grid());
    const Trajectory q_rho = solve_forward(problem, spiked, fine);
    double err = 0.0;
    for (double t : fine.nodes()) {
      const Eigen::VectorXd deviation = (q_rho.value(t) - q.value(t)) / rho - w.value(t);
      err = std::max(err, deviation.norm());
    }
    table.emplace_back(rho, err);
  }
  return table;
}

}  // namespace pmpkit
