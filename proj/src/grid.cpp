#include "pmpkit/grid.hpp"

#include <algorithm>
#include <cmath>

#include "pmpkit/errors.hpp"

namespace pmpkit {

namespace {
// Nodes closer than this (relative to the horizon) are treated as one node.
// Keeps merged grids strictly increasing when spike endpoints land on top of
// existing nodes up to rounding.
double node_tolerance(double horizon) { return 1e-13 * std::max(1.0, horizon); }
}  // namespace

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "time grid needs at least two nodes");
  if (nodes_.front() != 0.0)
    throw Error(ErrorCode::InvalidArgument, "time grid must start at t = 0");
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    if (!(nodes_[k] < nodes_[k + 1]))
      throw Error(ErrorCode::InvalidArgument, "time grid nodes must be strictly increasing");
  }
  if (!std::isfinite(nodes_.back()) || nodes_.back() <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "time grid horizon must be positive and finite");
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t cells) {
  if (cells < 1) throw Error(ErrorCode::InvalidArgument, "grid needs at least one cell");
  std::vector<double> nodes(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k)
    nodes[k] = horizon * static_cast<double>(k) / static_cast<double>(cells);
  nodes.front() = 0.0;
  nodes.back() = horizon;
  return TimeGrid(std::move(nodes));
}

std::size_t TimeGrid::cell_of(double t) const {
  if (t < 0.0 || t > horizon())
    throw Error(ErrorCode::RangeError, "time outside [0, T]");
  if (t >= nodes_[nodes_.size() - 2]) return cell_count() - 1;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

std::size_t TimeGrid::find_node(double t) const noexcept {
  const double tol = node_tolerance(horizon());
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol);
  if (it != nodes_.end() && std::abs(*it - t) <= tol)
    return static_cast<std::size_t>(it - nodes_.begin());
  return nodes_.size();
}

bool TimeGrid::refines(const TimeGrid& coarser) const noexcept {
  if (coarser.horizon() != horizon()) return false;
  for (double t : coarser.nodes_)
    if (!has_node(t)) return false;
  return true;
}

TimeGrid TimeGrid::merged_with(const TimeGrid& other) const {
  return with_points(other.nodes_);
}

TimeGrid TimeGrid::with_points(std::span<const double> points) const {
  std::vector<double> merged = nodes_;
  merged.insert(merged.end(), points.begin(), points.end());
  std::sort(merged.begin(), merged.end());
  const double tol = node_tolerance(horizon());
  std::vector<double> out;
  out.reserve(merged.size());
  for (double t : merged) {
    if (t < -tol || t > horizon() + tol)
      throw Error(ErrorCode::RangeError, "grid point outside [0, T]");
    if (out.empty() || t - out.back() > tol) out.push_back(t);
  }
  out.front() = 0.0;
  // The horizon node survives dedup because tol << any cell length we build.
  out.back() = horizon();
  return TimeGrid(std::move(out));
}

}  // namespace pmpkit
