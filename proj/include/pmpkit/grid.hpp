#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pmpkit {

/// Strictly increasing node times t_0 = 0 < t_1 < ... < t_N = T.
/// Cells are right-open: cell k is [t_k, t_{k+1}).
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> nodes);
  static TimeGrid uniform(double horizon, std::size_t cells);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t cell_count() const noexcept { return nodes_.size() - 1; }
  double node(std::size_t k) const { return nodes_[k]; }
  double horizon() const noexcept { return nodes_.back(); }
  double cell_length(std::size_t k) const { return nodes_[k + 1] - nodes_[k]; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }

  /// Index of the right-open cell containing t; t == T maps to the last cell.
  std::size_t cell_of(double t) const;

  /// Exact (or near-exact) node lookup; returns node_count() when absent.
  std::size_t find_node(double t) const noexcept;
  bool has_node(double t) const noexcept { return find_node(t) < nodes_.size(); }

  /// True when every node of `coarser` is a node of this grid.
  bool refines(const TimeGrid& coarser) const noexcept;

  TimeGrid merged_with(const TimeGrid& other) const;
  TimeGrid with_points(std::span<const double> points) const;

  bool operator==(const TimeGrid& other) const noexcept { return nodes_ == other.nodes_; }

 private:
  std::vector<double> nodes_;
};

}  // namespace pmpkit
