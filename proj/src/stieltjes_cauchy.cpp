#include "pmpkit/stieltjes_cauchy.hpp"

#include <cmath>

#include "cell_linear.hpp"
#include "pmpkit/errors.hpp"

namespace pmpkit {
namespace {

struct CspTables {
  std::vector<Eigen::VectorXd> jump;     // per node: sum_i B_i(t_k) * atom_i(t_k)
  std::vector<Eigen::MatrixXd> transfer; // per cell: RK4 one-step of dZ = A Z
  std::vector<Eigen::VectorXd> source;   // per cell: density source, propagated
};

CspTables assemble(const std::vector<Eigen::MatrixXd>& a_at_nodes,
                   const std::vector<std::vector<Eigen::VectorXd>>& b_at_nodes,
                   const std::vector<NbvMeasure>& measures, Direction direction,
                   const TimeGrid& grid) {
  const std::size_t nodes = grid.node_count();
  if (a_at_nodes.size() != nodes)
    throw Error(ErrorCode::DimensionMismatch, "A must be sampled at every grid node");
  if (b_at_nodes.size() != measures.size())
    throw Error(ErrorCode::DimensionMismatch, "need one B per measure");
  const Eigen::Index n = a_at_nodes.front().rows();

  for (const auto& m : measures) {
    if (!grid.refines(m.grid()))
      throw Error(ErrorCode::InvalidArgument,
                  "solve grid must contain every node of every measure grid");
  }
  for (const auto& b : b_at_nodes) {
    if (b.size() != nodes)
      throw Error(ErrorCode::DimensionMismatch, "B must be sampled at every grid node");
    for (const auto& v : b)
      if (v.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "B values must have the state dimension");
  }

  CspTables tables;
  tables.jump.assign(nodes, Eigen::VectorXd::Zero(n));
  for (std::size_t i = 0; i < measures.size(); ++i) {
    const TimeGrid& mg = measures[i].grid();
    for (std::size_t l = 1; l < mg.node_count(); ++l) {
      const double w = measures[i].atoms()[l];
      if (w == 0.0) continue;
      const std::size_t k = grid.find_node(mg.node(l));
      tables.jump[k] += w * b_at_nodes[i][k];
    }
  }

  tables.transfer.reserve(grid.cell_count());
  tables.source.reserve(grid.cell_count());
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    const double h = grid.cell_length(k);
    const double mid = grid.node(k) + 0.5 * h;
    Eigen::VectorXd g0 = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd g1 = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < measures.size(); ++i) {
      const double density = measures[i].densities()[measures[i].grid().cell_of(mid)];
      if (density == 0.0) continue;
      g0 += density * b_at_nodes[i][k];
      g1 += density * b_at_nodes[i][k + 1];
    }
    tables.transfer.push_back(detail::cell_transfer(a_at_nodes[k], a_at_nodes[k + 1], h));
    tables.source.push_back(
        direction == Direction::Forward
            ? detail::cell_source_forward(a_at_nodes[k], a_at_nodes[k + 1], g0, g1, h)
            : detail::cell_source_backward(a_at_nodes[k], a_at_nodes[k + 1], g0, g1, h));
  }
  return tables;
}

double sweep_distance(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  double best = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    best = std::max(best, (a[k] - b[k]).lpNorm<Eigen::Infinity>());
  return best;
}

}  // namespace

BvPath solve_csp_fixed_point(const std::vector<Eigen::MatrixXd>& a_at_nodes,
                             const std::vector<std::vector<Eigen::VectorXd>>& b_at_nodes,
                             const std::vector<NbvMeasure>& measures,
                             const Eigen::VectorXd& boundary, Direction direction,
                             const TimeGrid& grid, const CspOptions& options) {
  const CspTables tables = assemble(a_at_nodes, b_at_nodes, measures, direction, grid);
  const std::size_t nodes = grid.node_count();
  const Eigen::Index n = boundary.size();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);

  std::vector<Eigen::VectorXd> left(nodes, boundary), right(nodes, boundary);
  std::vector<Eigen::VectorXd> new_left(nodes), new_right(nodes);

  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    if (direction == Direction::Forward) {
      Eigen::VectorXd acc = boundary;
      new_left[0] = acc;
      new_right[0] = acc + tables.jump[0];
      for (std::size_t k = 0; k + 1 < nodes; ++k) {
        acc += tables.jump[k];  // zero at k = 0 for normalized measures
        acc += (tables.transfer[k] - identity) * right[k] + tables.source[k];
        new_left[k + 1] = acc;
        new_right[k + 1] = acc + tables.jump[k + 1];
      }
    } else {
      Eigen::VectorXd acc = boundary;
      new_right[nodes - 1] = acc;
      new_left[nodes - 1] = acc + tables.jump[nodes - 1];
      for (std::size_t k = nodes - 1; k-- > 0;) {
        acc += tables.jump[k + 1];
        acc += (tables.transfer[k].transpose() - identity) * left[k + 1] + tables.source[k];
        new_right[k] = acc;
        new_left[k] = acc + tables.jump[k];
      }
    }
    const double delta =
        std::max(sweep_distance(left, new_left), sweep_distance(right, new_right));
    left.swap(new_left);
    right.swap(new_right);
    if (delta <= options.tolerance) return BvPath(grid, std::move(left), std::move(right));
  }
  throw Error(ErrorCode::NoConvergence,
              "Picard iteration did not converge; check grid/measure consistency");
}

BvPath solve_csp_duhamel(const std::vector<Eigen::MatrixXd>& a_at_nodes,
                         const std::vector<std::vector<Eigen::VectorXd>>& b_at_nodes,
                         const std::vector<NbvMeasure>& measures, const Eigen::VectorXd& boundary,
                         Direction direction, const TimeGrid& grid) {
  const CspTables tables = assemble(a_at_nodes, b_at_nodes, measures, direction, grid);
  const std::size_t nodes = grid.node_count();

  // Rebuild the transition table from the shared cell transfers so both
  // routes compose exactly the same one-step operators.
  std::vector<Eigen::MatrixXd> z;
  z.reserve(nodes);
  Eigen::MatrixXd current = Eigen::MatrixXd::Identity(boundary.size(), boundary.size());
  z.push_back(current);
  for (std::size_t k = 0; k + 1 < nodes; ++k) {
    current = tables.transfer[k] * current;
    z.push_back(current);
  }
  const TransitionTable table(grid, std::move(z));

  std::vector<Eigen::VectorXd> left(nodes), right(nodes);
  if (direction == Direction::Forward) {
    // q(t) = Z(t,0) [ q0 + sum of Z(.,0)^{-1}-weighted atom and cell masses ].
    Eigen::VectorXd weighted = boundary;
    for (std::size_t k = 0; k < nodes; ++k) {
      left[k] = table.from_origin(k) * weighted;
      right[k] = left[k] + tables.jump[k];
      weighted += table.solve_from_origin(k, tables.jump[k]);
      if (k + 1 < nodes) weighted += table.solve_from_origin(k + 1, tables.source[k]);
    }
  } else {
    // p(t) = Z(t,0)^{-T} [ Z(T,0)^T p_T + accumulated transposed masses ].
    Eigen::VectorXd weighted = table.from_origin(nodes - 1).transpose() * boundary;
    right[nodes - 1] = boundary;
    left[nodes - 1] = boundary + tables.jump[nodes - 1];
    weighted += table.from_origin(nodes - 1).transpose() * tables.jump[nodes - 1];
    for (std::size_t k = nodes - 1; k-- > 0;) {
      weighted += table.from_origin(k).transpose() * tables.source[k];
      right[k] = table.solve_transpose_from_origin(k, weighted);
      left[k] = right[k] + tables.jump[k];
      weighted += table.from_origin(k).transpose() * tables.jump[k];
    }
  }
  return BvPath(grid, std::move(left), std::move(right));
}

}  // namespace pmpkit
