#include "pmpkit/bv.hpp"

#include <algorithm>
#include <cmath>

#include "pmpkit/errors.hpp"

namespace pmpkit {

BvPath::BvPath(TimeGrid grid, std::vector<Eigen::VectorXd> left,
               std::vector<Eigen::VectorXd> right)
    : grid_(std::move(grid)), left_(std::move(left)), right_(std::move(right)) {
  if (left_.size() != grid_.node_count() || right_.size() != grid_.node_count())
    throw Error(ErrorCode::DimensionMismatch, "bv path needs one left and right value per node");
  dim_ = static_cast<int>(left_.front().size());
  for (std::size_t k = 0; k < left_.size(); ++k)
    if (left_[k].size() != dim_ || right_[k].size() != dim_)
      throw Error(ErrorCode::DimensionMismatch, "bv path values must share one dimension");
  if ((left_.front() - right_.front()).lpNorm<Eigen::Infinity>() != 0.0)
    throw Error(ErrorCode::InvalidArgument, "bv path must have matching limits at t = 0");
}

BvPath BvPath::constant(TimeGrid grid, const Eigen::VectorXd& value) {
  std::vector<Eigen::VectorXd> vals(grid.node_count(), value);
  return BvPath(std::move(grid), vals, vals);
}

Eigen::VectorXd BvPath::value(double t) const {
  const std::size_t node = grid_.find_node(t);
  if (node < grid_.node_count()) {
    if (node == 0) return right_[0];
    if (node + 1 == grid_.node_count()) return right_[node];
    return left_[node];
  }
  const std::size_t k = grid_.cell_of(t);
  const double t0 = grid_.node(k), t1 = grid_.node(k + 1);
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * right_[k] + w * left_[k + 1];
}

double BvPath::sup_norm() const {
  double best = 0.0;
  for (std::size_t k = 0; k < left_.size(); ++k) {
    best = std::max(best, left_[k].lpNorm<Eigen::Infinity>());
    best = std::max(best, right_[k].lpNorm<Eigen::Infinity>());
  }
  return best;
}

double total_variation(const BvPath& path) {
  double v = 0.0;
  const std::size_t nodes = path.grid().node_count();
  for (std::size_t k = 0; k < nodes; ++k) {
    v += path.jump(k).norm();
    if (k + 1 < nodes) v += (path.left(k + 1) - path.right(k)).norm();
  }
  return v;
}

BvPath normalize_bv(const BvPath& path) {
  if (path.dim() != 1)
    throw Error(ErrorCode::InvalidArgument, "normalize_bv expects a scalar path");
  const Eigen::VectorXd shift = path.right(0);
  std::vector<Eigen::VectorXd> left, right;
  left.reserve(path.grid().node_count());
  right.reserve(path.grid().node_count());
  for (std::size_t k = 0; k < path.grid().node_count(); ++k) {
    left.push_back(path.left(k) - shift);
    right.push_back(path.right(k) - shift);
  }
  return BvPath(path.grid(), std::move(left), std::move(right));
}

NbvMeasure::NbvMeasure(TimeGrid grid, std::vector<double> atoms, std::vector<double> densities)
    : grid_(std::move(grid)), atoms_(std::move(atoms)), densities_(std::move(densities)) {
  if (atoms_.size() != grid_.node_count())
    throw Error(ErrorCode::DimensionMismatch, "measure needs one atom weight per node");
  if (densities_.size() != grid_.cell_count())
    throw Error(ErrorCode::DimensionMismatch, "measure needs one density per cell");
  if (atoms_.front() != 0.0)
    throw Error(ErrorCode::InvalidArgument, "normalized measures carry no atom at t = 0");
  for (double a : atoms_)
    if (!(a >= 0.0) || !std::isfinite(a))
      throw Error(ErrorCode::InvalidArgument, "measure atoms must be nonnegative");
  for (double c : densities_)
    if (!(c >= 0.0) || !std::isfinite(c))
      throw Error(ErrorCode::InvalidArgument, "measure densities must be nonnegative");
}

NbvMeasure NbvMeasure::zero(TimeGrid grid) {
  std::vector<double> atoms(grid.node_count(), 0.0);
  std::vector<double> dens(grid.cell_count(), 0.0);
  return NbvMeasure(std::move(grid), std::move(atoms), std::move(dens));
}

NbvMeasure NbvMeasure::single_atom(TimeGrid grid, double time, double weight) {
  TimeGrid refined = grid.with_points(std::span<const double>{&time, 1});
  std::vector<double> atoms(refined.node_count(), 0.0);
  std::vector<double> dens(refined.cell_count(), 0.0);
  const std::size_t k = refined.find_node(time);
  if (k == refined.node_count() || k == 0)
    throw Error(ErrorCode::InvalidArgument, "atom must sit at a grid node in (0, T]");
  atoms[k] = weight;
  return NbvMeasure(std::move(refined), std::move(atoms), std::move(dens));
}

NbvMeasure NbvMeasure::lebesgue(TimeGrid grid, double density) {
  std::vector<double> atoms(grid.node_count(), 0.0);
  std::vector<double> dens(grid.cell_count(), density);
  return NbvMeasure(std::move(grid), std::move(atoms), std::move(dens));
}

double NbvMeasure::eta(double t) const {
  if (t < 0.0 || t > grid_.horizon())
    throw Error(ErrorCode::RangeError, "time outside [0, T]");
  double acc = 0.0;
  const bool at_horizon = grid_.find_node(t) == grid_.node_count() - 1;
  for (std::size_t k = 1; k < grid_.node_count(); ++k) {
    if (grid_.node(k) < t || (at_horizon && k == grid_.node_count() - 1)) acc += atoms_[k];
  }
  for (std::size_t k = 0; k < grid_.cell_count(); ++k) {
    const double a = grid_.node(k), b = grid_.node(k + 1);
    if (t <= a) break;
    acc += densities_[k] * (std::min(t, b) - a);
  }
  return acc;
}

double NbvMeasure::total_variation() const {
  double acc = 0.0;
  for (double a : atoms_) acc += a;
  for (std::size_t k = 0; k < densities_.size(); ++k)
    acc += densities_[k] * grid_.cell_length(k);
  return acc;
}

bool NbvMeasure::is_zero() const {
  for (double a : atoms_)
    if (a != 0.0) return false;
  for (double c : densities_)
    if (c != 0.0) return false;
  return true;
}

BvPath NbvMeasure::as_bvpath() const {
  std::vector<Eigen::VectorXd> left(grid_.node_count()), right(grid_.node_count());
  double acc = 0.0;
  for (std::size_t k = 0; k < grid_.node_count(); ++k) {
    left[k] = Eigen::VectorXd::Constant(1, acc);
    acc += atoms_[k];
    right[k] = Eigen::VectorXd::Constant(1, acc);
    if (k < grid_.cell_count()) acc += densities_[k] * grid_.cell_length(k);
  }
  return BvPath(grid_, std::move(left), std::move(right));
}

NbvMeasure NbvMeasure::scaled(double factor) const {
  if (!(factor >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "measures scale by nonnegative factors only");
  std::vector<double> atoms = atoms_;
  std::vector<double> dens = densities_;
  for (double& a : atoms) a *= factor;
  for (double& c : dens) c *= factor;
  return NbvMeasure(grid_, std::move(atoms), std::move(dens));
}

namespace {

double interp_on_cell(const std::vector<double>& z, const TimeGrid& grid, std::size_t cell,
                      double t) {
  const double a = grid.node(cell), b = grid.node(cell + 1);
  const double w = (t - a) / (b - a);
  return (1.0 - w) * z[cell] + w * z[cell + 1];
}

}  // namespace

double stieltjes_integral(const std::vector<double>& z_at_nodes, const NbvMeasure& eta,
                          double from, double to) {
  const TimeGrid& grid = eta.grid();
  if (z_at_nodes.size() != grid.node_count())
    throw Error(ErrorCode::DimensionMismatch, "integrand must be sampled at every grid node");
  if (from < 0.0 || to > grid.horizon() || from > to)
    throw Error(ErrorCode::RangeError, "integration bounds outside [0, T]");
  if (from == to) return 0.0;

  double acc = 0.0;
  // Atoms in (from, to].
  for (std::size_t k = 1; k < grid.node_count(); ++k) {
    const double tk = grid.node(k);
    if (tk > from && tk <= to) acc += z_at_nodes[k] * eta.atoms()[k];
  }
  // Density parts: trapezoid of z against the constant cell density.
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    const double c = eta.densities()[k];
    if (c == 0.0) continue;
    const double a = std::max(from, grid.node(k));
    const double b = std::min(to, grid.node(k + 1));
    if (a >= b) continue;
    const double za = interp_on_cell(z_at_nodes, grid, k, a);
    const double zb = interp_on_cell(z_at_nodes, grid, k, b);
    acc += 0.5 * (za + zb) * c * (b - a);
  }
  return acc;
}

Eigen::VectorXd stieltjes_integral(const std::vector<Eigen::VectorXd>& z_at_nodes,
                                   const NbvMeasure& eta, double from, double to) {
  const std::size_t nodes = eta.grid().node_count();
  if (z_at_nodes.size() != nodes)
    throw Error(ErrorCode::DimensionMismatch, "integrand must be sampled at every grid node");
  const Eigen::Index d = z_at_nodes.front().size();
  Eigen::VectorXd out(d);
  std::vector<double> comp(nodes);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < nodes; ++k) comp[k] = z_at_nodes[k][i];
    out[i] = stieltjes_integral(comp, eta, from, to);
  }
  return out;
}

double fubini_residual(const std::vector<double>& phi_lattice, const NbvMeasure& eta) {
  const TimeGrid& grid = eta.grid();
  const std::size_t nodes = grid.node_count();
  if (phi_lattice.size() != nodes * nodes)
    throw Error(ErrorCode::DimensionMismatch, "Phi must be sampled on the grid x grid lattice");

  auto phi = [&](std::size_t k, std::size_t l) { return phi_lattice[k * nodes + l]; };

  // LHS: y(tau_k) = int_0^{tau_k} Phi(tau_k, s) ds by trapezoid, then d eta.
  std::vector<double> y(nodes, 0.0);
  for (std::size_t k = 0; k < nodes; ++k) {
    double acc = 0.0;
    for (std::size_t l = 0; l < k; ++l)
      acc += 0.5 * (phi(k, l) + phi(k, l + 1)) * grid.cell_length(l);
    y[k] = acc;
  }
  const double lhs = stieltjes_integral(y, eta, 0.0, grid.horizon());

  // RHS: r(s) = int_(s,T] Phi(tau, s) d eta(tau) is right-continuous with a
  // left jump of atom * Phi at atom times, so each trapezoid cell uses the
  // within-cell left limit at its right edge.
  std::vector<double> column(nodes), r(nodes);
  for (std::size_t l = 0; l < nodes; ++l) {
    for (std::size_t k = 0; k < nodes; ++k) column[k] = phi(k, l);
    r[l] = stieltjes_integral(column, eta, grid.node(l), grid.horizon());
  }
  double rhs = 0.0;
  for (std::size_t l = 0; l + 1 < nodes; ++l) {
    const double right_limit = r[l + 1] + eta.atoms()[l + 1] * phi(l + 1, l + 1);
    rhs += 0.5 * (r[l] + right_limit) * grid.cell_length(l);
  }

  return std::abs(lhs - rhs);
}

}  // namespace pmpkit
