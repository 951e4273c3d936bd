#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pmpkit/expr.hpp"

namespace pmpkit {

struct OmegaBox {
  Eigen::VectorXd lo, hi;
};

struct OmegaFiniteSet {
  std::vector<Eigen::VectorXd> points;
};

struct OmegaBall {
  Eigen::VectorXd center;
  double radius = 0.0;
};

/// Closed nonempty control set. All variants are closed by construction.
class Omega {
 public:
  using Storage = std::variant<OmegaBox, OmegaFiniteSet, OmegaBall>;

  explicit Omega(Storage desc);

  int dim() const noexcept { return dim_; }
  const Storage& desc() const noexcept { return desc_; }

  bool is_box() const noexcept { return std::holds_alternative<OmegaBox>(desc_); }
  bool is_finite() const noexcept { return std::holds_alternative<OmegaFiniteSet>(desc_); }
  bool is_ball() const noexcept { return std::holds_alternative<OmegaBall>(desc_); }

  /// Deterministic representative points: corners (box), all points (finite),
  /// center +/- radius along each axis (ball), plus the center/midpoint.
  std::vector<Eigen::VectorXd> corner_and_center_points() const;

 private:
  Storage desc_;
  int dim_ = 0;
};

/// A complete optimal control problem: dynamics f, terminal cost, running
/// state constraints, control set, initial state and horizon.
/// Immutable after construction; safe for concurrent reads.
struct Problem {
  int n = 0;  // state dimension
  int m = 0;  // control dimension
  int j = 0;  // constraint count
  std::vector<Expr> f;      // n components
  Expr psi;                 // terminal cost, no control dependence
  std::vector<Expr> g;      // j constraint components, no control dependence
  Omega omega;
  Eigen::VectorXd q0;
  double T = 0.0;

  static Problem load_json(std::string_view json_text);
  static Problem load_file(const std::string& path);

  Eigen::VectorXd dynamics(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t) const;
  /// Jacobian of f with respect to the state, rows indexed by f component.
  Eigen::MatrixXd dynamics_jacobian_state(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                          double t) const;
  Eigen::MatrixXd dynamics_jacobian_control(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                            double t) const;
  double terminal_cost(const Eigen::VectorXd& q_final) const;
  Eigen::VectorXd terminal_cost_gradient(const Eigen::VectorXd& q_final) const;
  double constraint_value(int i, const Eigen::VectorXd& q, double t) const;
  Eigen::VectorXd constraint_gradient_state(int i, const Eigen::VectorXd& q, double t) const;
};

}  // namespace pmpkit
