#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pmpkit {

enum class VarKind { Time, State, Control };

namespace detail {
struct ExprNode;
}

/// Immutable arithmetic expression over t, q1..qn, u1..um.
/// Operators + - * / ^ (with unary minus), functions sin cos exp log sqrt tanh.
/// Safe for concurrent reads once constructed.
class Expr {
 public:
  static Expr parse(std::string_view text, int state_dim, int control_dim);

  double eval(std::span<const double> q, std::span<const double> u, double t) const;

  /// Partial derivatives with respect to every coordinate of one variable
  /// group, by a forward dual-number sweep per coordinate.
  std::vector<double> partials(VarKind wrt, std::span<const double> q,
                               std::span<const double> u, double t) const;

  std::string str() const;

  bool uses_control() const noexcept;
  int state_dim() const noexcept { return state_dim_; }
  int control_dim() const noexcept { return control_dim_; }

 private:
  Expr(std::shared_ptr<const detail::ExprNode> root, int n, int m)
      : root_(std::move(root)), state_dim_(n), control_dim_(m) {}

  std::shared_ptr<const detail::ExprNode> root_;
  int state_dim_ = 0;
  int control_dim_ = 0;
};

}  // namespace pmpkit
