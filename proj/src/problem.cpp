#include "pmpkit/problem.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pmpkit/errors.hpp"

namespace pmpkit {

using nlohmann::json;

Omega::Omega(Storage desc) : desc_(std::move(desc)) {
  if (const auto* box = std::get_if<OmegaBox>(&desc_)) {
    if (box->lo.size() != box->hi.size() || box->lo.size() == 0)
      throw Error(ErrorCode::DimensionMismatch, "omega box bounds must share a positive dimension");
    for (Eigen::Index i = 0; i < box->lo.size(); ++i)
      if (!(box->lo[i] <= box->hi[i]))
        throw Error(ErrorCode::InvalidArgument, "omega box requires lo <= hi componentwise");
    dim_ = static_cast<int>(box->lo.size());
  } else if (const auto* finite = std::get_if<OmegaFiniteSet>(&desc_)) {
    if (finite->points.empty())
      throw Error(ErrorCode::InvalidArgument, "omega finite set must be nonempty");
    dim_ = static_cast<int>(finite->points.front().size());
    for (const auto& p : finite->points)
      if (static_cast<int>(p.size()) != dim_)
        throw Error(ErrorCode::DimensionMismatch, "omega finite set points must share a dimension");
  } else {
    const auto& ball = std::get<OmegaBall>(desc_);
    if (!(ball.radius > 0.0))
      throw Error(ErrorCode::InvalidArgument, "omega ball requires a positive radius");
    if (ball.center.size() == 0)
      throw Error(ErrorCode::DimensionMismatch, "omega ball center must have positive dimension");
    dim_ = static_cast<int>(ball.center.size());
  }
}

std::vector<Eigen::VectorXd> Omega::corner_and_center_points() const {
  std::vector<Eigen::VectorXd> out;
  if (const auto* box = std::get_if<OmegaBox>(&desc_)) {
    const int d = dim_;
    const std::size_t corners = std::size_t{1} << d;
    for (std::size_t mask = 0; mask < corners; ++mask) {
      Eigen::VectorXd v(d);
      for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? box->hi[i] : box->lo[i];
      out.push_back(std::move(v));
    }
    out.push_back(0.5 * (box->lo + box->hi));
  } else if (const auto* finite = std::get_if<OmegaFiniteSet>(&desc_)) {
    out = finite->points;
  } else {
    const auto& ball = std::get<OmegaBall>(desc_);
    for (int i = 0; i < dim_; ++i) {
      Eigen::VectorXd v = ball.center;
      v[i] += ball.radius;
      out.push_back(v);
      v[i] -= 2.0 * ball.radius;
      out.push_back(v);
    }
    out.push_back(ball.center);
  }
  return out;
}

namespace {

const json& require_field(const json& cfg, const char* key) {
  auto it = cfg.find(key);
  if (it == cfg.end())
    throw Error(ErrorCode::MissingField, std::string("missing field '") + key + "'");
  return *it;
}

Eigen::VectorXd to_vector(const json& arr, const char* what) {
  if (!arr.is_array())
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be an array of numbers");
  Eigen::VectorXd v(arr.size());
  Eigen::Index i = 0;
  for (const auto& x : arr) {
    if (!x.is_number())
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " must contain numbers only");
    v[i++] = x.get<double>();
  }
  return v;
}

Omega parse_omega(const json& cfg, int m) {
  const std::string type = require_field(cfg, "type").get<std::string>();
  if (type == "box") {
    Eigen::VectorXd lo = to_vector(require_field(cfg, "lo"), "omega.lo");
    Eigen::VectorXd hi = to_vector(require_field(cfg, "hi"), "omega.hi");
    if (lo.size() != m || hi.size() != m)
      throw Error(ErrorCode::DimensionMismatch, "omega box bounds must have length m");
    return Omega(OmegaBox{std::move(lo), std::move(hi)});
  }
  if (type == "finite") {
    const json& pts = require_field(cfg, "points");
    if (!pts.is_array() || pts.empty())
      throw Error(ErrorCode::InvalidArgument, "omega.points must be a nonempty array");
    OmegaFiniteSet fs;
    for (const auto& p : pts) {
      Eigen::VectorXd v = to_vector(p, "omega point");
      if (v.size() != m)
        throw Error(ErrorCode::DimensionMismatch, "omega points must have length m");
      fs.points.push_back(std::move(v));
    }
    return Omega(std::move(fs));
  }
  if (type == "ball") {
    Eigen::VectorXd center = to_vector(require_field(cfg, "center"), "omega.center");
    if (center.size() != m)
      throw Error(ErrorCode::DimensionMismatch, "omega ball center must have length m");
    const double radius = require_field(cfg, "radius").get<double>();
    return Omega(OmegaBall{std::move(center), radius});
  }
  throw Error(ErrorCode::InvalidArgument, "omega.type must be box, finite or ball");
}

}  // namespace

Problem Problem::load_json(std::string_view json_text) {
  json cfg;
  try {
    cfg = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, std::string("config is not valid JSON: ") + e.what())
        .with_offset(static_cast<std::ptrdiff_t>(e.byte));
  }

  const int n = require_field(cfg, "n").get<int>();
  const int m = require_field(cfg, "m").get<int>();
  if (n < 1 || m < 1)
    throw Error(ErrorCode::InvalidArgument, "n and m must be >= 1");

  const json& f_cfg = require_field(cfg, "f");
  if (!f_cfg.is_array() || static_cast<int>(f_cfg.size()) != n)
    throw Error(ErrorCode::DimensionMismatch,
                "f must list exactly n = " + std::to_string(n) + " expressions");

  const json& g_cfg = cfg.contains("G") ? cfg.at("G") : json::array();
  if (!g_cfg.is_array())
    throw Error(ErrorCode::InvalidArgument, "G must be an array of expressions");
  const int j = cfg.contains("j") ? cfg.at("j").get<int>() : static_cast<int>(g_cfg.size());
  if (j != static_cast<int>(g_cfg.size()))
    throw Error(ErrorCode::DimensionMismatch, "j does not match the number of G expressions");

  std::vector<Expr> f;
  f.reserve(static_cast<std::size_t>(n));
  for (const auto& s : f_cfg) f.push_back(Expr::parse(s.get<std::string>(), n, m));

  Expr psi = Expr::parse(require_field(cfg, "psi").get<std::string>(), n, m);
  if (psi.uses_control())
    throw Error(ErrorCode::ConstraintUsesControl, "psi must not reference control variables");

  std::vector<Expr> g;
  g.reserve(static_cast<std::size_t>(j));
  for (const auto& s : g_cfg) {
    Expr gi = Expr::parse(s.get<std::string>(), n, m);
    if (gi.uses_control())
      throw Error(ErrorCode::ConstraintUsesControl,
                  "constraint G must not reference control variables");
    g.push_back(std::move(gi));
  }

  Eigen::VectorXd q0 = to_vector(require_field(cfg, "q0"), "q0");
  if (q0.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "q0 must have length n");

  const double T = require_field(cfg, "T").get<double>();
  if (!(T > 0.0))
    throw Error(ErrorCode::InvalidArgument, "T must be positive");

  Omega omega = parse_omega(require_field(cfg, "omega"), m);

  return Problem{n, m, j, std::move(f), std::move(psi), std::move(g),
                 std::move(omega), std::move(q0), T};
}

Problem Problem::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open problem file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_json(buffer.str());
}

Eigen::VectorXd Problem::dynamics(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                  double t) const {
  Eigen::VectorXd out(n);
  const std::span<const double> qs{q.data(), static_cast<std::size_t>(q.size())};
  const std::span<const double> us{u.data(), static_cast<std::size_t>(u.size())};
  for (int i = 0; i < n; ++i) out[i] = f[static_cast<std::size_t>(i)].eval(qs, us, t);
  return out;
}

Eigen::MatrixXd Problem::dynamics_jacobian_state(const Eigen::VectorXd& q,
                                                 const Eigen::VectorXd& u, double t) const {
  Eigen::MatrixXd out(n, n);
  const std::span<const double> qs{q.data(), static_cast<std::size_t>(q.size())};
  const std::span<const double> us{u.data(), static_cast<std::size_t>(u.size())};
  for (int i = 0; i < n; ++i) {
    const std::vector<double> row = f[static_cast<std::size_t>(i)].partials(VarKind::State, qs, us, t);
    for (int k = 0; k < n; ++k) out(i, k) = row[static_cast<std::size_t>(k)];
  }
  return out;
}

Eigen::MatrixXd Problem::dynamics_jacobian_control(const Eigen::VectorXd& q,
                                                   const Eigen::VectorXd& u, double t) const {
  Eigen::MatrixXd out(n, m);
  const std::span<const double> qs{q.data(), static_cast<std::size_t>(q.size())};
  const std::span<const double> us{u.data(), static_cast<std::size_t>(u.size())};
  for (int i = 0; i < n; ++i) {
    const std::vector<double> row =
        f[static_cast<std::size_t>(i)].partials(VarKind::Control, qs, us, t);
    for (int k = 0; k < m; ++k) out(i, k) = row[static_cast<std::size_t>(k)];
  }
  return out;
}

double Problem::terminal_cost(const Eigen::VectorXd& q_final) const {
  const Eigen::VectorXd u_zero = Eigen::VectorXd::Zero(m);
  return psi.eval({q_final.data(), static_cast<std::size_t>(q_final.size())},
                  {u_zero.data(), static_cast<std::size_t>(u_zero.size())}, T);
}

Eigen::VectorXd Problem::terminal_cost_gradient(const Eigen::VectorXd& q_final) const {
  const Eigen::VectorXd u_zero = Eigen::VectorXd::Zero(m);
  const std::vector<double> grad =
      psi.partials(VarKind::State, {q_final.data(), static_cast<std::size_t>(q_final.size())},
                   {u_zero.data(), static_cast<std::size_t>(u_zero.size())}, T);
  return Eigen::Map<const Eigen::VectorXd>(grad.data(), n);
}

double Problem::constraint_value(int i, const Eigen::VectorXd& q, double t) const {
  const Eigen::VectorXd u_zero = Eigen::VectorXd::Zero(m);
  return g[static_cast<std::size_t>(i)].eval({q.data(), static_cast<std::size_t>(q.size())},
                                             {u_zero.data(), static_cast<std::size_t>(u_zero.size())},
                                             t);
}

Eigen::VectorXd Problem::constraint_gradient_state(int i, const Eigen::VectorXd& q, double t) const {
  const Eigen::VectorXd u_zero = Eigen::VectorXd::Zero(m);
  const std::vector<double> grad = g[static_cast<std::size_t>(i)].partials(
      VarKind::State, {q.data(), static_cast<std::size_t>(q.size())},
      {u_zero.data(), static_cast<std::size_t>(u_zero.size())}, t);
  return Eigen::Map<const Eigen::VectorXd>(grad.data(), n);
}

}  // namespace pmpkit
