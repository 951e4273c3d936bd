#include "pmpkit/checker.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "pmpkit/errors.hpp"

namespace pmpkit {

namespace {

double hamiltonian(const Problem& problem, const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                   const Eigen::VectorXd& p, double t) {
  return p.dot(problem.dynamics(q, v, t));
}

// Golden-section refinement of one coordinate inside [lo, hi], bracketing the
// incumbent by one grid spacing on each side.
double refine_axis(const std::function<double(double)>& value, double lo, double hi,
                   double incumbent, double spacing, int iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = std::max(lo, incumbent - spacing);
  double b = std::min(hi, incumbent + spacing);
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = value(x1), f2 = value(x2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = value(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = value(x2);
    }
  }
  const double mid = 0.5 * (a + b);
  return value(mid) <= std::min(f1, f2) ? mid : (f1 <= f2 ? x1 : x2);
}

std::pair<double, Eigen::VectorXd> minimize_over_box(const Problem& problem, const OmegaBox& box,
                                                     const Eigen::VectorXd& q,
                                                     const Eigen::VectorXd& p, double t) {
  const int m = problem.m;
  constexpr int kGridPoints = 33;
  constexpr int kGoldenIterations = 20;

  auto h_of = [&](const Eigen::VectorXd& v) { return hamiltonian(problem, q, v, p, t); };

  // Tensor grid scan.
  Eigen::VectorXd best = box.lo;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<int> index(static_cast<std::size_t>(m), 0);
  Eigen::VectorXd v(m);
  for (;;) {
    for (int i = 0; i < m; ++i) {
      const double w = static_cast<double>(index[static_cast<std::size_t>(i)]) / (kGridPoints - 1);
      v[i] = box.lo[i] + w * (box.hi[i] - box.lo[i]);
    }
    const double value = h_of(v);
    if (value < best_value) {
      best_value = value;
      best = v;
    }
    int axis = 0;
    while (axis < m && ++index[static_cast<std::size_t>(axis)] == kGridPoints) {
      index[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == m) break;
  }

  // Per-axis golden-section refinement around the incumbent; coordinate
  // sweeps repeat for coupled axes.
  const int sweeps = m == 1 ? 1 : 3;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int axis = 0; axis < m; ++axis) {
      if (box.hi[axis] == box.lo[axis]) continue;
      const double spacing = (box.hi[axis] - box.lo[axis]) / (kGridPoints - 1);
      Eigen::VectorXd probe = best;
      auto along = [&](double x) {
        probe[axis] = x;
        return h_of(probe);
      };
      const double x = refine_axis(along, box.lo[axis], box.hi[axis], best[axis], spacing,
                                   kGoldenIterations);
      probe[axis] = x;
      const double value = h_of(probe);
      if (value < best_value) {
        best_value = value;
        best = probe;
      }
    }
  }
  return {best_value, best};
}

std::pair<double, Eigen::VectorXd> minimize_over_ball(const Problem& problem, const OmegaBall& ball,
                                                      const Eigen::VectorXd& q,
                                                      const Eigen::VectorXd& p, double t) {
  if (problem.m == 1) {
    OmegaBox box{Eigen::VectorXd::Constant(1, ball.center[0] - ball.radius),
                 Eigen::VectorXd::Constant(1, ball.center[0] + ball.radius)};
    return minimize_over_box(problem, box, q, p, t);
  }
  if (problem.m != 2)
    throw Error(ErrorCode::UnsupportedOmega, "ball control sets are supported for m <= 2 only");

  auto h_of = [&](const Eigen::VectorXd& v) { return hamiltonian(problem, q, v, p, t); };
  constexpr int kRadii = 33;
  constexpr int kAngles = 64;
  Eigen::VectorXd best = ball.center;
  double best_value = h_of(best);
  for (int ri = 1; ri < kRadii; ++ri) {
    const double r = ball.radius * static_cast<double>(ri) / (kRadii - 1);
    for (int ai = 0; ai < kAngles; ++ai) {
      const double angle = 2.0 * M_PI * static_cast<double>(ai) / kAngles;
      Eigen::VectorXd v = ball.center;
      v[0] += r * std::cos(angle);
      v[1] += r * std::sin(angle);
      const double value = h_of(v);
      if (value < best_value) {
        best_value = value;
        best = v;
      }
    }
  }
  // Golden refinement over the angle at the best radius, then over the radius.
  const Eigen::VectorXd offset = best - ball.center;
  double radius = offset.norm();
  double angle = std::atan2(offset[1], offset[0]);
  auto polar = [&](double r, double a) {
    Eigen::VectorXd v = ball.center;
    v[0] += r * std::cos(a);
    v[1] += r * std::sin(a);
    return v;
  };
  auto along_angle = [&](double a) { return h_of(polar(radius, a)); };
  angle = refine_axis(along_angle, angle - 0.2, angle + 0.2, angle, 0.1, 20);
  auto along_radius = [&](double r) { return h_of(polar(r, angle)); };
  radius = refine_axis(along_radius, 0.0, ball.radius, radius, ball.radius / (kRadii - 1), 20);
  const Eigen::VectorXd v = polar(radius, angle);
  const double value = h_of(v);
  if (value < best_value) return {value, v};
  return {best_value, best};
}

}  // namespace

std::pair<double, Eigen::VectorXd> minimize_hamiltonian(const Problem& problem,
                                                        const Eigen::VectorXd& q,
                                                        const Eigen::VectorXd& p, double t) {
  if (const auto* finite = std::get_if<OmegaFiniteSet>(&problem.omega.desc())) {
    double best_value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best;
    for (const auto& v : finite->points) {
      const double value = hamiltonian(problem, q, v, p, t);
      if (value < best_value) {
        best_value = value;
        best = v;
      }
    }
    return {best_value, best};
  }
  if (const auto* box = std::get_if<OmegaBox>(&problem.omega.desc()))
    return minimize_over_box(problem, *box, q, p, t);
  return minimize_over_ball(problem, std::get<OmegaBall>(problem.omega.desc()), q, p, t);
}

BvPath assemble_adjoint(const Problem& problem, const Candidate& candidate, const Trajectory& q,
                        const TimeGrid& grid) {
  std::vector<Eigen::MatrixXd> a;
  a.reserve(grid.node_count());
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const double t = grid.node(k);
    a.push_back(problem.dynamics_jacobian_state(q.state(k), candidate.u.value(t), t));
  }
  std::vector<std::vector<Eigen::VectorXd>> b;
  b.reserve(candidate.etas.size());
  for (int i = 0; i < static_cast<int>(candidate.etas.size()); ++i) {
    std::vector<Eigen::VectorXd> bi;
    bi.reserve(grid.node_count());
    for (std::size_t k = 0; k < grid.node_count(); ++k)
      bi.push_back(problem.constraint_gradient_state(i, q.state(k), grid.node(k)));
    b.push_back(std::move(bi));
  }
  const Eigen::VectorXd p_final =
      candidate.psi * problem.terminal_cost_gradient(q.state(grid.node_count() - 1));
  return solve_csp_duhamel(a, b, candidate.etas, p_final, Direction::Backward, grid);
}

HamiltonianReport hamiltonian_residual(const Problem& problem, const Trajectory& q,
                                       const ControlSignal& u, const BvPath& p,
                                       const std::vector<std::size_t>& excluded_nodes) {
  const TimeGrid& grid = q.grid();
  HamiltonianReport report;
  report.per_node.resize(grid.node_count());
  report.minimizer.resize(grid.node_count());

  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const double t = grid.node(k);
    const Eigen::VectorXd pk = k == 0 ? p.right(0) : p.left(k);
    const auto [h_min, v_min] = minimize_hamiltonian(problem, q.state(k), pk, t);
    const double h_at_u = pk.dot(problem.dynamics(q.state(k), u.value(t), t));
    report.per_node[k] = std::max(h_at_u - h_min, 0.0);
    report.minimizer[k] = v_min;
  }

  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    if (std::find(excluded_nodes.begin(), excluded_nodes.end(), k) != excluded_nodes.end())
      continue;
    report.sup_residual = std::max(report.sup_residual, report.per_node[k]);
  }
  for (std::size_t k = 0; k + 1 < grid.node_count(); ++k)
    report.l1_residual += 0.5 * (report.per_node[k] + report.per_node[k + 1]) * grid.cell_length(k);
  return report;
}

std::vector<double> slackness_residual(const Problem& problem, const Trajectory& q,
                                       const std::vector<NbvMeasure>& etas) {
  std::vector<double> out;
  out.reserve(etas.size());
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const TimeGrid& mg = etas[i].grid();
    std::vector<double> g_values(mg.node_count());
    for (std::size_t k = 0; k < mg.node_count(); ++k)
      g_values[k] = problem.constraint_value(static_cast<int>(i), q.value(mg.node(k)), mg.node(k));
    out.push_back(std::abs(stieltjes_integral(g_values, etas[i], 0.0, mg.horizon())));
  }
  return out;
}

Certificate check_certificate(const Problem& problem, const Candidate& candidate,
                              const TimeGrid& grid, const CheckTolerances& tolerances) {
  Certificate cert;
  try {
    if (candidate.psi < 0.0)
      throw Error(ErrorCode::InvalidArgument, "psi must be nonnegative");
    if (static_cast<int>(candidate.etas.size()) != problem.j)
      throw Error(ErrorCode::DimensionMismatch, "candidate needs one measure per constraint");

    TimeGrid solve_grid = grid.merged_with(candidate.u.grid());
    for (const auto& eta : candidate.etas) solve_grid = solve_grid.merged_with(eta.grid());

    const Trajectory q = solve_forward(problem, candidate.u, solve_grid);
    const BvPath p = assemble_adjoint(problem, candidate, q, solve_grid);

    // Feasibility: positive part of every constraint at every node.
    double feasibility = 0.0;
    for (int i = 0; i < problem.j; ++i)
      for (std::size_t k = 0; k < solve_grid.node_count(); ++k)
        feasibility = std::max(
            feasibility, problem.constraint_value(i, q.state(k), solve_grid.node(k)));
    feasibility = std::max(feasibility, 0.0);

    // Transversality (imposed by construction, re-verified).
    const Eigen::VectorXd p_final =
        candidate.psi * problem.terminal_cost_gradient(q.state(solve_grid.node_count() - 1));
    const double transversality = (p.value(solve_grid.horizon()) - p_final).norm();

    // Hamiltonian gap; atom-time nodes are excluded from the sup since the
    // minimization condition holds only almost everywhere.
    std::vector<std::size_t> excluded;
    for (const auto& eta : candidate.etas) {
      const TimeGrid& mg = eta.grid();
      for (std::size_t l = 1; l < mg.node_count(); ++l)
        if (eta.atoms()[l] > 0.0) {
          const std::size_t k = solve_grid.find_node(mg.node(l));
          if (k < solve_grid.node_count()) excluded.push_back(k);
        }
    }
    const HamiltonianReport ham = hamiltonian_residual(problem, q, candidate.u, p, excluded);

    const std::vector<double> slack = slackness_residual(problem, q, candidate.etas);

    double nontriviality = candidate.psi * candidate.psi;
    for (const auto& eta : candidate.etas) {
      const double tv = eta.total_variation();
      nontriviality += tv * tv;
    }

    cert.psi = candidate.psi;
    cert.nontriviality = nontriviality;
    cert.hamiltonian_l1 = ham.l1_residual;
    cert.monotone_multipliers = true;  // guaranteed by NbvMeasure construction

    auto add = [&cert](std::string name, double residual, double tolerance, bool pass) {
      cert.conditions.push_back({std::move(name), residual, tolerance, pass});
    };
    add("feasibility", feasibility, tolerances.feasibility, feasibility <= tolerances.feasibility);
    add("transversality", transversality, tolerances.transversality,
        transversality <= tolerances.transversality);
    add("hamiltonian_sup", ham.sup_residual, tolerances.hamiltonian_sup,
        ham.sup_residual <= tolerances.hamiltonian_sup);
    for (std::size_t i = 0; i < slack.size(); ++i)
      add("slackness[" + std::to_string(i + 1) + "]", slack[i], tolerances.slackness,
          slack[i] <= tolerances.slackness);
    add("nontriviality", nontriviality, tolerances.nontriviality_floor,
        nontriviality >= tolerances.nontriviality_floor);

    cert.verdict = Verdict::Pass;
    for (const auto& condition : cert.conditions)
      if (!condition.pass) cert.verdict = Verdict::Fail;
  } catch (const Error& e) {
    cert.verdict = Verdict::Error;
    cert.error_message = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  return cert;
}

}  // namespace pmpkit
