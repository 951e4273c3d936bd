// Acceptance suite: one criterion per run_* function, one PASS/FAIL line per
// criterion, nonzero exit when anything fails. Oracles live in tests/oracles
// and never call into the code paths they are checking.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/collocation_qp.hpp"
#include "oracles/lcg.hpp"
#include "oracles/riccati.hpp"
#include "pmpkit/checker.hpp"
#include "pmpkit/csv.hpp"
#include "pmpkit/ekeland.hpp"
#include "pmpkit/errors.hpp"
#include "pmpkit/problem.hpp"
#include "pmpkit/report.hpp"
#include "pmpkit/spike.hpp"
#include "pmpkit/stieltjes_cauchy.hpp"

using namespace pmpkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome ok(std::string detail) { return {true, std::move(detail)}; }
Outcome bad(std::string detail) { return {false, std::move(detail)}; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double condition_residual(const Certificate& cert, const std::string& name) {
  for (const auto& c : cert.conditions)
    if (c.name == name) return c.residual;
  return std::numeric_limits<double>::quiet_NaN();
}

// --- criterion 1: unconstrained LQR against the Riccati oracle -------------

Outcome run_lqr_check() {
  const Problem problem = Problem::load_json(R"json({
    "n":2,"m":1,"f":["q1+u1","(q1^2+u1^2)/2"],"psi":"q2","G":[],
    "omega":{"type":"box","lo":[-5],"hi":[5]},"q0":[1,0],"T":1.0})json");
  const TimeGrid grid = TimeGrid::uniform(1.0, 2000);

  const std::vector<double> gains = test_support::riccati_gains(grid);
  const std::vector<double> closed_loop = test_support::riccati_closed_loop(grid, gains, 1.0);

  std::vector<Eigen::VectorXd> cells;
  cells.reserve(grid.cell_count());
  for (std::size_t k = 0; k < grid.cell_count(); ++k)
    cells.push_back(Eigen::VectorXd::Constant(1, -gains[k] * closed_loop[k]));
  Candidate candidate{ControlSignal(grid, std::move(cells)), 1.0, {}};

  const Certificate cert = check_certificate(problem, candidate, grid);
  const double ham = condition_residual(cert, "hamiltonian_sup");
  const double trans = condition_residual(cert, "transversality");
  if (cert.verdict != Verdict::Pass)
    return bad("verdict not PASS; report:\n" + emit_report(cert, ReportFormat::Text));
  if (!(ham <= 1e-3)) return bad("hamiltonian sup residual " + fmt(ham) + " > 1e-3");
  if (!(trans <= 1e-8)) return bad("transversality " + fmt(trans) + " > 1e-8");
  return ok("PASS with hamiltonian sup " + fmt(ham) + ", transversality " + fmt(trans));
}

// --- criterion 2: Bryson-Denham against the collocation oracle -------------

Outcome run_bryson_denham_check() {
  const double bound = 1.0 / 9.0;
  const double weight = 1000.0;
  const int cells = 400;
  const Problem problem = Problem::load_json(R"json({
    "n":3,"m":1,"f":["q2","u1","u1^2/2"],
    "psi":"q3 + 1000*(q1^2 + (q2+1)^2)","G":["q1 - 1/9"],
    "omega":{"type":"box","lo":[-20],"hi":[20]},"q0":[0,1,0],"T":1.0})json");
  const TimeGrid grid = TimeGrid::uniform(1.0, cells);

  const test_support::BrysonDenhamSolution oracle =
      test_support::solve_bryson_denham_qp(cells, bound, weight);

  std::vector<Eigen::VectorXd> u_cells;
  u_cells.reserve(grid.cell_count());
  for (int k = 0; k < cells; ++k) u_cells.push_back(Eigen::VectorXd::Constant(1, oracle.control[k]));
  ControlSignal u_star(grid, std::move(u_cells));

  std::vector<double> atoms(grid.node_count(), 0.0);
  for (std::size_t k = 1; k < atoms.size(); ++k) atoms[k] = oracle.multipliers[k];
  NbvMeasure eta(grid, std::move(atoms), std::vector<double>(grid.cell_count(), 0.0));

  CheckTolerances tolerances;
  tolerances.slackness = 1e-3;
  Candidate candidate{u_star, 1.0, {eta}};
  const Certificate cert = check_certificate(problem, candidate, grid, tolerances);
  const double slack = condition_residual(cert, "slackness[1]");
  const double feas = condition_residual(cert, "feasibility");
  if (cert.verdict != Verdict::Pass)
    return bad("oracle candidate not PASS; report:\n" + emit_report(cert, ReportFormat::Text));
  if (!(slack <= 1e-3)) return bad("slackness " + fmt(slack) + " > 1e-3");
  if (!(feas <= 1e-6)) return bad("feasibility " + fmt(feas) + " > 1e-6");

  // Perturbing the control on [0.3, 0.5) must flip the verdict.
  std::vector<Eigen::VectorXd> bumped;
  bumped.reserve(grid.cell_count());
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    const double t = grid.node(k);
    bumped.push_back(Eigen::VectorXd::Constant(
        1, oracle.control[static_cast<Eigen::Index>(k)] + (t >= 0.3 && t < 0.5 ? 0.2 : 0.0)));
  }
  Candidate perturbed{ControlSignal(grid, std::move(bumped)), 1.0, {eta}};
  const Certificate flipped = check_certificate(problem, perturbed, grid, tolerances);
  if (flipped.verdict != Verdict::Fail) return bad("perturbed candidate did not FAIL");

  return ok("PASS with slackness " + fmt(slack) + ", feasibility " + fmt(feas) +
            "; perturbation flips to FAIL");
}

// --- criterion 3: selection-set bound --------------------------------------

Outcome run_selection_bound() {
  const TimeGrid grid = TimeGrid::uniform(1.0, 256);
  auto sample = [&](const std::function<double(double)>& fn) {
    std::vector<Eigen::VectorXd> h(grid.node_count());
    for (std::size_t k = 0; k < grid.node_count(); ++k)
      h[k] = Eigen::VectorXd::Constant(1, fn(grid.node(k)));
    return h;
  };
  const std::vector<std::vector<Eigen::VectorXd>> fields = {
      sample([](double) { return 1.0; }),
      sample([](double t) { return t; }),
      sample([](double t) { return std::sin(4.0 * M_PI * t); }),
  };

  for (const auto& h : fields) {
    for (double rho : {0.5, 0.25, 0.1, 0.05}) {
      const SpikeSet spikes = build_qrho(h, rho, grid);
      if (std::abs(spikes.total_length() - rho) > 1e-14)
        return bad("measure off by " + fmt(std::abs(spikes.total_length() - rho)));

      // Dense oracle: the running integral in closed form, evaluated at every
      // breakpoint and at 10x the base resolution.
      auto plain = [&](double t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < grid.cell_count() && grid.node(k) < t; ++k)
          acc += h[k][0] * (std::min(t, grid.node(k + 1)) - grid.node(k));
        return acc;
      };
      auto over_spikes = [&](double t) {
        double acc = 0.0;
        for (const auto& [a, b] : spikes.intervals()) {
          if (a >= t) break;
          acc += h[grid.cell_of(a)][0] * (std::min(b, t) - a);
        }
        return acc;
      };
      double sup = 0.0;
      std::vector<double> samples = spikes.endpoints();
      for (std::size_t i = 0; i <= grid.cell_count() * 10; ++i)
        samples.push_back(static_cast<double>(i) / static_cast<double>(grid.cell_count() * 10));
      for (double t : samples)
        sup = std::max(sup, std::abs(plain(t) - over_spikes(t) / rho));
      if (sup > rho) return bad("running-integral bound " + fmt(sup) + " > rho " + fmt(rho));
    }
  }
  return ok("measure exact and bound satisfied for 3 fields x 4 rhos");
}

// --- criterion 4: differentiability probe ----------------------------------

Outcome run_probe_decay() {
  const Problem problem = Problem::load_json(R"json({
    "n":1,"m":1,"f":["q1*u1"],"psi":"q1","G":[],
    "omega":{"type":"box","lo":[-2],"hi":[2]},"q0":[1],"T":1.0})json");
  const TimeGrid grid = TimeGrid::uniform(1.0, 400);
  const ControlSignal u = ControlSignal::constant(grid, Eigen::VectorXd::Constant(1, 0.5));
  const ControlSignal u_prime = ControlSignal::constant(grid, Eigen::VectorXd::Ones(1));
  const auto table = differentiability_probe(problem, u, u_prime, {0.2, 0.1, 0.05, 0.025}, grid);
  for (std::size_t i = 1; i < table.size(); ++i)
    if (!(table[i].second < table[i - 1].second))
      return bad("err(" + fmt(table[i].first) + ") did not decrease");
  if (!(table[3].second <= table[0].second / 3.0))
    return bad("err(0.025) = " + fmt(table[3].second) + " > err(0.2)/3 = " +
               fmt(table[0].second / 3.0));
  return ok("err ladder " + fmt(table[0].second) + " -> " + fmt(table[3].second) +
            " strictly decreasing, final <= first/3");
}

// --- criterion 5: cross-method Cauchy-Stieltjes ------------------------------

Outcome run_cross_method() {
  test_support::Lcg rng(57721u);
  double worst = 0.0;
  for (int instance = 0; instance < 5; ++instance) {
    const TimeGrid grid = TimeGrid::uniform(1.0, 128);
    const int dim = instance % 2 == 0 ? 1 : 2;

    std::vector<Eigen::MatrixXd> a(grid.node_count());
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
      if (dim == 1)
        m(0, 0) = 1.2 * std::cos(3.0 * grid.node(k));
      else {
        m(0, 1) = 1.0;
        m(1, 0) = -1.0;
        m(1, 1) = 0.4 * std::sin(grid.node(k));
      }
      a[k] = m;
    }
    std::vector<double> atoms(grid.node_count(), 0.0), densities(grid.cell_count(), 0.0);
    for (int s = 0; s < 3; ++s)
      atoms[static_cast<std::size_t>(rng.uniform_int(1, static_cast<int>(grid.node_count()) - 1))] =
          rng.uniform(0.1, 0.8);
    for (auto& d : densities) d = rng.uniform(0.0, 1.2);
    const NbvMeasure eta(grid, atoms, densities);

    std::vector<Eigen::VectorXd> b(grid.node_count());
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v[i] = std::cos(grid.node(k) + i);
      b[k] = v;
    }
    const Eigen::VectorXd boundary = Eigen::VectorXd::Constant(dim, rng.uniform(-1.0, 1.0));
    const Direction direction = instance % 2 == 0 ? Direction::Backward : Direction::Forward;

    const BvPath fp = solve_csp_fixed_point(a, {b}, {eta}, boundary, direction, grid);
    const BvPath dh = solve_csp_duhamel(a, {b}, {eta}, boundary, direction, grid);
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      worst = std::max(worst, (fp.left(k) - dh.left(k)).lpNorm<Eigen::Infinity>());
      worst = std::max(worst, (fp.right(k) - dh.right(k)).lpNorm<Eigen::Infinity>());
    }
  }
  if (!(worst < 1e-8)) return bad("cross-method gap " + fmt(worst) + " >= 1e-8");

  // With all measures zero both routes match duhamel_linear within 1e-10.
  const TimeGrid grid = TimeGrid::uniform(1.0, 100);
  std::vector<Eigen::MatrixXd> a(grid.node_count(), Eigen::MatrixXd::Constant(1, 1, 1.0));
  std::vector<Eigen::VectorXd> b(grid.node_count(), Eigen::VectorXd::Constant(1, 2.0));
  const Eigen::VectorXd q0 = Eigen::VectorXd::Constant(1, 0.3);
  double reduction_gap = 0.0;
  for (Direction direction : {Direction::Forward, Direction::Backward}) {
    const BvPath fp =
        solve_csp_fixed_point(a, {b}, {NbvMeasure::zero(grid)}, q0, direction, grid);
    const BvPath dh = solve_csp_duhamel(a, {b}, {NbvMeasure::zero(grid)}, q0, direction, grid);
    const Trajectory linear = duhamel_linear(
        a, std::vector<Eigen::VectorXd>(grid.node_count(), Eigen::VectorXd::Zero(1)), q0,
        direction, grid);
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      reduction_gap = std::max(reduction_gap, std::abs(fp.left(k)[0] - linear.state(k)[0]));
      reduction_gap = std::max(reduction_gap, std::abs(dh.left(k)[0] - linear.state(k)[0]));
    }
  }
  if (!(reduction_gap < 1e-10))
    return bad("zero-measure reduction gap " + fmt(reduction_gap) + " >= 1e-10");
  return ok("5 instances agree to " + fmt(worst) + "; zero-measure reduction gap " +
            fmt(reduction_gap));
}

// --- criterion 6: Fubini identity -------------------------------------------

Outcome run_fubini() {
  auto residual_at = [](std::size_t cells) {
    const TimeGrid grid = TimeGrid::uniform(1.0, cells);
    const std::size_t n = grid.node_count();
    std::vector<double> phi(n * n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) phi[k * n + l] = grid.node(k) * grid.node(l);
    return fubini_residual(phi, NbvMeasure::lebesgue(grid));
  };
  const double coarse = residual_at(1000);
  const double fine = residual_at(2000);
  if (!(coarse <= 1e-6)) return bad("residual " + fmt(coarse) + " > 1e-6 at N=1000");
  // Doubling N must at least halve the residual (the quadrature is second
  // order, so it in fact quarters).
  if (!(fine <= 0.6 * coarse))
    return bad("residual did not halve: " + fmt(coarse) + " -> " + fmt(fine));
  return ok("residual " + fmt(coarse) + " at N=1000, ratio " + fmt(fine / coarse) +
            " on doubling");
}

// --- criterion 7: Gronwall-Lipschitz dependence ------------------------------

Outcome run_gronwall() {
  const std::vector<std::string> dynamics = {
      R"json({"n":1,"m":1,"f":["q1+u1"],"psi":"q1","G":[],
          "omega":{"type":"box","lo":[-2],"hi":[2]},"q0":[0],"T":1.0})json",
      R"json({"n":1,"m":1,"f":["q1*u1"],"psi":"q1","G":[],
          "omega":{"type":"box","lo":[-2],"hi":[2]},"q0":[1],"T":1.0})json",
      R"json({"n":2,"m":1,"f":["q2","sin(q1)+u1"],"psi":"q1","G":[],
          "omega":{"type":"box","lo":[-2],"hi":[2]},"q0":[0.3,0],"T":1.0})json",
  };
  test_support::Lcg rng(162342u);
  int checked = 0;
  for (const auto& json : dynamics) {
    const Problem problem = Problem::load_json(json);
    const TimeGrid grid = TimeGrid::uniform(1.0, 80);
    const ControlSignal base =
        ControlSignal::constant(grid, Eigen::VectorXd::Constant(problem.m, 0.25));
    const double radius = 1.5;
    const LipschitzEstimate est = estimate_lipschitz(problem, base, radius, grid);
    const double nu = 1.0 / (2.0 * est.C);
    const Trajectory q_base = solve_forward(problem, base, grid);

    for (int pair = 0; pair < 20; ++pair) {
      auto perturb = [&] {
        std::vector<Eigen::VectorXd> values;
        values.reserve(grid.cell_count());
        for (std::size_t k = 0; k < grid.cell_count(); ++k)
          values.push_back(Eigen::VectorXd::Constant(problem.m, rng.uniform(-1.0, 1.0)));
        ControlSignal direction(grid, values);
        const double raw =
            l1_distance(direction, ControlSignal::constant(grid, Eigen::VectorXd::Zero(problem.m)));
        const double scale = 0.45 * nu / raw * rng.uniform01();
        std::vector<Eigen::VectorXd> out;
        out.reserve(grid.cell_count());
        for (std::size_t k = 0; k < grid.cell_count(); ++k) {
          Eigen::VectorXd v = base.cell_value(k) + scale * direction.cell_value(k);
          out.push_back(v.cwiseMax(-radius).cwiseMin(radius));
        }
        return ControlSignal(grid, std::move(out));
      };
      const ControlSignal u_one = perturb();
      const ControlSignal u_two = perturb();
      const Trajectory q_one = solve_forward(problem, u_one, grid);
      const Trajectory q_two = solve_forward(problem, u_two, grid);
      const double du = l1_distance(u_one, u_two);
      double dq = 0.0;
      for (std::size_t k = 0; k < grid.node_count(); ++k)
        dq = std::max(dq, (q_one.state(k) - q_two.state(k)).lpNorm<Eigen::Infinity>());
      if (dq > est.C * du + 1e-12)
        return bad("violation: |dq| " + fmt(dq) + " > C |du| " + fmt(est.C * du));
      ++checked;
    }
  }
  return ok(std::to_string(checked) + " random pairs, zero violations");
}

// --- criterion 8: AD against central differences -----------------------------

Outcome run_ad_corpus() {
  const std::vector<std::string> corpus = {
      "q1+q2*u1", "q1*q2-u1/q2", "sin(q1)*cos(u1)+t", "exp(q1-q2)", "log(q1+1)",
      "sqrt(q1+u1)", "tanh(q1*u1)", "q1^3+u1^2", "q1^2*sin(t)", "(q1+q2)^2/(1+u1)",
      "cos(q1*q2*u1)", "exp(sin(q1))", "q1/(q2+2)", "sqrt(1+q1^2)", "tanh(q1)+tanh(q2)",
      "q1*exp(-q2)", "log(1+exp(q1))", "sin(t*q1)+cos(t*q2)", "(1+q1)^(1+u1)", "q2^2*u1^3",
      "q1^2+q2^2+u1^2", "sin(q1+q2+u1+t)", "exp(q1*u1/4)", "q1*q2*u1*t", "(q1-q2)^3",
      "1/(1+q1^2)", "sqrt(q1^2+q2^2+1)", "tanh(q1*q2-u1)", "cos(q1)^3", "q1^5",
      "log(q1+q2+3)", "exp(-q1^2)", "q1*sin(q2)+q2*cos(q1)", "u1/(1+q1^2)", "(2+sin(t))*q1",
      "q1^2/(q2+1.5)", "sqrt(4+u1)", "tanh(t*q1*u1)", "exp(q1)/(1+exp(q1))", "q2^4-q1^4",
      "sin(2*q1)*sin(3*q2)", "cos(u1)^2-sin(u1)^2", "q1+q2+u1+t+1", "(q1*u1)^2",
      "log(2+cos(q1))", "exp(t)*q1", "q1^2*q2^2", "sqrt(1+t)*u1", "tanh(q1)^2",
      "q1/(0.5+u1^2)",
  };
  if (corpus.size() != 50) return bad("corpus must contain 50 expressions");

  test_support::Lcg rng(90210u);
  const double step = 1e-6;
  int checked = 0;
  for (const auto& text : corpus) {
    const Expr e = Expr::parse(text, 2, 1);
    for (int trial = 0; trial < 2; ++trial) {
      std::vector<double> q{rng.uniform(0.2, 1.2), rng.uniform(0.2, 1.2)};
      std::vector<double> u{rng.uniform(0.2, 1.2)};
      const double t = rng.uniform(0.0, 1.0);
      for (VarKind kind : {VarKind::State, VarKind::Control}) {
        const std::vector<double> partials = e.partials(kind, q, u, t);
        for (std::size_t i = 0; i < partials.size(); ++i) {
          auto eval_at = [&](double delta) {
            std::vector<double> qq = q, uu = u;
            if (kind == VarKind::State)
              qq[i] += delta;
            else
              uu[i] += delta;
            return e.eval(qq, uu, t);
          };
          const double fd = (eval_at(step) - eval_at(-step)) / (2.0 * step);
          const double scale = std::max(std::abs(fd), 1e-3);
          if (std::abs(partials[i] - fd) / scale > 1e-6)
            return bad("mismatch on '" + text + "'");
          ++checked;
        }
      }
    }
  }
  return ok(std::to_string(checked) + " partials within 1e-6 of central differences");
}

// --- criterion 9: descent sanity ---------------------------------------------

Outcome run_descent_sanity() {
  const Problem problem = Problem::load_json(R"json({
    "n":1,"m":1,"f":["u1"],"psi":"q1","G":["q1-1000"],
    "omega":{"type":"box","lo":[-1],"hi":[1]},"q0":[0],"T":1.0})json");
  const TimeGrid grid = TimeGrid::uniform(1.0, 40);
  const ControlSignal start = ControlSignal::constant(grid, Eigen::VectorXd::Ones(1));
  const PenaltyState state = ekeland_descend(problem, start, {}, grid);

  const int accepted = static_cast<int>(state.history.size()) - 1;
  if (accepted > 500) return bad("needed " + std::to_string(accepted) + " > 500 moves");

  const TimeGrid final_grid = grid.merged_with(state.u.grid());
  const Trajectory q = solve_forward(problem, state.u, final_grid);
  const double cost = problem.terminal_cost(q.state(final_grid.node_count() - 1));
  if (!(cost <= -0.98)) return bad("cost " + fmt(cost) + " not within 2% of -T");

  for (std::size_t i = 1; i < state.history.size(); ++i)
    if (!(state.history[i].j_value < state.history[i].j_before))
      return bad("accepted move did not strictly decrease J");

  const auto [psi, etas] = extract_multipliers(problem, state, grid);
  if (psi != 1.0) return bad("psi " + fmt(psi) + " != 1 at the feasible endpoint");
  for (const auto& eta : etas)
    if (!eta.is_zero()) return bad("eta not identically zero at the feasible endpoint");
  return ok("cost " + fmt(cost) + " in " + std::to_string(accepted) +
            " accepted moves; J strictly decreases; psi = 1, eta = 0");
}

// --- criterion 10: CLI determinism -------------------------------------------

Outcome run_cli_determinism() {
  const char* cli = std::getenv("PMPKIT_CLI");
  const char* problems = std::getenv("PMPKIT_PROBLEMS");
  if (cli == nullptr || problems == nullptr) return bad("PMPKIT_CLI / PMPKIT_PROBLEMS not set");

  const fs::path root = fs::temp_directory_path() / "pmpkit_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);

  // Shared inputs.
  const fs::path u_path = root / "u.csv";
  {
    std::ofstream out(u_path);
    out << "t,u1\n";
    for (int k = 0; k <= 20; ++k) out << (k / 20.0) << "," << (k % 3 == 0 ? -1.0 : 0.5) << "\n";
  }
  const fs::path uprime_path = root / "uprime.csv";
  {
    std::ofstream out(uprime_path);
    out << "t,u1\n";
    for (int k = 0; k <= 20; ++k) out << (k / 20.0) << "," << 1.0 << "\n";
  }

  const std::string problem = std::string(problems) + "/scalar_integrator.json";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", " simulate --problem " + problem + " --grid 50 --control " + u_path.string()},
      {"adjoint", " adjoint --problem " + problem + " --grid 50 --psi 1 --control " + u_path.string()},
      {"check", " check --problem " + problem + " --grid 50 --psi 1 --control " + u_path.string()},
      {"solve", " solve --problem " + problem + " --grid 30 --budget 25"},
      {"probe", " probe --problem " + problem + " --grid 50 --control " + u_path.string() +
                    " --control-prime " + uprime_path.string() + " --rhos 0.2 0.1"},
  };

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  for (const auto& [name, args] : commands) {
    std::vector<std::string> digests;
    for (int round = 0; round < 2; ++round) {
      const fs::path out_dir = root / (name + "_" + std::to_string(round));
      const fs::path stdout_file = root / (name + "_stdout_" + std::to_string(round));
      const std::string command = std::string(cli) + args + " --out " + out_dir.string() +
                                  " > " + stdout_file.string() + " 2>/dev/null";
      if (std::system(command.c_str()) == -1) return bad("failed to spawn the CLI");
      std::string digest = "stdout:" + slurp(stdout_file) + "\n";
      std::vector<fs::path> files;
      if (fs::exists(out_dir))
        for (const auto& entry : fs::directory_iterator(out_dir)) files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const auto& file : files)
        digest += file.filename().string() + ":" + slurp(file) + "\n";
      digests.push_back(std::move(digest));
    }
    if (digests[0] != digests[1]) return bad("outputs differ across runs of '" + name + "'");
    if (digests[0].size() < 20) return bad("suspiciously empty outputs for '" + name + "'");
  }
  return ok("all 5 subcommands byte-identical across repeat runs");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria = {
      {1, "unconstrained LQR check vs Riccati oracle", run_lqr_check},
      {2, "Bryson-Denham state-constrained check vs collocation oracle", run_bryson_denham_check},
      {3, "selection-set measure and running-integral bound", run_selection_bound},
      {4, "differentiability probe decay", run_probe_decay},
      {5, "cross-method Cauchy-Stieltjes agreement", run_cross_method},
      {6, "Fubini identity residual and convergence", run_fubini},
      {7, "Gronwall-Lipschitz dependence", run_gronwall},
      {8, "AD correctness over the 50-expression corpus", run_ad_corpus},
      {9, "descent sanity on the scalar integrator", run_descent_sanity},
      {10, "CLI determinism", run_cli_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = bad(std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %d: %s -- %s\n", outcome.pass ? "PASS" : "FAIL", criterion.id,
                criterion.name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
