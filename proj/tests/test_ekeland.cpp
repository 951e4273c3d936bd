#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles/collocation_qp.hpp"
#include "oracles/lcg.hpp"
#include "pmpkit/ekeland.hpp"
#include "pmpkit/errors.hpp"
#include "pmpkit/problem.hpp"
#include "pmpkit/checker.hpp"
#include "pmpkit/report.hpp"
#include "pmpkit/spike.hpp"

using namespace pmpkit;

namespace {

const char* kIntegrator = R"({
  "n":1,"m":1,"f":["u1"],"psi":"q1","G":[],
  "omega":{"type":"box","lo":[-1],"hi":[1]},"q0":[0],"T":1.0})";

const char* kIntegratorInactive = R"({
  "n":1,"m":1,"f":["u1"],"psi":"q1","G":["q1-1000"],
  "omega":{"type":"box","lo":[-1],"hi":[1]},"q0":[0],"T":1.0})";

std::vector<Eigen::VectorXd> rows(const std::vector<std::vector<double>>& data) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& r : data) {
    Eigen::VectorXd v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[static_cast<Eigen::Index>(i)] = r[i];
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

TEST_CASE("distance to the nonpositive cone") {
  CHECK(distance_to_cone(rows({{-1.0, -0.5}, {-2.0, 0.0}})) == 0.0);
  CHECK(distance_to_cone(rows({{-1.0}, {0.3}, {-0.2}})) == doctest::Approx(0.3));
  // g(t) = t - 0.5 sampled on [0, 1]: sup of the positive part is 0.5.
  std::vector<std::vector<double>> ramp;
  for (int k = 0; k <= 100; ++k) ramp.push_back({k / 100.0 - 0.5});
  CHECK(distance_to_cone(rows(ramp)) == doctest::Approx(0.5));
}

TEST_CASE("distance to the cone is 1-Lipschitz in sup norm") {
  test_support::Lcg rng(8899u);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> a, b;
    double sup_diff = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double x = rng.uniform(-2.0, 2.0);
      const double y = rng.uniform(-2.0, 2.0);
      a.push_back({x});
      b.push_back({y});
      sup_diff = std::max(sup_diff, std::abs(x - y));
    }
    CHECK(std::abs(distance_to_cone(rows(a)) - distance_to_cone(rows(b))) <= sup_diff + 1e-15);
  }
}

TEST_CASE("penalized cost follows the formula") {
  const Problem problem = Problem::load_json(kIntegrator);
  const TimeGrid grid = TimeGrid::uniform(1.0, 50);
  const ControlSignal zero = ControlSignal::constant(grid, Eigen::VectorXd::Zero(1));

  // Feasible with cost equal to the reference: J = eps.
  const double cost = 0.0;  // q(1) = 0 under u = 0
  CHECK(penalized_cost(problem, zero, cost, 0.25, grid) == doctest::Approx(0.25).epsilon(1e-12));

  // Feasible with cost = reference - eps: positive part vanishes, J = 0.
  CHECK(penalized_cost(problem, zero, cost + 0.25, 0.25, grid) == 0.0);

  // Infeasible with violation 0.3 and shifted cost term 0.4: J = 0.5.
  const Problem constrained = Problem::load_json(R"({
    "n":1,"m":1,"f":["u1"],"psi":"q1","G":["q1-0.2"],
    "omega":{"type":"box","lo":[-1],"hi":[1]},"q0":[0],"T":1.0})");
  const ControlSignal half = ControlSignal::constant(grid, Eigen::VectorXd::Constant(1, 0.5));
  // cost = 0.5, violation = sup (t/2 - 0.2)^+ = 0.3; pick reference 0.3,
  // eps 0.2 so the cost term is 0.4.
  CHECK(penalized_cost(constrained, half, 0.3, 0.2, grid) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("already-optimal start accepts no moves") {
  const Problem problem = Problem::load_json(kIntegrator);
  const TimeGrid grid = TimeGrid::uniform(1.0, 40);
  const ControlSignal best = ControlSignal::constant(grid, Eigen::VectorXd::Constant(1, -1.0));
  const PenaltyState state = ekeland_descend(problem, best, {}, grid);
  CHECK(state.history.size() == 1);  // only the initial row
  CHECK_FALSE(state.budget_exhausted);
  for (std::size_t k = 0; k < state.u.grid().cell_count(); ++k)
    CHECK(state.u.cell_value(k)[0] == -1.0);
}

TEST_CASE("scalar integrator descends to the analytic optimum") {
  const Problem problem = Problem::load_json(kIntegrator);
  const TimeGrid grid = TimeGrid::uniform(1.0, 40);
  const ControlSignal start = ControlSignal::constant(grid, Eigen::VectorXd::Ones(1));
  const PenaltyState state = ekeland_descend(problem, start, {}, grid);

  const TimeGrid final_grid = grid.merged_with(state.u.grid());
  const Trajectory q = solve_forward(problem, state.u, final_grid);
  const double cost = problem.terminal_cost(q.state(final_grid.node_count() - 1));
  CHECK(cost <= -0.98);  // within 2% of the analytic optimum -T
  CHECK(static_cast<int>(state.history.size()) - 1 <= 500);

  // Every accepted move strictly improved the penalized cost at decision time.
  for (std::size_t i = 1; i < state.history.size(); ++i)
    CHECK(state.history[i].j_value < state.history[i].j_before);
  // The terminal cost of accepted iterates decreases monotonically here.
  for (std::size_t i = 1; i < state.history.size(); ++i)
    CHECK(state.history[i].cost < state.history[i - 1].cost);
}

TEST_CASE("multiplier extraction on feasible and infeasible endpoints") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 40);

  // Feasible endpoint with an inactive constraint: psi = 1, eta = 0.
  const Problem inactive = Problem::load_json(kIntegratorInactive);
  const ControlSignal start = ControlSignal::constant(grid, Eigen::VectorXd::Ones(1));
  const PenaltyState state = ekeland_descend(inactive, start, {}, grid);
  const auto [psi, etas] = extract_multipliers(inactive, state, grid);
  CHECK(psi == 1.0);
  REQUIRE(etas.size() == 1);
  CHECK(etas[0].is_zero());

  // Single active constraint peaking at one time: one atom there.
  const Problem tight = Problem::load_json(R"({
    "n":1,"m":1,"f":["u1"],"psi":"0-q1","G":["q1-0.25"],
    "omega":{"type":"box","lo":[-1],"hi":[1]},"q0":[0],"T":1.0})");
  // Hold u = 1 so q(t) = t crosses the bound; the descent has a cost pull
  // toward larger q, so the final iterate stays infeasible with the peak at
  // t = T.
  const ControlSignal push = ControlSignal::constant(grid, Eigen::VectorXd::Ones(1));
  DescentOptions options;
  options.budget = 3;
  const PenaltyState stuck = ekeland_descend(tight, push, {}, grid, options);
  const auto [psi2, etas2] = extract_multipliers(tight, stuck, grid);
  REQUIRE(etas2.size() == 1);
  if (!etas2[0].is_zero()) {
    // Normalization |psi|^2 + sum V(eta_i)^2 = 1 within 1e-12.
    double v = etas2[0].total_variation();
    CHECK(std::abs(psi2 * psi2 + v * v - 1.0) <= 1e-12);
    // The atoms sit where the constraint attains its sup violation.
    std::size_t atom_count = 0;
    for (double a : etas2[0].atoms())
      if (a > 0.0) ++atom_count;
    CHECK(atom_count == 1);
  }
}

TEST_CASE("normalization identity holds for mixed endpoints") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 30);
  const Problem constrained = Problem::load_json(R"({
    "n":1,"m":1,"f":["u1"],"psi":"q1","G":["q1-0.1"],
    "omega":{"type":"box","lo":[-1],"hi":[1]},"q0":[0],"T":1.0})");
  const ControlSignal up = ControlSignal::constant(grid, Eigen::VectorXd::Constant(1, 0.8));
  DescentOptions options;
  options.budget = 0;  // extraction at the raw starting point
  const PenaltyState state = ekeland_descend(constrained, up, {}, grid, options);
  const auto [psi, etas] = extract_multipliers(constrained, state, grid);
  double sum = psi * psi;
  for (const auto& eta : etas) sum += eta.total_variation() * eta.total_variation();
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("descent closes in on the collocation solution of the constrained benchmark") {
  const int cells = 200;
  const Problem problem = Problem::load_json(R"json({
    "n":3,"m":1,"f":["q2","u1","u1^2/2"],
    "psi":"q3 + 1000*(q1^2 + (q2+1)^2)","G":["q1 - 1/9"],
    "omega":{"type":"box","lo":[-20],"hi":[20]},"q0":[0,1,0],"T":1.0})json");
  const TimeGrid grid = TimeGrid::uniform(1.0, cells);

  const auto oracle = test_support::solve_bryson_denham_qp(cells, 1.0 / 9.0, 1000.0);
  std::vector<Eigen::VectorXd> oracle_cells;
  oracle_cells.reserve(grid.cell_count());
  for (int k = 0; k < cells; ++k)
    oracle_cells.push_back(Eigen::VectorXd::Constant(1, oracle.control[k]));
  const ControlSignal oracle_control(grid, std::move(oracle_cells));

  DescentOptions options;
  options.budget = 60;
  options.rho_ladder = {0.5, 0.25};
  const ControlSignal start = ControlSignal::constant(grid, Eigen::VectorXd::Zero(1));
  const PenaltyState state =
      ekeland_descend(problem, start, {oracle_control}, grid, options);

  const TimeGrid final_grid = grid.merged_with(state.u.grid());
  const Trajectory q = solve_forward(problem, state.u, final_grid);
  double violation = 0.0;
  for (std::size_t k = 0; k < final_grid.node_count(); ++k)
    violation = std::max(violation,
                         problem.constraint_value(0, q.state(k), final_grid.node(k)));
  const double cost = problem.terminal_cost(q.state(final_grid.node_count() - 1));

  CHECK(violation <= 1e-3);
  CHECK(std::abs(cost - oracle.cost) <= 0.05 * oracle.cost);

  // Multiplier extraction at the final iterate: when the constraint is still
  // (slightly) active, the atoms concentrate in the contact region, and the
  // candidate feeds straight into the certificate checker.
  const auto [psi, etas] = extract_multipliers(problem, state, grid);
  REQUIRE(etas.size() == 1);
  for (std::size_t k = 0; k < etas[0].grid().node_count(); ++k)
    if (etas[0].atoms()[k] > 0.0) {
      const double t = etas[0].grid().node(k);
      CHECK(t >= 0.2);
      CHECK(t <= 0.8);
    }
  Candidate candidate{state.u, psi, etas};
  const Certificate cert = check_certificate(problem, candidate, grid);
  CHECK(cert.verdict != Verdict::Error);
  const std::string report = emit_report(cert, ReportFormat::Text);
  CHECK(report.find("certificate:") != std::string::npos);
}
