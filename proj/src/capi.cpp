#include "pmpkit.h"

#include <cstring>
#include <new>
#include <string>

#include "pmpkit/checker.hpp"
#include "pmpkit/csv.hpp"
#include "pmpkit/ekeland.hpp"
#include "pmpkit/errors.hpp"
#include "pmpkit/ode.hpp"
#include "pmpkit/problem.hpp"
#include "pmpkit/report.hpp"
#include "pmpkit/spike.hpp"

using namespace pmpkit;

struct pmpkit_problem {
  Problem value;
};
struct pmpkit_control {
  ControlSignal value;
};
struct pmpkit_trajectory {
  Trajectory value;
};
struct pmpkit_bvpath {
  BvPath value;
};
struct pmpkit_measures {
  std::vector<NbvMeasure> value;
};
struct pmpkit_certificate {
  Certificate value;
};
struct pmpkit_solve_result {
  Problem problem;
  PenaltyState state;
  double psi = 0.0;
  std::vector<NbvMeasure> etas;
  double cost = 0.0;
};
struct pmpkit_probe_table {
  std::vector<std::pair<double, double>> value;
};

namespace {

thread_local std::string g_last_error;

pmpkit_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIdentifier:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::MissingField:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ConstraintUsesControl:
      return PMPKIT_ERR_PARSE;
    case ErrorCode::BlowUp:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::DomainError:
    case ErrorCode::SingularTransition:
    case ErrorCode::NoConvergence:
    case ErrorCode::BoundNotAchieved:
    case ErrorCode::DegenerateState:
      return PMPKIT_ERR_SOLVER;
    case ErrorCode::RangeError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnsupportedOmega:
      return PMPKIT_ERR_INVALID;
    case ErrorCode::IoError:
      return PMPKIT_ERR_IO;
  }
  return PMPKIT_ERR_INTERNAL;
}

template <typename Fn>
pmpkit_status guarded(Fn&& fn) {
  try {
    fn();
    return PMPKIT_OK;
  } catch (const Error& e) {
    g_last_error = std::string(error_code_name(e.code())) + ": " + e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PMPKIT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PMPKIT_ERR_INTERNAL;
  }
}

pmpkit_status invalid(const char* message) {
  g_last_error = message;
  return PMPKIT_ERR_INVALID;
}

TimeGrid uniform_grid(const Problem& problem, size_t cells) {
  return TimeGrid::uniform(problem.T, cells == 0 ? 1 : cells);
}

std::vector<NbvMeasure> measures_or_zero(const Problem& problem,
                                         const pmpkit_measures* measures_or_null,
                                         const TimeGrid& grid) {
  if (measures_or_null != nullptr) return measures_or_null->value;
  std::vector<NbvMeasure> etas;
  etas.reserve(static_cast<std::size_t>(problem.j));
  for (int i = 0; i < problem.j; ++i) etas.push_back(NbvMeasure::zero(grid));
  return etas;
}

}  // namespace

extern "C" {

const char* pmpkit_version(void) { return "0.1.0"; }

const char* pmpkit_last_error(void) { return g_last_error.c_str(); }

void pmpkit_string_free(char* text) { delete[] text; }

/* --- problems ------------------------------------------------------------ */

pmpkit_status pmpkit_problem_load_file(const char* path, pmpkit_problem** out) {
  if (path == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = new pmpkit_problem{Problem::load_file(path)}; });
}

pmpkit_status pmpkit_problem_load_string(const char* json_text, pmpkit_problem** out) {
  if (json_text == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = new pmpkit_problem{Problem::load_json(json_text)}; });
}

void pmpkit_problem_free(pmpkit_problem* problem) { delete problem; }

int pmpkit_problem_state_dim(const pmpkit_problem* problem) {
  return problem == nullptr ? 0 : problem->value.n;
}
int pmpkit_problem_control_dim(const pmpkit_problem* problem) {
  return problem == nullptr ? 0 : problem->value.m;
}
int pmpkit_problem_constraint_count(const pmpkit_problem* problem) {
  return problem == nullptr ? 0 : problem->value.j;
}
double pmpkit_problem_horizon(const pmpkit_problem* problem) {
  return problem == nullptr ? 0.0 : problem->value.T;
}

/* --- controls ------------------------------------------------------------ */

pmpkit_status pmpkit_control_load_file(const char* path, pmpkit_control** out) {
  if (path == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = new pmpkit_control{control_from_csv(read_text_file(path))}; });
}

pmpkit_status pmpkit_control_constant(const pmpkit_problem* problem, size_t cells,
                                      const double* value, pmpkit_control** out) {
  if (problem == nullptr || value == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(value, problem->value.m);
    *out = new pmpkit_control{
        ControlSignal::constant(uniform_grid(problem->value, cells), v)};
  });
}

pmpkit_status pmpkit_control_save_file(const pmpkit_control* control, const char* path) {
  if (control == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] { write_text_file_atomic(path, control_to_csv(control->value)); });
}

void pmpkit_control_free(pmpkit_control* control) { delete control; }

/* --- simulate ------------------------------------------------------------ */

pmpkit_status pmpkit_simulate(const pmpkit_problem* problem, const pmpkit_control* control,
                              size_t cells, pmpkit_trajectory** out) {
  if (problem == nullptr || control == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    const TimeGrid grid = uniform_grid(problem->value, cells).merged_with(control->value.grid());
    *out = new pmpkit_trajectory{solve_forward(problem->value, control->value, grid)};
  });
}

pmpkit_status pmpkit_trajectory_save_file(const pmpkit_trajectory* trajectory, const char* path) {
  if (trajectory == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] { write_text_file_atomic(path, trajectory_to_csv(trajectory->value)); });
}

void pmpkit_trajectory_free(pmpkit_trajectory* trajectory) { delete trajectory; }

/* --- measures ------------------------------------------------------------ */

pmpkit_status pmpkit_measures_load_files(const char* const* paths, size_t count,
                                         pmpkit_measures** out) {
  if (paths == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    std::vector<NbvMeasure> measures;
    measures.reserve(count);
    for (size_t i = 0; i < count; ++i)
      measures.push_back(measure_from_csv(read_text_file(paths[i])));
    *out = new pmpkit_measures{std::move(measures)};
  });
}

pmpkit_status pmpkit_measures_save_file(const pmpkit_measures* measures, size_t index,
                                        const char* path) {
  if (measures == nullptr || path == nullptr) return invalid("null argument");
  if (index >= measures->value.size()) return invalid("measure index out of range");
  return guarded([&] { write_text_file_atomic(path, measure_to_csv(measures->value[index])); });
}

size_t pmpkit_measures_count(const pmpkit_measures* measures) {
  return measures == nullptr ? 0 : measures->value.size();
}

void pmpkit_measures_free(pmpkit_measures* measures) { delete measures; }

/* --- adjoint --------------------------------------------------------------*/

pmpkit_status pmpkit_adjoint(const pmpkit_problem* problem, const pmpkit_control* control,
                             double psi, const pmpkit_measures* measures_or_null, size_t cells,
                             pmpkit_bvpath** out) {
  if (problem == nullptr || control == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    TimeGrid grid = uniform_grid(problem->value, cells).merged_with(control->value.grid());
    Candidate candidate{control->value, psi,
                        measures_or_zero(problem->value, measures_or_null, grid)};
    for (const auto& eta : candidate.etas) grid = grid.merged_with(eta.grid());
    const Trajectory q = solve_forward(problem->value, candidate.u, grid);
    *out = new pmpkit_bvpath{assemble_adjoint(problem->value, candidate, q, grid)};
  });
}

pmpkit_status pmpkit_bvpath_save_file(const pmpkit_bvpath* path, const char* file_path) {
  if (path == nullptr || file_path == nullptr) return invalid("null argument");
  return guarded([&] { write_text_file_atomic(file_path, bvpath_to_csv(path->value)); });
}

void pmpkit_bvpath_free(pmpkit_bvpath* path) { delete path; }

/* --- certificate check ----------------------------------------------------*/

void pmpkit_check_options_init(pmpkit_check_options* options) {
  if (options == nullptr) return;
  const CheckTolerances defaults;
  options->feasibility = defaults.feasibility;
  options->hamiltonian_sup = defaults.hamiltonian_sup;
  options->slackness = defaults.slackness;
  options->transversality = defaults.transversality;
  options->nontriviality_floor = defaults.nontriviality_floor;
}

pmpkit_status pmpkit_check(const pmpkit_problem* problem, const pmpkit_control* control,
                           double psi, const pmpkit_measures* measures_or_null, size_t cells,
                           const pmpkit_check_options* options_or_null, pmpkit_certificate** out) {
  if (problem == nullptr || control == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    const TimeGrid grid = uniform_grid(problem->value, cells);
    CheckTolerances tolerances;
    if (options_or_null != nullptr) {
      tolerances.feasibility = options_or_null->feasibility;
      tolerances.hamiltonian_sup = options_or_null->hamiltonian_sup;
      tolerances.slackness = options_or_null->slackness;
      tolerances.transversality = options_or_null->transversality;
      tolerances.nontriviality_floor = options_or_null->nontriviality_floor;
    }
    Candidate candidate{control->value, psi,
                        measures_or_zero(problem->value, measures_or_null, grid)};
    *out = new pmpkit_certificate{
        check_certificate(problem->value, candidate, grid, tolerances)};
  });
}

int pmpkit_certificate_passed(const pmpkit_certificate* certificate) {
  return certificate != nullptr && certificate->value.verdict == Verdict::Pass ? 1 : 0;
}

pmpkit_status pmpkit_certificate_report(const pmpkit_certificate* certificate, int structured,
                                        char** out) {
  if (certificate == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    const std::string text = emit_report(
        certificate->value, structured != 0 ? ReportFormat::Structured : ReportFormat::Text);
    char* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *out = buffer;
  });
}

pmpkit_status pmpkit_certificate_save_report(const pmpkit_certificate* certificate, int structured,
                                             const char* path) {
  if (certificate == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] {
    write_text_file_atomic(path, emit_report(certificate->value, structured != 0
                                                 ? ReportFormat::Structured
                                                 : ReportFormat::Text));
  });
}

void pmpkit_certificate_free(pmpkit_certificate* certificate) { delete certificate; }

/* --- descent solver -------------------------------------------------------*/

void pmpkit_solve_options_init(pmpkit_solve_options* options) {
  if (options == nullptr) return;
  options->budget = 500;
  options->eps_initial = 0.5;
  options->eps_levels = 4;
  options->rho_ladder = nullptr;
  options->rho_count = 0;
}

pmpkit_status pmpkit_solve(const pmpkit_problem* problem, const pmpkit_control* initial_or_null,
                           size_t cells, const pmpkit_solve_options* options_or_null,
                           pmpkit_solve_result** out) {
  if (problem == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    const TimeGrid grid = uniform_grid(problem->value, cells);
    DescentOptions options;
    if (options_or_null != nullptr) {
      options.budget = options_or_null->budget;
      options.eps_schedule.clear();
      double eps = options_or_null->eps_initial;
      for (int level = 0; level < options_or_null->eps_levels; ++level) {
        options.eps_schedule.push_back(eps);
        eps *= 0.25;
      }
      if (options_or_null->rho_count > 0)
        options.rho_ladder.assign(options_or_null->rho_ladder,
                                  options_or_null->rho_ladder + options_or_null->rho_count);
    }
    ControlSignal u0 = initial_or_null != nullptr
                           ? initial_or_null->value
                           : ControlSignal::constant(
                                 grid, problem->value.omega.corner_and_center_points().back());
    PenaltyState state = ekeland_descend(problem->value, u0, {}, grid, options);
    auto [psi, etas] = extract_multipliers(problem->value, state, grid);
    const TimeGrid solve_grid = grid.merged_with(state.u.grid());
    const Trajectory q = solve_forward(problem->value, state.u, solve_grid);
    const double cost = problem->value.terminal_cost(q.state(solve_grid.node_count() - 1));
    *out = new pmpkit_solve_result{problem->value, std::move(state), psi, std::move(etas), cost};
  });
}

pmpkit_status pmpkit_solve_result_control(const pmpkit_solve_result* result,
                                          pmpkit_control** out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = new pmpkit_control{result->state.u}; });
}

pmpkit_status pmpkit_solve_result_measures(const pmpkit_solve_result* result,
                                           pmpkit_measures** out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = new pmpkit_measures{result->etas}; });
}

double pmpkit_solve_result_psi(const pmpkit_solve_result* result) {
  return result == nullptr ? 0.0 : result->psi;
}

double pmpkit_solve_result_cost(const pmpkit_solve_result* result) {
  return result == nullptr ? 0.0 : result->cost;
}

int pmpkit_solve_result_budget_exhausted(const pmpkit_solve_result* result) {
  return result != nullptr && result->state.budget_exhausted ? 1 : 0;
}

pmpkit_status pmpkit_solve_result_save_history(const pmpkit_solve_result* result,
                                               const char* path) {
  if (result == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] { write_text_file_atomic(path, history_to_csv(result->state.history)); });
}

void pmpkit_solve_result_free(pmpkit_solve_result* result) { delete result; }

/* --- probe ----------------------------------------------------------------*/

pmpkit_status pmpkit_probe(const pmpkit_problem* problem, const pmpkit_control* control,
                           const pmpkit_control* control_prime, const double* rhos,
                           size_t rho_count, size_t cells, pmpkit_probe_table** out) {
  if (problem == nullptr || control == nullptr || control_prime == nullptr || rhos == nullptr ||
      out == nullptr)
    return invalid("null argument");
  if (rho_count == 0) return invalid("need at least one rho");
  return guarded([&] {
    const TimeGrid grid = uniform_grid(problem->value, cells);
    const std::vector<double> ladder(rhos, rhos + rho_count);
    *out = new pmpkit_probe_table{
        differentiability_probe(problem->value, control->value, control_prime->value, ladder, grid)};
  });
}

pmpkit_status pmpkit_probe_save_file(const pmpkit_probe_table* table, const char* path) {
  if (table == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] { write_text_file_atomic(path, probe_to_csv(table->value)); });
}

void pmpkit_probe_table_free(pmpkit_probe_table* table) { delete table; }

}  // extern "C"
