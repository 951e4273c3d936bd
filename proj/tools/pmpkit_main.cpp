// pmpkit command line front end. Talks to the toolkit exclusively through the
// C interface in pmpkit.h.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "pmpkit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitSolverError = 2;
constexpr int kExitCertificateFail = 3;

int exit_code_for(pmpkit_status status) {
  switch (status) {
    case PMPKIT_OK:
      return kExitOk;
    case PMPKIT_ERR_SOLVER:
      return kExitSolverError;
    default:
      return kExitConfigError;
  }
}

[[nodiscard]] int report_failure(pmpkit_status status) {
  std::fprintf(stderr, "pmpkit: %s\n", pmpkit_last_error());
  return exit_code_for(status);
}

struct ProblemHandle {
  pmpkit_problem* ptr = nullptr;
  ~ProblemHandle() { pmpkit_problem_free(ptr); }
};
struct ControlHandle {
  pmpkit_control* ptr = nullptr;
  ~ControlHandle() { pmpkit_control_free(ptr); }
};
struct MeasuresHandle {
  pmpkit_measures* ptr = nullptr;
  ~MeasuresHandle() { pmpkit_measures_free(ptr); }
};

std::string output_path(const std::string& out_dir, const std::string& name) {
  return (std::filesystem::path(out_dir) / name).string();
}

std::string resolve_out_dir(std::string out_dir) {
  if (out_dir.empty()) {
    if (const char* env = std::getenv("PMPKIT_OUT")) out_dir = env;
  }
  if (out_dir.empty()) out_dir = ".";
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  return out_dir;
}

int load_measures(const std::vector<std::string>& eta_paths, int expected,
                  MeasuresHandle& measures) {
  if (eta_paths.empty()) return kExitOk;
  if (static_cast<int>(eta_paths.size()) != expected) {
    std::fprintf(stderr, "pmpkit: expected %d --eta files (one per constraint), got %zu\n",
                 expected, eta_paths.size());
    return kExitConfigError;
  }
  std::vector<const char*> raw;
  raw.reserve(eta_paths.size());
  for (const auto& path : eta_paths) raw.push_back(path.c_str());
  const pmpkit_status status =
      pmpkit_measures_load_files(raw.data(), raw.size(), &measures.ptr);
  if (status != PMPKIT_OK) return report_failure(status);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Necessary-condition toolkit for state-constrained optimal control"};
  app.require_subcommand(1);

  std::string problem_path;
  std::string control_path;
  std::string control_prime_path;
  std::vector<std::string> eta_paths;
  std::string out_dir;
  std::string report_format = "text";
  std::size_t grid_cells = 200;
  double psi = 1.0;
  double tol_feasibility = -1.0, tol_hamiltonian = -1.0, tol_slackness = -1.0;
  double tol_transversality = -1.0, tol_nontriviality = -1.0;
  int budget = 500;
  double eps_initial = 0.5;
  std::vector<double> rhos{0.2, 0.1, 0.05, 0.025};

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--problem", problem_path, "problem config (JSON)")->required();
    cmd->add_option("--grid", grid_cells, "number of grid cells")->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_dir, "output directory (default: $PMPKIT_OUT or .)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "forward solve, trajectory CSV");
  add_common(simulate);
  simulate->add_option("--control", control_path, "control CSV")->required();

  CLI::App* adjoint = app.add_subcommand("adjoint", "assemble the adjoint, BV path CSV");
  add_common(adjoint);
  adjoint->add_option("--control", control_path, "control CSV")->required();
  adjoint->add_option("--psi", psi, "cost multiplier (>= 0)");
  adjoint->add_option("--eta", eta_paths, "measure CSV, one per constraint");

  CLI::App* check = app.add_subcommand("check", "verify the necessary conditions");
  add_common(check);
  check->add_option("--control", control_path, "candidate control CSV")->required();
  check->add_option("--psi", psi, "cost multiplier (>= 0)");
  check->add_option("--eta", eta_paths, "measure CSV, one per constraint");
  check->add_option("--report-format", report_format, "text|json");
  check->add_option("--tol-feasibility", tol_feasibility, "feasibility tolerance");
  check->add_option("--tol-hamiltonian", tol_hamiltonian, "Hamiltonian sup tolerance");
  check->add_option("--tol-slackness", tol_slackness, "slackness tolerance");
  check->add_option("--tol-transversality", tol_transversality, "transversality tolerance");
  check->add_option("--tol-nontriviality", tol_nontriviality, "nontriviality floor");

  CLI::App* solve = app.add_subcommand("solve", "experimental penalization descent");
  add_common(solve);
  solve->add_option("--control", control_path, "initial control CSV (default: Omega midpoint)");
  solve->add_option("--budget", budget, "accepted-move budget");
  solve->add_option("--eps", eps_initial, "initial penalization offset");
  solve->add_option("--report-format", report_format, "text|json");

  CLI::App* probe = app.add_subcommand("probe", "spike-variation differentiability probe");
  add_common(probe);
  probe->add_option("--control", control_path, "base control CSV")->required();
  probe->add_option("--control-prime", control_prime_path, "perturbation control CSV")->required();
  probe->add_option("--rhos", rhos, "rho ladder");

  CLI11_PARSE(app, argc, argv);

  ProblemHandle problem;
  if (pmpkit_status s = pmpkit_problem_load_file(problem_path.c_str(), &problem.ptr);
      s != PMPKIT_OK)
    return report_failure(s);

  out_dir = resolve_out_dir(out_dir);

  ControlHandle control;
  if (!control_path.empty()) {
    if (pmpkit_status s = pmpkit_control_load_file(control_path.c_str(), &control.ptr);
        s != PMPKIT_OK)
      return report_failure(s);
  }

  if (simulate->parsed()) {
    pmpkit_trajectory* trajectory = nullptr;
    if (pmpkit_status s = pmpkit_simulate(problem.ptr, control.ptr, grid_cells, &trajectory);
        s != PMPKIT_OK)
      return report_failure(s);
    const pmpkit_status s =
        pmpkit_trajectory_save_file(trajectory, output_path(out_dir, "trajectory.csv").c_str());
    pmpkit_trajectory_free(trajectory);
    if (s != PMPKIT_OK) return report_failure(s);
    return kExitOk;
  }

  if (adjoint->parsed()) {
    MeasuresHandle measures;
    if (int code = load_measures(eta_paths, pmpkit_problem_constraint_count(problem.ptr), measures);
        code != kExitOk)
      return code;
    pmpkit_bvpath* path = nullptr;
    if (pmpkit_status s =
            pmpkit_adjoint(problem.ptr, control.ptr, psi, measures.ptr, grid_cells, &path);
        s != PMPKIT_OK)
      return report_failure(s);
    const pmpkit_status s =
        pmpkit_bvpath_save_file(path, output_path(out_dir, "adjoint.csv").c_str());
    pmpkit_bvpath_free(path);
    if (s != PMPKIT_OK) return report_failure(s);
    return kExitOk;
  }

  if (check->parsed()) {
    MeasuresHandle measures;
    if (int code = load_measures(eta_paths, pmpkit_problem_constraint_count(problem.ptr), measures);
        code != kExitOk)
      return code;
    pmpkit_check_options options;
    pmpkit_check_options_init(&options);
    if (tol_feasibility > 0.0) options.feasibility = tol_feasibility;
    if (tol_hamiltonian > 0.0) options.hamiltonian_sup = tol_hamiltonian;
    if (tol_slackness > 0.0) options.slackness = tol_slackness;
    if (tol_transversality > 0.0) options.transversality = tol_transversality;
    if (tol_nontriviality > 0.0) options.nontriviality_floor = tol_nontriviality;

    pmpkit_certificate* certificate = nullptr;
    if (pmpkit_status s = pmpkit_check(problem.ptr, control.ptr, psi, measures.ptr, grid_cells,
                                       &options, &certificate);
        s != PMPKIT_OK)
      return report_failure(s);

    const int structured = report_format == "json" ? 1 : 0;
    char* text = nullptr;
    pmpkit_status s = pmpkit_certificate_report(certificate, structured, &text);
    if (s == PMPKIT_OK) {
      std::fputs(text, stdout);
      pmpkit_string_free(text);
      s = pmpkit_certificate_save_report(
          certificate, structured,
          output_path(out_dir, structured ? "report.json" : "report.txt").c_str());
    }
    const bool passed = pmpkit_certificate_passed(certificate) != 0;
    pmpkit_certificate_free(certificate);
    if (s != PMPKIT_OK) return report_failure(s);
    return passed ? kExitOk : kExitCertificateFail;
  }

  if (solve->parsed()) {
    pmpkit_solve_options options;
    pmpkit_solve_options_init(&options);
    options.budget = budget;
    options.eps_initial = eps_initial;

    pmpkit_solve_result* result = nullptr;
    if (pmpkit_status s = pmpkit_solve(problem.ptr, control.ptr, grid_cells, &options, &result);
        s != PMPKIT_OK)
      return report_failure(s);

    pmpkit_control* best = nullptr;
    pmpkit_measures* measures = nullptr;
    pmpkit_status s = pmpkit_solve_result_control(result, &best);
    if (s == PMPKIT_OK)
      s = pmpkit_control_save_file(best, output_path(out_dir, "control.csv").c_str());
    if (s == PMPKIT_OK) s = pmpkit_solve_result_measures(result, &measures);
    if (s == PMPKIT_OK) {
      const size_t count = pmpkit_measures_count(measures);
      for (size_t i = 0; i < count && s == PMPKIT_OK; ++i)
        s = pmpkit_measures_save_file(
            measures, i, output_path(out_dir, "eta_" + std::to_string(i + 1) + ".csv").c_str());
    }
    if (s == PMPKIT_OK)
      s = pmpkit_solve_result_save_history(result, output_path(out_dir, "history.csv").c_str());

    int exit_code = kExitOk;
    if (s == PMPKIT_OK) {
      // Auto-check the extracted candidate and report.
      pmpkit_certificate* certificate = nullptr;
      s = pmpkit_check(problem.ptr, best, pmpkit_solve_result_psi(result), measures, grid_cells,
                       nullptr, &certificate);
      if (s == PMPKIT_OK) {
        const int structured = report_format == "json" ? 1 : 0;
        char* text = nullptr;
        if (pmpkit_certificate_report(certificate, structured, &text) == PMPKIT_OK) {
          std::fputs(text, stdout);
          pmpkit_string_free(text);
        }
        s = pmpkit_certificate_save_report(
            certificate, structured,
            output_path(out_dir, structured ? "report.json" : "report.txt").c_str());
        if (pmpkit_certificate_passed(certificate) == 0) exit_code = kExitCertificateFail;
        pmpkit_certificate_free(certificate);
      }
    }
    pmpkit_control_free(best);
    pmpkit_measures_free(measures);
    pmpkit_solve_result_free(result);
    if (s != PMPKIT_OK) return report_failure(s);
    return exit_code;
  }

  if (probe->parsed()) {
    ControlHandle control_prime;
    if (pmpkit_status s =
            pmpkit_control_load_file(control_prime_path.c_str(), &control_prime.ptr);
        s != PMPKIT_OK)
      return report_failure(s);
    pmpkit_probe_table* table = nullptr;
    if (pmpkit_status s = pmpkit_probe(problem.ptr, control.ptr, control_prime.ptr, rhos.data(),
                                       rhos.size(), grid_cells, &table);
        s != PMPKIT_OK)
      return report_failure(s);
    const pmpkit_status s =
        pmpkit_probe_save_file(table, output_path(out_dir, "probe.csv").c_str());
    pmpkit_probe_table_free(table);
    if (s != PMPKIT_OK) return report_failure(s);
    return kExitOk;
  }

  return kExitConfigError;
}
