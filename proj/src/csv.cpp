#include "pmpkit/csv.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pmpkit/errors.hpp"

namespace pmpkit {
namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table parse_table(const std::string& text, const char* what) {
  Table table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = fields;
      first = false;
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& field : fields) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size())
        throw Error(ErrorCode::IoError, std::string(what) + ": malformed number '" + field +
                                            "' on line " + std::to_string(line_no));
      row.push_back(v);
    }
    if (row.size() != table.header.size())
      throw Error(ErrorCode::IoError, std::string(what) + ": ragged row on line " +
                                          std::to_string(line_no));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty() || table.rows.size() < 2)
    throw Error(ErrorCode::IoError, std::string(what) + ": needs a header and at least two rows");
  return table;
}

TimeGrid grid_from_rows(const Table& table, const char* what) {
  std::vector<double> nodes;
  nodes.reserve(table.rows.size());
  for (const auto& row : table.rows) nodes.push_back(row[0]);
  try {
    return TimeGrid(std::move(nodes));
  } catch (const Error& e) {
    throw Error(ErrorCode::IoError, std::string(what) + ": bad time column: " + e.what());
  }
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& trajectory) {
  std::string out = "t";
  for (int i = 1; i <= trajectory.dim(); ++i) out += ",q" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < trajectory.grid().node_count(); ++k) {
    append_number(out, trajectory.grid().node(k));
    for (int i = 0; i < trajectory.dim(); ++i) {
      out += ',';
      append_number(out, trajectory.state(k)[i]);
    }
    out += '\n';
  }
  return out;
}

Trajectory trajectory_from_csv(const std::string& text) {
  const Table table = parse_table(text, "trajectory csv");
  TimeGrid grid = grid_from_rows(table, "trajectory csv");
  const std::size_t dim = table.header.size() - 1;
  std::vector<Eigen::VectorXd> states;
  states.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Eigen::VectorXd q(dim);
    for (std::size_t i = 0; i < dim; ++i) q[static_cast<Eigen::Index>(i)] = row[i + 1];
    states.push_back(std::move(q));
  }
  return Trajectory(std::move(grid), std::move(states));
}

std::string control_to_csv(const ControlSignal& control) {
  std::string out = "t";
  for (int i = 1; i <= control.dim(); ++i) out += ",u" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k <= control.grid().cell_count(); ++k) {
    const std::size_t cell = k < control.grid().cell_count() ? k : k - 1;
    append_number(out, control.grid().node(k));
    for (int i = 0; i < control.dim(); ++i) {
      out += ',';
      append_number(out, control.cell_value(cell)[i]);
    }
    out += '\n';
  }
  return out;
}

ControlSignal control_from_csv(const std::string& text) {
  const Table table = parse_table(text, "control csv");
  TimeGrid grid = grid_from_rows(table, "control csv");
  const std::size_t dim = table.header.size() - 1;
  std::vector<Eigen::VectorXd> values;
  values.reserve(table.rows.size() - 1);
  for (std::size_t k = 0; k + 1 < table.rows.size(); ++k) {
    Eigen::VectorXd u(dim);
    for (std::size_t i = 0; i < dim; ++i) u[static_cast<Eigen::Index>(i)] = table.rows[k][i + 1];
    values.push_back(std::move(u));
  }
  return ControlSignal(std::move(grid), std::move(values));
}

std::string bvpath_to_csv(const BvPath& path) {
  std::string out = "t";
  for (int i = 1; i <= path.dim(); ++i) out += ",p" + std::to_string(i) + "_left";
  for (int i = 1; i <= path.dim(); ++i) out += ",p" + std::to_string(i) + "_right";
  out += '\n';
  for (std::size_t k = 0; k < path.grid().node_count(); ++k) {
    append_number(out, path.grid().node(k));
    for (int i = 0; i < path.dim(); ++i) {
      out += ',';
      append_number(out, path.left(k)[i]);
    }
    for (int i = 0; i < path.dim(); ++i) {
      out += ',';
      append_number(out, path.right(k)[i]);
    }
    out += '\n';
  }
  return out;
}

BvPath bvpath_from_csv(const std::string& text) {
  const Table table = parse_table(text, "bv path csv");
  if ((table.header.size() - 1) % 2 != 0)
    throw Error(ErrorCode::IoError, "bv path csv: expected left and right columns");
  const std::size_t dim = (table.header.size() - 1) / 2;
  TimeGrid grid = grid_from_rows(table, "bv path csv");
  std::vector<Eigen::VectorXd> left, right;
  left.reserve(table.rows.size());
  right.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Eigen::VectorXd l(dim), r(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      l[static_cast<Eigen::Index>(i)] = row[1 + i];
      r[static_cast<Eigen::Index>(i)] = row[1 + dim + i];
    }
    left.push_back(std::move(l));
    right.push_back(std::move(r));
  }
  return BvPath(std::move(grid), std::move(left), std::move(right));
}

std::string measure_to_csv(const NbvMeasure& measure) {
  std::string out = "t,atom,density\n";
  for (std::size_t k = 0; k < measure.grid().node_count(); ++k) {
    append_number(out, measure.grid().node(k));
    out += ',';
    append_number(out, measure.atoms()[k]);
    out += ',';
    append_number(out, k < measure.grid().cell_count() ? measure.densities()[k] : 0.0);
    out += '\n';
  }
  return out;
}

NbvMeasure measure_from_csv(const std::string& text) {
  const Table table = parse_table(text, "measure csv");
  if (table.header.size() != 3)
    throw Error(ErrorCode::IoError, "measure csv: expected columns t,atom,density");
  TimeGrid grid = grid_from_rows(table, "measure csv");
  std::vector<double> atoms, densities;
  atoms.reserve(table.rows.size());
  densities.reserve(table.rows.size() - 1);
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    atoms.push_back(table.rows[k][1]);
    if (k + 1 < table.rows.size()) densities.push_back(table.rows[k][2]);
  }
  return NbvMeasure(std::move(grid), std::move(atoms), std::move(densities));
}

std::string probe_to_csv(const std::vector<std::pair<double, double>>& table) {
  std::string out = "rho,err\n";
  for (const auto& [rho, err] : table) {
    append_number(out, rho);
    out += ',';
    append_number(out, err);
    out += '\n';
  }
  return out;
}

std::string history_to_csv(const std::vector<HistoryRow>& history) {
  std::string out = "iter,J,eps,feasibility,cost\n";
  for (const auto& row : history) {
    out += std::to_string(row.iteration);
    out += ',';
    append_number(out, row.j_value);
    out += ',';
    append_number(out, row.eps);
    out += ',';
    append_number(out, row.feasibility);
    out += ',';
    append_number(out, row.cost);
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp + "'");
    out << content;
    if (!out.good()) throw Error(ErrorCode::IoError, "short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::IoError, "cannot rename into '" + path + "': " + ec.message());
  }
}

}  // namespace pmpkit
