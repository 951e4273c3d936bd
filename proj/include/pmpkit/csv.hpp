#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pmpkit/bv.hpp"
#include "pmpkit/ekeland.hpp"
#include "pmpkit/ode.hpp"

namespace pmpkit {

// CSV schemas (all values printed with 17 significant digits, byte-stable):
//   trajectory:  t,q1..qn              one row per node
//   control:     t,u1..um              one row per cell start plus a closing
//                                      row at t = T repeating the last value
//   bv path:     t,p1_left..pn_left,p1_right..pn_right
//   measure:     t,atom,density        density applies to the cell starting
//                                      at t; the last row's density is 0
//   probe:       rho,err
//   history:     iter,J,eps,feasibility,cost

std::string trajectory_to_csv(const Trajectory& trajectory);
Trajectory trajectory_from_csv(const std::string& text);

std::string control_to_csv(const ControlSignal& control);
ControlSignal control_from_csv(const std::string& text);

std::string bvpath_to_csv(const BvPath& path);
BvPath bvpath_from_csv(const std::string& text);

std::string measure_to_csv(const NbvMeasure& measure);
NbvMeasure measure_from_csv(const std::string& text);

std::string probe_to_csv(const std::vector<std::pair<double, double>>& table);
std::string history_to_csv(const std::vector<HistoryRow>& history);

std::string read_text_file(const std::string& path);
/// Write-to-temp then rename: no partial files are left behind on error.
void write_text_file_atomic(const std::string& path, const std::string& content);

}  // namespace pmpkit
