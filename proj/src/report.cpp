#include "pmpkit/report.hpp"

#include <cstdio>
#include <json.hpp>

namespace pmpkit {
namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Error: return "ERROR";
  }
  return "ERROR";
}

}  // namespace

std::string emit_report(const Certificate& certificate, ReportFormat format) {
  if (format == ReportFormat::Text) {
    std::string out;
    out += "certificate: ";
    out += verdict_name(certificate.verdict);
    out += '\n';
    if (certificate.verdict == Verdict::Error) {
      out += "  error: " + certificate.error_message + '\n';
      return out;
    }
    char line[160];
    for (const auto& condition : certificate.conditions) {
      std::snprintf(line, sizeof(line), "  %-18s residual %s  tol %s  %s\n",
                    condition.name.c_str(), format_number(condition.residual).c_str(),
                    format_number(condition.tolerance).c_str(),
                    condition.pass ? "PASS" : "FAIL");
      out += line;
    }
    std::snprintf(line, sizeof(line), "  psi %s\n", format_number(certificate.psi).c_str());
    out += line;
    std::snprintf(line, sizeof(line), "  nontriviality %s\n",
                  format_number(certificate.nontriviality).c_str());
    out += line;
    std::snprintf(line, sizeof(line), "  hamiltonian_l1 %s\n",
                  format_number(certificate.hamiltonian_l1).c_str());
    out += line;
    std::snprintf(line, sizeof(line), "  monotone_multipliers %s\n",
                  certificate.monotone_multipliers ? "yes" : "no");
    out += line;
    return out;
  }

  nlohmann::ordered_json doc;
  doc["verdict"] = verdict_name(certificate.verdict);
  if (certificate.verdict == Verdict::Error) {
    doc["error"] = certificate.error_message;
  } else {
    nlohmann::ordered_json conditions = nlohmann::ordered_json::array();
    for (const auto& condition : certificate.conditions) {
      nlohmann::ordered_json entry;
      entry["name"] = condition.name;
      entry["residual"] = condition.residual;
      entry["tolerance"] = condition.tolerance;
      entry["pass"] = condition.pass;
      conditions.push_back(std::move(entry));
    }
    doc["conditions"] = std::move(conditions);
    doc["psi"] = certificate.psi;
    doc["nontriviality"] = certificate.nontriviality;
    doc["hamiltonian_l1"] = certificate.hamiltonian_l1;
    doc["monotone_multipliers"] = certificate.monotone_multipliers;
  }
  return doc.dump(2) + "\n";
}

}  // namespace pmpkit
