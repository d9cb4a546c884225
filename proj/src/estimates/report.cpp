#include <algorithm>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "ccnls/estimates.hpp"

namespace ccnls {

void EstimateReport::finalize() {
  std::map<double, double> sup;
  for (const auto& s : samples) {
    auto [it, fresh] = sup.emplace(s.scale, s.ratio);
    if (!fresh) it->second = std::max(it->second, s.ratio);
  }
  scales.clear();
  sup_ratio.clear();
  std::vector<double> x, y;
  for (auto [k, v] : sup) {
    scales.push_back(k);
    sup_ratio.push_back(v);
    if (k > 0.0 && v > 0.0) {
      x.push_back(k);
      y.push_back(v);
    }
  }
  fit.reset();
  if (x.size() >= 5)
    fit = rate_fit(x, y, 5);
  else if (!scales.empty())
    warnings.push_back(fmt::format("only {} positive scale points: no slope reported", x.size()));
}

std::string report_csv(const EstimateReport& r) {
  std::ostringstream os;
  os << "scale,member,ratio\n";
  for (const auto& s : r.samples) os << fmt::format("{:.17g},{},{:.17g}\n", s.scale, s.member, s.ratio);
  return os.str();
}

nlohmann::json report_summary(const EstimateReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["descriptors"] = r.descriptors;
  j["scales"] = r.scales;
  j["sup_ratio"] = r.sup_ratio;
  j["n_samples"] = r.samples.size();
  if (r.fit) {
    j["slope"] = r.fit->slope;
    j["ci"] = r.fit->ci95;
    j["residual"] = r.fit->residual;
    j["n_points"] = r.fit->x.size();
  } else {
    j["slope"] = nullptr;
    j["ci"] = nullptr;
    j["n_points"] = r.scales.size();
  }
  j["warnings"] = r.warnings;
  j["flags"] = r.flags;
  j["extra"] = r.extra;
  return j;
}

}  // namespace ccnls
