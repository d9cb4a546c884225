#include "ccnls/system.hpp"

#include <cmath>

namespace ccnls {

namespace {
bool near(double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(std::abs(a), std::abs(b)); }
}  // namespace

void SystemParams::validate() const {
  for (double c : {alpha, beta, gamma})
    if (!std::isfinite(c)) throw ParameterError("system: coefficients must be finite");
  if (alpha == 0.0 || beta == 0.0 || gamma == 0.0)
    throw ParameterError("system: alpha, beta, gamma must all be nonzero");
  if (!(K > 0.0)) throw ParameterError("system: truncation K must be positive (or infinite)");
  if (d != 1 && d != 2) throw ParameterError("system: d must be 1 or 2");
}

double SystemParams::effective_K(const Grid& g, bool dealias) const {
  return dealias ? std::min(K, g.dealias_cutoff()) : K;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Iteration: return "Iteration";
    case Regime::ShortTime: return "ShortTime";
    case Regime::IllPosedLine: return "IllPosedLine";
    case Regime::Degenerate: return "Degenerate";
  }
  return "?";
}

ResonanceReport resonance_quantities(const SystemParams& p) {
  p.validate();
  const double a = p.alpha, b = p.beta, c = p.gamma;
  ResonanceReport r;
  r.kappa_tilde = (a - c) * (b + c);
  r.kappa = (a - b) * (a - c) * (b + c);
  r.mu = a * b * c * (1.0 / a - 1.0 / b - 1.0 / c);
  r.b = b / c - 1.0;
  bool a_eq_c = near(a, c);
  bool line = near(b, -c);
  if (line) {
    r.regime = Regime::IllPosedLine;
    r.flagged = a_eq_c;
    r.kappa_tilde = 0.0;
    r.kappa = 0.0;
    r.b = -2.0;
  } else if (a_eq_c) {
    r.regime = Regime::ShortTime;
    r.kappa_tilde = 0.0;
    r.kappa = 0.0;
  } else {
    r.regime = Regime::Iteration;
  }
  return r;
}

nlohmann::json to_json(const SystemParams& p) {
  nlohmann::json j{{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"d", p.d}};
  if (std::isinf(p.K))
    j["K"] = "inf";
  else
    j["K"] = p.K;
  return j;
}

SystemParams params_from_json(const nlohmann::json& j) {
  SystemParams p;
  p.alpha = j.value("alpha", p.alpha);
  p.beta = j.value("beta", p.beta);
  p.gamma = j.value("gamma", p.gamma);
  p.d = j.value("d", p.d);
  if (j.contains("K")) {
    const auto& k = j.at("K");
    if (k.is_string()) {
      if (k.get<std::string>() != "inf") throw ParameterError("system: K must be a number or \"inf\"");
      p.K = kInf;
    } else {
      p.K = k.get<double>();
    }
  }
  p.validate();
  return p;
}

nlohmann::json to_json(const ResonanceReport& r) {
  nlohmann::json j{{"kappa_tilde", r.kappa_tilde}, {"kappa", r.kappa}, {"mu", r.mu},
                   {"regime", regime_name(r.regime)}, {"flagged", r.flagged}};
  j["b"] = r.b ? nlohmann::json(*r.b) : nlohmann::json(nullptr);
  return j;
}

}  // namespace ccnls
