#include <algorithm>
#include <cmath>
#include <numbers>

#include "nomamec/patacra.hpp"

namespace nomamec {

double pow2m1(double x) { return std::expm1(x * std::numbers::ln2); }

DerivedCoefficients derive_coefficients(double gain_h, double gain_s) {
  DerivedCoefficients c;
  c.o = decoding_indicator(gain_h, gain_s);
  c.a1 = (1 - 2 * c.o) * (1.0 / gain_s - 1.0 / gain_h);
  c.a2 = (1 - c.o) / gain_h + c.o / gain_s;
  if (c.a1 < 0.0) throw ModelError("negative power coefficient");
  return c;
}

DerivedCoefficients derive_coefficients(const UeLink& link) {
  if (!link.has_helper()) {
    DerivedCoefficients c;
    c.o = 0;
    c.a1 = 1.0 / link.gain_s;
    c.a2 = 0.0;
    return c;
  }
  return derive_coefficients(link.gain_h, link.gain_s);
}

std::pair<double, double> recover_powers(double tau, double eta_h, double eta_s,
                                         const DerivedCoefficients& coeffs, const TaskSpec& task,
                                         double bandwidth_hz) {
  if (eta_h + eta_s <= 0.0 || task.data_bits <= 0.0) return {0.0, 0.0};
  if (!(tau > 0.0)) throw ModelError("recover_powers: non-positive transmission time");
  const double x = task.data_bits / (bandwidth_hz * tau);
  // Power of the stream decoded free of interference, then the remainder of
  // the total. With o = 1 the first one is the server stream.
  const double first = coeffs.a2 * pow2m1(coeffs.eta_o1(eta_h, eta_s) * x);
  const double total =
      coeffs.a1 * pow2m1(coeffs.eta_o2(eta_h, eta_s) * x) + coeffs.a2 * pow2m1((eta_h + eta_s) * x);
  const double second = std::max(total - first, 0.0);
  if (coeffs.a2 == 0.0) return {0.0, total};
  return coeffs.o == 0 ? std::pair{first, second} : std::pair{second, first};
}

std::pair<double, double> recover_powers(double tau, double eta_h, double eta_s,
                                         const DerivedCoefficients& coeffs, const TaskSpec& task,
                                         const ScenarioConfig& config) {
  return recover_powers(tau, eta_h, eta_s, coeffs, task, config.bandwidth_hz);
}

const char* to_string(PatacraStatus status) {
  switch (status) {
    case PatacraStatus::Converged: return "converged";
    case PatacraStatus::IterationLimit: return "iteration_limit";
    case PatacraStatus::Stalled: return "stalled";
    case PatacraStatus::Infeasible: return "infeasible";
    case PatacraStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

}  // namespace nomamec
