#include <numbers>

#include "nomamec/conic.hpp"

namespace nomamec::conic {

void encode_perspective_pow2(ConicProgram& program, const LinearExpr& x, const LinearExpr& y,
                             VarId t) {
  if (!y.is_constant()) program.add_leq(LinearExpr(1e-12), y);
  program.add_exp(x * std::numbers::ln2, y, t);
}

void encode_lmi2x2(ConicProgram& program, const LinearExpr& z, const LinearExpr& tau,
                   const LinearExpr& u) {
  if (!z.is_constant()) program.add_leq(LinearExpr(0.0), z);
  if (!tau.is_constant()) program.add_leq(LinearExpr(0.0), tau);
  program.add_soc(z + tau, {2.0 * u, z - tau});
}

void encode_pow2_epigraph(ConicProgram& program, const LinearExpr& z, VarId w) {
  program.add_exp(z * std::numbers::ln2, LinearExpr(1.0), w);
}

}  // namespace nomamec::conic
