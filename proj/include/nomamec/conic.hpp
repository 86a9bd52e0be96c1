#pragma once

// Conic programs over the linear, second-order and exponential cones, and a
// log-barrier interior-point backend.
//
//   minimize   objective(x)
//   subject to eq_i(x)  = 0
//              ineq_j(x) <= 0
//              ||v(x)||_2 <= t(x)                    (second-order cones)
//              c(x) >= b(x) exp(a(x) / b(x)), b > 0  (exponential cones)
//
// All expressions are affine in the variables.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nomamec::conic {

struct VarId {
  std::size_t index = 0;
  friend bool operator==(VarId, VarId) = default;
};

class LinearExpr {
 public:
  LinearExpr() = default;
  LinearExpr(double constant) : constant_(constant) {}  // NOLINT(implicit)
  LinearExpr(VarId v) { terms_.emplace_back(v.index, 1.0); }  // NOLINT(implicit)

  static LinearExpr term(VarId v, double coefficient);

  const std::vector<std::pair<std::size_t, double>>& terms() const { return terms_; }
  double constant() const { return constant_; }
  bool is_constant() const;

  /// Merges duplicate variables and drops exact zeros.
  LinearExpr& canonicalize();

  double evaluate(const std::vector<double>& x) const;

  LinearExpr& operator+=(const LinearExpr& rhs);
  LinearExpr& operator-=(const LinearExpr& rhs);
  LinearExpr& operator*=(double s);

  friend LinearExpr operator+(LinearExpr lhs, const LinearExpr& rhs) { return lhs += rhs; }
  friend LinearExpr operator-(LinearExpr lhs, const LinearExpr& rhs) { return lhs -= rhs; }
  friend LinearExpr operator*(LinearExpr e, double s) { return e *= s; }
  friend LinearExpr operator*(double s, LinearExpr e) { return e *= s; }
  friend LinearExpr operator-(LinearExpr e) { return e *= -1.0; }

 private:
  std::vector<std::pair<std::size_t, double>> terms_;
  double constant_ = 0.0;
};

struct SocCone {
  LinearExpr t;
  std::vector<LinearExpr> v;
};

struct ExpCone {
  LinearExpr a, b, c;
};

class ConicProgram {
 public:
  VarId add_variable(std::string name = {});
  std::size_t num_variables() const { return names_.size(); }
  const std::string& name(VarId v) const { return names_.at(v.index); }

  void minimize(LinearExpr objective);
  /// expr == 0
  void add_equality(LinearExpr expr);
  /// expr <= 0
  void add_inequality(LinearExpr expr);
  /// lhs <= rhs
  void add_leq(const LinearExpr& lhs, const LinearExpr& rhs) { add_inequality(lhs - rhs); }
  /// ||v|| <= t
  void add_soc(LinearExpr t, std::vector<LinearExpr> v);
  /// c >= b exp(a / b)
  void add_exp(LinearExpr a, LinearExpr b, LinearExpr c);

  const LinearExpr& objective() const { return objective_; }
  const std::vector<LinearExpr>& equalities() const { return equalities_; }
  const std::vector<LinearExpr>& inequalities() const { return inequalities_; }
  const std::vector<SocCone>& soc_cones() const { return soc_; }
  const std::vector<ExpCone>& exp_cones() const { return exp_; }

  /// Total number of scalar constraint rows plus cones (used for bookkeeping tests).
  std::size_t constraint_count() const {
    return equalities_.size() + inequalities_.size() + soc_.size() + exp_.size();
  }

  /// Largest violation of any constraint at x (0 when feasible).
  double max_violation(const std::vector<double>& x) const;

  /// JSON dump of variables, constraints and objective for offline comparison.
  std::string to_json() const;

 private:
  void check(const LinearExpr& e) const;

  std::vector<std::string> names_;
  LinearExpr objective_;
  std::vector<LinearExpr> equalities_;
  std::vector<LinearExpr> inequalities_;
  std::vector<SocCone> soc_;
  std::vector<ExpCone> exp_;
};

enum class SolveStatus { Optimal, Infeasible, NumericalFailure };

const char* to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<double> x;
  double objective = 0.0;
  double gap = 0.0;         // duality-gap bound nu / t at exit
  int newton_steps = 0;
  bool warm_started = false;

  double value(VarId v) const { return x.at(v.index); }
  bool ok() const { return status == SolveStatus::Optimal; }
};

struct SolverOptions {
  double abs_gap = 1e-10;
  double rel_gap = 1e-9;
  double mu = 10.0;
  double ball_radius = 1e10;
  int max_newton_steps = 2000;
  /// Used as the starting point (skipping Phase I) when strictly feasible.
  std::optional<std::vector<double>> warm_start;
};

SolveResult solve(const ConicProgram& program, const SolverOptions& options = {});

// --- Encodings ---------------------------------------------------------------

/// t >= y * 2^(x / y) via the exponential cone (x ln2, y, t). Also adds y >= 1e-12.
void encode_perspective_pow2(ConicProgram& program, const LinearExpr& x, const LinearExpr& y,
                             VarId t);

/// [[z, u], [u, tau]] PSD, lowered to ||(2u, z - tau)|| <= z + tau with z, tau >= 0.
void encode_lmi2x2(ConicProgram& program, const LinearExpr& z, const LinearExpr& tau,
                   const LinearExpr& u);

/// w >= 2^z via the exponential cone (z ln2, 1, w).
void encode_pow2_epigraph(ConicProgram& program, const LinearExpr& z, VarId w);

}  // namespace nomamec::conic
