#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "nomamec/conic.hpp"

namespace nomamec::conic {

LinearExpr LinearExpr::term(VarId v, double coefficient) {
  LinearExpr e;
  e.terms_.emplace_back(v.index, coefficient);
  return e;
}

bool LinearExpr::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second == 0.0; });
}

LinearExpr& LinearExpr::canonicalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::size_t, double>> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().first == t.first)
      merged.back().second += t.second;
    else
      merged.push_back(t);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const auto& t) { return t.second == 0.0; }),
               merged.end());
  terms_ = std::move(merged);
  return *this;
}

double LinearExpr::evaluate(const std::vector<double>& x) const {
  double s = constant_;
  for (const auto& [i, c] : terms_) s += c * x.at(i);
  return s;
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& rhs) {
  terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
  constant_ += rhs.constant_;
  return canonicalize();
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& rhs) {
  for (const auto& [i, c] : rhs.terms_) terms_.emplace_back(i, -c);
  constant_ -= rhs.constant_;
  return canonicalize();
}

LinearExpr& LinearExpr::operator*=(double s) {
  for (auto& t : terms_) t.second *= s;
  constant_ *= s;
  return canonicalize();
}

VarId ConicProgram::add_variable(std::string name) {
  if (name.empty()) name = "x" + std::to_string(names_.size());
  names_.push_back(std::move(name));
  return VarId{names_.size() - 1};
}

void ConicProgram::check(const LinearExpr& e) const {
  for (const auto& t : e.terms())
    if (t.first >= names_.size()) throw std::invalid_argument("expression references an undeclared variable");
}

void ConicProgram::minimize(LinearExpr objective) {
  check(objective);
  objective_ = std::move(objective.canonicalize());
}

void ConicProgram::add_equality(LinearExpr expr) {
  check(expr);
  equalities_.push_back(std::move(expr.canonicalize()));
}

void ConicProgram::add_inequality(LinearExpr expr) {
  check(expr);
  inequalities_.push_back(std::move(expr.canonicalize()));
}

void ConicProgram::add_soc(LinearExpr t, std::vector<LinearExpr> v) {
  if (v.empty()) throw std::invalid_argument("second-order cone needs at least one component");
  check(t);
  for (auto& e : v) {
    check(e);
    e.canonicalize();
  }
  soc_.push_back({std::move(t.canonicalize()), std::move(v)});
}

void ConicProgram::add_exp(LinearExpr a, LinearExpr b, LinearExpr c) {
  check(a);
  check(b);
  check(c);
  exp_.push_back({std::move(a.canonicalize()), std::move(b.canonicalize()), std::move(c.canonicalize())});
}

double ConicProgram::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (const auto& e : equalities_) worst = std::max(worst, std::abs(e.evaluate(x)));
  for (const auto& e : inequalities_) worst = std::max(worst, e.evaluate(x));
  for (const auto& cone : soc_) {
    double sq = 0.0;
    for (const auto& v : cone.v) sq += std::pow(v.evaluate(x), 2);
    worst = std::max(worst, std::sqrt(sq) - cone.t.evaluate(x));
  }
  for (const auto& cone : exp_) {
    const double a = cone.a.evaluate(x), b = cone.b.evaluate(x), c = cone.c.evaluate(x);
    if (b > 0.0) {
      worst = std::max(worst, b * std::exp(a / b) - c);
    } else {
      // Closure of the cone at b = 0: a <= 0, c >= 0.
      worst = std::max({worst, -b, a, -c});
    }
  }
  return worst;
}

namespace {

nlohmann::json expr_json(const LinearExpr& e) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [i, c] : e.terms()) terms.push_back({{"var", i}, {"coef", c}});
  return {{"terms", terms}, {"constant", e.constant()}};
}

}  // namespace

std::string ConicProgram::to_json() const {
  nlohmann::json j;
  j["variables"] = names_;
  j["objective"] = expr_json(objective_);
  for (const auto& e : equalities_) j["equalities"].push_back(expr_json(e));
  for (const auto& e : inequalities_) j["inequalities"].push_back(expr_json(e));
  for (const auto& c : soc_) {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& e : c.v) v.push_back(expr_json(e));
    j["soc"].push_back({{"t", expr_json(c.t)}, {"v", v}});
  }
  for (const auto& c : exp_)
    j["exp"].push_back({{"a", expr_json(c.a)}, {"b", expr_json(c.b)}, {"c", expr_json(c.c)}});
  return j.dump(1);
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

}  // namespace nomamec::conic
