#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "nomamec/conic.hpp"
#include "nomamec/rng.hpp"

using namespace nomamec;
using namespace nomamec::conic;
using Catch::Approx;

TEST_CASE("LP sanity: minimize x subject to x >= 2") {
  ConicProgram p;
  const VarId x = p.add_variable("x");
  p.add_leq(2.0, x);
  p.minimize(x);
  const SolveResult r = solve(p);
  REQUIRE(r.ok());
  REQUIRE(r.value(x) == Approx(2.0).margin(1e-8));
}

TEST_CASE("exponential cone: minimize t with t >= 2^1") {
  ConicProgram p;
  const VarId t = p.add_variable("t");
  encode_pow2_epigraph(p, 1.0, t);
  p.minimize(t);
  const SolveResult r = solve(p);
  REQUIRE(r.ok());
  REQUIRE(r.value(t) == Approx(2.0).margin(1e-8));
}

TEST_CASE("pow2 epigraph bounds") {
  for (const auto& [z, w] : {std::pair{3.0, 8.0}, {0.0, 1.0}, {-1.0, 0.5}}) {
    ConicProgram p;
    const VarId t = p.add_variable();
    encode_pow2_epigraph(p, z, t);
    p.minimize(t);
    const SolveResult r = solve(p);
    REQUIRE(r.ok());
    REQUIRE(r.value(t) == Approx(w).epsilon(1e-8));
  }
}

TEST_CASE("LMI lowering: minimize t with z = tau = t and u = 1") {
  ConicProgram p;
  const VarId t = p.add_variable("t");
  encode_lmi2x2(p, t, t, 1.0);
  p.minimize(t);
  const SolveResult r = solve(p);
  REQUIRE(r.ok());
  REQUIRE(r.value(t) == Approx(1.0).margin(1e-8));
}

TEST_CASE("LMI lowering agrees with the 2x2 eigenvalue test") {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double z = rng.uniform(-1, 3), tau = rng.uniform(-1, 3), u = rng.uniform(-2, 2);
    ConicProgram p;
    p.add_variable();
    encode_lmi2x2(p, z, tau, u);
    const bool soc = p.max_violation({0.0}) <= 0.0;
    const double tr = z + tau;
    const double min_eig = 0.5 * (tr - std::sqrt((z - tau) * (z - tau) + 4 * u * u));
    if (std::abs(min_eig) > 1e-9) REQUIRE(soc == (min_eig >= 0.0));
  }
  ConicProgram p;
  p.add_variable();
  encode_lmi2x2(p, 1.0, 4.0, 2.0);
  REQUIRE(p.max_violation({0.0}) <= 1e-12);
  ConicProgram q;
  q.add_variable();
  encode_lmi2x2(q, 1.0, 1.0, 1.1);
  REQUIRE(q.max_violation({0.0}) > 0.0);
  ConicProgram zero;
  zero.add_variable();
  encode_lmi2x2(zero, 0.0, 0.0, 0.0);
  REQUIRE(zero.max_violation({0.0}) <= 0.0);
}

TEST_CASE("perspective encoding is tight on hand-computed points") {
  for (const auto& [x, y, want] : {std::tuple{1.0, 1.0, 2.0}, {0.0, 3.0, 3.0}, {2.0, 0.5, 8.0}}) {
    ConicProgram p;
    const VarId t = p.add_variable();
    encode_perspective_pow2(p, x, y, t);
    p.minimize(t);
    const SolveResult r = solve(p);
    REQUIRE(r.ok());
    REQUIRE(r.value(t) == Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("perspective encoding is tight for random positive inputs") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(0.01, 5.0), y = rng.uniform(0.2, 3.0);
    ConicProgram p;
    const VarId t = p.add_variable();
    const VarId yv = p.add_variable();
    p.add_equality(LinearExpr(yv) - y);
    encode_perspective_pow2(p, x, yv, t);
    p.minimize(t);
    const SolveResult r = solve(p);
    REQUIRE(r.ok());
    const double want = y * std::pow(2.0, x / y);
    REQUIRE(std::abs(r.value(t) - want) <= 1e-7 * want);
  }
}

TEST_CASE("infeasible programs are reported, not crashed") {
  ConicProgram p;
  const VarId x = p.add_variable();
  p.add_leq(x, 1.0);
  p.add_leq(2.0, x);
  p.minimize(x);
  REQUIRE(solve(p).status == SolveStatus::Infeasible);

  ConicProgram q;
  const VarId w = q.add_variable();
  encode_pow2_epigraph(q, 2.0, w);  // w >= 4
  q.add_leq(w, 3.0);
  q.minimize(w);
  REQUIRE(solve(q).status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded programs report numerical failure") {
  ConicProgram p;
  const VarId x = p.add_variable();
  p.minimize(x);
  REQUIRE(solve(p).status == SolveStatus::NumericalFailure);
}

TEST_CASE("equality elimination") {
  ConicProgram p;
  const VarId x = p.add_variable(), y = p.add_variable();
  p.add_equality(LinearExpr(x) + LinearExpr(y) - 1.0);
  p.add_leq(0.0, x);
  p.add_leq(0.0, y);
  p.minimize(2.0 * LinearExpr(x) + LinearExpr(y));
  const SolveResult r = solve(p);
  REQUIRE(r.ok());
  REQUIRE(r.value(x) == Approx(0.0).margin(1e-8));
  REQUIRE(r.value(y) == Approx(1.0).margin(1e-8));
}

TEST_CASE("solutions satisfy every cone on replay") {
  // A small mixed program with an interior optimum on several cones.
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    ConicProgram p;
    const VarId tau = p.add_variable(), z = p.add_variable(), u = p.add_variable();
    const VarId w = p.add_variable(), e = p.add_variable();
    const double need = rng.uniform(0.1, 2.0);
    p.add_leq(need, 2.0 * rng.uniform(0.5, 1.0) * LinearExpr(u) - 0.25);
    encode_lmi2x2(p, z, tau, u);
    encode_pow2_epigraph(p, z, w);
    encode_perspective_pow2(p, LinearExpr(need), tau, e);
    p.add_leq(w, 1e3);
    p.add_leq(tau, 1.0);
    p.minimize(LinearExpr(e) + LinearExpr(tau));
    const SolveResult r = solve(p);
    REQUIRE(r.ok());
    REQUIRE(p.max_violation(r.x) <= 1e-7);
  }
}

TEST_CASE("a strictly feasible warm start skips phase one") {
  ConicProgram p;
  const VarId x = p.add_variable();
  p.add_leq(2.0, x);
  p.minimize(x);
  SolverOptions opt;
  opt.warm_start = std::vector<double>{3.0};
  const SolveResult r = solve(p, opt);
  REQUIRE(r.ok());
  REQUIRE(r.warm_started);
  REQUIRE(r.value(x) == Approx(2.0).margin(1e-8));
}

TEST_CASE("json dump lists every cone") {
  ConicProgram p;
  const VarId t = p.add_variable("t");
  encode_pow2_epigraph(p, 1.0, t);
  encode_lmi2x2(p, t, t, 1.0);
  p.minimize(t);
  const std::string j = p.to_json();
  REQUIRE(j.find("\"exp\"") != std::string::npos);
  REQUIRE(j.find("\"soc\"") != std::string::npos);
  REQUIRE(j.find("\"t\"") != std::string::npos);
}
