#include "doctest.h"

#include <cmath>
#include <vector>

#include "gos/matrix.hpp"
#include "gos/rng.hpp"
#include "gos/sdp.hpp"

using namespace gos;
using mat::CMat;
using mat::cplx;

namespace {

// min <I, X> s.t. tr X = 1, X psd (one 2x2 block) -> 1
sdp::SDPProblem trace_normalized(double rhs) {
  sdp::SDPProblem p;
  int b = p.add_block(2);
  p.objective.push_back({b, {{0, 0, 1.0}, {1, 1, 1.0}}});
  sdp::Constraint c;
  c.terms.push_back({b, {{0, 0, 1.0}, {1, 1, 1.0}}});
  c.rhs = rhs;
  p.add_constraint(c);
  return p;
}

}  // namespace

TEST_CASE("minimum trace over the simplex") {
  auto p = trace_normalized(1.0);
  auto s = sdp::solve(p);
  REQUIRE(s.status == sdp::SolveStatus::optimal);
  CHECK(s.primal_objective == doctest::Approx(1.0).epsilon(1e-6));
  auto res = sdp::verify_solution(p, s.X);
  CHECK(res.constraint <= 2e-7);
  CHECK(res.min_eig >= -1e-7);
}

TEST_CASE("negative trace constraint is infeasible") {
  auto p = trace_normalized(-1.0);
  auto s = sdp::solve(p);
  REQUIRE(s.status == sdp::SolveStatus::infeasible);
  CHECK(sdp::check_infeasibility_ray(p, s.infeasibility_ray));
}

TEST_CASE("sigma_z expectation out of range is infeasible") {
  sdp::SDPProblem p;
  int b = p.add_block(2);
  sdp::Constraint c1;  // <diag(1,-1), X> = 3
  c1.terms.push_back({b, {{0, 0, 1.0}, {1, 1, -1.0}}});
  c1.rhs = 3.0;
  p.add_constraint(c1);
  sdp::Constraint c2;  // tr X = 1
  c2.terms.push_back({b, {{0, 0, 1.0}, {1, 1, 1.0}}});
  c2.rhs = 1.0;
  p.add_constraint(c2);
  auto s = sdp::feasibility(p);
  REQUIRE(s.status == sdp::SolveStatus::infeasible);
  CHECK(sdp::check_infeasibility_ray(p, s.infeasibility_ray));
}

TEST_CASE("feasibility returns the maximally mixed state family") {
  sdp::SDPProblem p;
  int b = p.add_block(3);
  sdp::Constraint c;
  c.terms.push_back({b, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}}});
  c.rhs = 1.0;
  p.add_constraint(c);
  auto s = sdp::feasibility(p);
  REQUIRE(s.status == sdp::SolveStatus::optimal);
  auto res = sdp::verify_solution(p, s.X);
  CHECK(res.constraint <= 2e-7);
  CHECK(res.min_eig >= -1e-7);
}

// Brute parametrization oracle: min <C,X> over {X psd, tr X = 1} equals the
// minimum eigenvalue of C. Grid/perturbation search over the PSD boundary
// cross-checks the solver on random 3x3 objectives.
TEST_CASE("random 3x3 objective matches the exhaustive oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 5; ++trial) {
    CMat c0(3, 3);
    for (auto& v : c0.a) v = rng.cgauss();
    c0 = mat::hermitize(c0);

    sdp::SDPProblem p;
    int b = p.add_block(3);
    sdp::BlockTerm obj{b, {}};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) obj.entries.push_back({i, j, c0(i, j)});
    p.objective.push_back(obj);
    sdp::Constraint tr1;
    tr1.terms.push_back({b, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}}});
    tr1.rhs = 1.0;
    p.add_constraint(tr1);

    auto s = sdp::solve(p);
    REQUIRE(s.status == sdp::SolveStatus::optimal);

    // oracle: exhaustive search over pure states |v><v| on a random net
    double best = 1e300;
    for (int k = 0; k < 20000; ++k) {
      CMat v(3, 1);
      for (auto& x : v.a) x = rng.cgauss();
      const double nn = mat::frob_norm(v);
      double val = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          val += (std::conj(v(i, 0)) * c0(i, j) * v(j, 0)).real();
      best = std::min(best, val / (nn * nn));
    }
    CHECK(s.primal_objective <= best + 1e-3);
    CHECK(s.primal_objective >= mat::min_eig(c0) - 1e-5);
  }
}

TEST_CASE("weak duality along the iterate sequence") {
  auto p = trace_normalized(1.0);
  sdp::SolveOptions opts;
  int checked = 0;
  opts.callback = [&](int, double pobj, double dobj, double, double dres, bool) {
    if (dres <= 1e-9) {
      CHECK(dobj <= pobj + 1e-9);
      ++checked;
    }
  };
  auto s = sdp::solve(p, opts);
  REQUIRE(s.status == sdp::SolveStatus::optimal);
  CHECK(s.dual_objective <= s.primal_objective + 1e-9);
}

TEST_CASE("solver determinism is bitwise") {
  Rng rng(77);
  CMat c0(3, 3);
  for (auto& v : c0.a) v = rng.cgauss();
  c0 = mat::hermitize(c0);
  sdp::SDPProblem p;
  int b = p.add_block(3);
  sdp::BlockTerm obj{b, {}};
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) obj.entries.push_back({i, j, c0(i, j)});
  p.objective.push_back(obj);
  sdp::Constraint tr1;
  tr1.terms.push_back({b, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}}});
  tr1.rhs = 1.0;
  p.add_constraint(tr1);
  p.pin_real(b, 0, 1, 0.1);

  auto s1 = sdp::solve(p);
  auto s2 = sdp::solve(p);
  REQUIRE(s1.X.size() == s2.X.size());
  for (size_t i = 0; i < s1.X[0].a.size(); ++i) {
    CHECK(s1.X[0].a[i].real() == s2.X[0].a[i].real());
    CHECK(s1.X[0].a[i].imag() == s2.X[0].a[i].imag());
  }
  CHECK(s1.primal_objective == s2.primal_objective);
}

TEST_CASE("returned primal passes independent re-verification") {
  auto p = trace_normalized(1.0);
  sdp::SolveOptions opts;
  opts.tol = 1e-8;
  auto s = sdp::solve(p, opts);
  REQUIRE(s.status == sdp::SolveStatus::optimal);
  auto res = sdp::verify_solution(p, s.X);
  CHECK(res.constraint <= 2.0 * 1e-8 * 2.0);
  CHECK(res.min_eig >= -2e-8);
}

TEST_CASE("pin helpers hit the intended entries") {
  sdp::SDPProblem p;
  int b = p.add_block(2);
  p.pin_entry(b, 0, 1, cplx(0.25, -0.125));
  sdp::Constraint tr1;
  tr1.terms.push_back({b, {{0, 0, 1.0}, {1, 1, 1.0}}});
  tr1.rhs = 1.0;
  p.add_constraint(tr1);
  auto s = sdp::feasibility(p, 1e-9);
  REQUIRE(s.status == sdp::SolveStatus::optimal);
  CHECK(s.X[0](0, 1).real() == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(s.X[0](0, 1).imag() == doctest::Approx(-0.125).epsilon(1e-6));
}
