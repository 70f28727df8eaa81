#include "doctest.h"

#include <cmath>

#include "gos/matrix.hpp"
#include "gos/rng.hpp"

using namespace gos;
using mat::CMat;
using mat::cplx;

namespace {

CMat random_matrix(Rng& rng, int r, int c) {
  CMat m(r, c);
  for (auto& v : m.a) v = rng.cgauss();
  return m;
}

CMat random_hermitian(Rng& rng, int n) {
  return mat::hermitize(random_matrix(rng, n, n));
}

CMat pauli_x() {
  CMat m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("herm_eig on diagonal input") {
  CMat d(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  auto e = mat::herm_eig(d);
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.values[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mat::frob_norm(mat::sub(e.vectors, mat::identity(2))) < 1e-12);
}

TEST_CASE("herm_eig on sigma_x") {
  auto e = mat::herm_eig(pauli_x());
  CHECK(e.values[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("herm_eig reconstruction residual on random inputs") {
  Rng rng(7);
  for (int n : {3, 6, 16, 64}) {
    CMat h = random_hermitian(rng, n);
    auto e = mat::herm_eig(h);
    // V Lambda V^*
    CMat lam(n, n);
    for (int i = 0; i < n; ++i) lam(i, i) = e.values[i];
    CMat rec = mat::mul(mat::mul(e.vectors, lam), mat::adjoint(e.vectors));
    CHECK(mat::frob_norm(mat::sub(rec, h)) <= 1e-9 * std::max(1.0, mat::frob_norm(h)));
    CMat vv = mat::mul(mat::adjoint(e.vectors), e.vectors);
    CHECK(mat::frob_norm(mat::sub(vv, mat::identity(n))) <= 1e-10 * n);
  }
}

TEST_CASE("herm_eig warm start reproduces the spectrum") {
  Rng rng(11);
  CMat h = random_hermitian(rng, 12);
  auto cold = mat::herm_eig(h);
  CMat h2 = h;
  h2(0, 1) += cplx(1e-4, -2e-5);
  h2(1, 0) += cplx(1e-4, 2e-5);
  auto warm = mat::herm_eig(h2, &cold.vectors);
  auto cold2 = mat::herm_eig(h2);
  for (int i = 0; i < 12; ++i)
    CHECK(warm.values[i] == doctest::Approx(cold2.values[i]).epsilon(1e-10));
  CHECK(warm.sweeps <= cold2.sweeps);
}

TEST_CASE("operator_norm basics") {
  CHECK(mat::operator_norm(mat::identity(3)) == doctest::Approx(1.0));
  CMat e12(2, 2);
  e12(0, 1) = 1.0;
  CHECK(mat::operator_norm(e12) == doctest::Approx(1.0));
}

TEST_CASE("operator_norm dominates the vector-sampling oracle") {
  Rng rng(23);
  CMat m = random_matrix(rng, 4, 4);
  const double nrm = mat::operator_norm(m);
  double best = 0.0;
  CMat vbest(4, 1);
  for (int trial = 0; trial < 10000; ++trial) {
    CMat v(4, 1);
    for (auto& x : v.a) x = rng.cgauss();
    const double vn = mat::frob_norm(v);
    CMat mv = mat::mul(m, v);
    if (mat::frob_norm(mv) / vn > best) {
      best = mat::frob_norm(mv) / vn;
      vbest = v;
    }
  }
  CHECK(nrm >= best - 1e-9);
  // polish the best sample by power iteration on m^* m; still a lower bound
  CMat g = mat::mul(mat::adjoint(m), m);
  CMat v = vbest;
  for (int it = 0; it < 200; ++it) {
    v = mat::mul(g, v);
    v = mat::scale(v, 1.0 / mat::frob_norm(v));
  }
  const double polished = mat::frob_norm(mat::mul(m, v)) / mat::frob_norm(v);
  CHECK(nrm >= polished - 1e-9);
  CHECK(nrm <= polished + 1e-6);
}

TEST_CASE("operator_norm submultiplicativity") {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    CMat a = random_matrix(rng, 3, 3);
    CMat b = random_matrix(rng, 3, 3);
    CHECK(mat::operator_norm(mat::mul(a, b)) <=
          mat::operator_norm(a) * mat::operator_norm(b) + 1e-9);
  }
}

TEST_CASE("kron and partial_trace") {
  CHECK(mat::frob_norm(mat::sub(mat::kron(mat::identity(2), mat::identity(3)),
                                mat::identity(6))) == doctest::Approx(0.0));
  Rng rng(3);
  CMat a = random_matrix(rng, 2, 2);
  CMat b = random_matrix(rng, 3, 3);
  // normalize tr(b) = 1
  b = mat::scale(b, 1.0 / mat::trace(b));
  CMat k = mat::kron(a, b);
  CMat pt = mat::partial_trace(k, 2, 3, mat::TraceSide::second);
  CHECK(mat::frob_norm(mat::sub(pt, a)) < 1e-12);
  CMat pf = mat::partial_trace(k, 2, 3, mat::TraceSide::first);
  CHECK(mat::frob_norm(mat::sub(pf, mat::scale(b, mat::trace(a)))) < 1e-12);
  CHECK_THROWS(mat::partial_trace(a, 2, 3, mat::TraceSide::first));
}

TEST_CASE("direct_sum block layout") {
  Rng rng(9);
  CMat a = random_matrix(rng, 2, 2);
  CMat b = random_matrix(rng, 3, 3);
  CMat d = mat::direct_sum({a, b});
  CHECK(d.rows == 5);
  CHECK(d(0, 0) == a(0, 0));
  CHECK(d(2, 2) == b(0, 0));
  CHECK(d(0, 2) == cplx(0.0, 0.0));
}

TEST_CASE("jordan_split examples and properties") {
  CMat d(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  auto js = mat::jordan_split(d);
  CHECK(js.pos(0, 0).real() == doctest::Approx(1.0));
  CHECK(js.pos(1, 1).real() == doctest::Approx(0.0));
  CHECK(js.neg(1, 1).real() == doctest::Approx(1.0));

  Rng rng(31);
  CMat p = random_matrix(rng, 3, 3);
  CMat psd = mat::mul(p, mat::adjoint(p));
  auto js2 = mat::jordan_split(psd);
  CHECK(mat::frob_norm(js2.neg) < 1e-10 * mat::frob_norm(psd));

  for (int trial = 0; trial < 10; ++trial) {
    CMat h = random_hermitian(rng, 5);
    auto s = mat::jordan_split(h);
    CHECK(mat::frob_norm(mat::sub(h, mat::sub(s.pos, s.neg))) <= 1e-10 * std::max(1.0, mat::frob_norm(h)));
    CHECK(mat::min_eig(s.pos) >= -1e-12);
    CHECK(mat::min_eig(s.neg) >= -1e-12);
    CHECK(std::abs(mat::hs_inner(s.pos, s.neg)) <= 1e-9 * std::max(1.0, mat::frob_norm(h)));
    CHECK(mat::frob_norm(mat::mul(s.pos, s.neg)) <= 1e-9 * std::max(1.0, mat::frob_norm(h)));
  }
}

TEST_CASE("hermitian validation") {
  CMat m(2, 2);
  m(0, 1) = cplx(0.0, 1.0);
  m(1, 0) = cplx(0.0, 1.0);  // not hermitian
  CHECK(!mat::is_hermitian(m));
  CHECK(mat::is_hermitian(mat::hermitize(m)));
}

TEST_CASE("svd and polar factor") {
  Rng rng(17);
  CMat m = random_matrix(rng, 4, 4);
  auto s = mat::svd(m);
  CMat sig(4, 4);
  for (int i = 0; i < 4; ++i) sig(i, i) = s.s[i];
  CMat rec = mat::mul(mat::mul(s.u, sig), mat::adjoint(s.v));
  CHECK(mat::frob_norm(mat::sub(rec, m)) < 1e-9 * mat::frob_norm(m));
  CHECK(s.s[0] == doctest::Approx(mat::operator_norm(m)).epsilon(1e-9));

  CMat u = mat::polar_unitary(m);
  CMat uu = mat::mul(mat::adjoint(u), u);
  CHECK(mat::frob_norm(mat::sub(uu, mat::identity(4))) < 1e-9);
  // rank-deficient input still yields a unitary factor
  CMat low(3, 3);
  low(0, 0) = 2.0;
  CMat u2 = mat::polar_unitary(low);
  CHECK(mat::frob_norm(mat::sub(mat::mul(mat::adjoint(u2), u2), mat::identity(3))) < 1e-9);
}

TEST_CASE("rng determinism and normal moments") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(1);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}
