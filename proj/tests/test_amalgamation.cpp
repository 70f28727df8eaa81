#include "doctest.h"

#include <cmath>

#include "gos/amalgamation.hpp"
#include "gos/cb_metrics.hpp"
#include "gos/rng.hpp"

using namespace gos;
using mat::CMat;
using mat::cplx;
using osys::AmbientAlgebra;
using osys::SystemMap;

namespace {

CMat pauli_z() {
  CMat m(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

CMat pauli_x() {
  CMat m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

// unital map on span{I, sigma_z} with sigma_z -> s*sigma_z into M_2
SystemMap z_scaling(double s, osys::SystemPtr& dom_out) {
  auto dom = osys::system_span(AmbientAlgebra::full(2), {pauli_z()});
  auto cod = osys::full_system(AmbientAlgebra::full(2));
  SystemMap f;
  f.domain = dom;
  f.codomain = cod;
  f.coeffs = CMat(cod->dim(), dom->dim());
  auto cu = cod->coords_of(mat::identity(2));
  auto cz = cod->coords_of(mat::scale(dom->basis[1], s));
  for (int i = 0; i < cod->dim(); ++i) {
    f.coeffs(i, 0) = cu[i];
    f.coeffs(i, 1) = cz[i];
  }
  f.refresh_unital();
  dom_out = dom;
  return f;
}

}  // namespace

TEST_CASE("amalgamation over the identity has zero defect") {
  Rng rng(3);
  CMat g(2, 2);
  for (auto& v : g.a) v = rng.cgauss();
  auto E = osys::system_span(AmbientAlgebra::full(2), {g});
  auto inc = osys::inclusion_map(E, osys::full_system(AmbientAlgebra::full(2)));
  amalg::AmalgamOptions opts;
  opts.certify = amalg::CertifyMode::sdp;
  auto am = amalg::amalgamate_matricial(E, inc, opts);
  CHECK(am.delta <= 1e-6);
  CHECK(am.defect <= 1e-5);
  CHECK(am.defect_certificate.passed);
  CHECK(am.isometry_certificate_i.passed);
  CHECK(am.isometry_certificate_j.passed);
  CHECK(am.target->ambient_dim() == 4);
}

TEST_CASE("amalgamation of the 1.01 z-scaling stays within the lemma bound") {
  osys::SystemPtr dom;
  auto f = z_scaling(1.01, dom);
  auto am = amalg::amalgamate_matricial(dom, f);
  CHECK(am.delta == doctest::Approx(0.01).epsilon(1e-3));
  const double bound = 100.0 * dom->dim() * std::sqrt(am.delta);
  CHECK(am.defect <= bound + 1e-6);
  CHECK(am.defect_certificate.passed);
  // measured defect far below the bound, and equal to the max of the two legs
  CHECK(am.defect <= 0.25 * bound);
  // legs recomputed from scratch
  auto jf = osys::compose(am.j, f);
  auto iE = osys::restrict_map(am.i, dom);
  const double again = cb::cb_norm(osys::subtract(jf, iE)).value;
  CHECK(std::abs(again - am.defect) <= 1e-6);
}

TEST_CASE("randomized 3-dim amalgamation in M_3") {
  Rng rng(17);
  CMat h(3, 3);
  for (auto& v : h.a) v = rng.cgauss();
  h = mat::hermitize(h);
  auto E = osys::system_span(AmbientAlgebra::full(3), {h});  // dim 2 system
  // f = inclusion perturbed on the non-unit direction
  auto cod = osys::full_system(AmbientAlgebra::full(3));
  SystemMap f = osys::inclusion_map(E, cod);
  for (int i = 0; i < cod->dim(); ++i) f.coeffs(i, 1) *= 1.0025;
  f.refresh_unital();
  auto am = amalg::amalgamate_matricial(E, f);
  CHECK(am.in_hypothesis);
  CHECK(am.defect <= 100.0 * E->dim() * std::sqrt(am.delta) + 1e-6);
  CHECK(am.defect_certificate.passed);
}

TEST_CASE("block amalgamation: identity inside l2(M_2)") {
  auto amb = AmbientAlgebra::inf_sum(2, 2);
  Rng rng(5);
  CMat g(4, 4);
  for (auto& v : g.a) v = rng.cgauss();
  g = amb.project(g);
  auto E = osys::system_span(amb, {g});
  auto full = osys::full_system(amb);
  auto inc = osys::inclusion_map(E, full);
  auto am = amalg::amalgamate_block(E, inc);
  CHECK(am.delta <= 1e-6);
  CHECK(am.defect <= 1e-5);
  CHECK(am.defect_certificate.passed);
  CHECK(am.target->ambient.block_dims == std::vector<int>({2, 2, 2, 2}));
  // i preserves the block structure: images stay block diagonal
  const CMat img = am.i.apply(full->basis[1], 1e-6);
  CHECK(am.target->ambient.contains(img, 1e-8));
}

TEST_CASE("block amalgamation: diagonal rescaling with delta = 0.01") {
  auto amb = AmbientAlgebra::inf_sum(2, 2);
  // E = span{1, d} with d supported on both blocks
  CMat d(4, 4);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  d(2, 2) = 0.5;
  d(3, 3) = -0.5;
  auto E = osys::system_span(amb, {d});
  auto full = osys::full_system(amb);
  SystemMap f = osys::inclusion_map(E, full);
  for (int i = 0; i < full->dim(); ++i) f.coeffs(i, 1) *= 1.01;
  f.refresh_unital();
  auto am = amalg::amalgamate_block(E, f);
  CHECK(am.delta == doctest::Approx(0.01).epsilon(1e-2));
  CHECK(am.defect <= 100.0 * E->dim() * std::sqrt(am.delta) + 1e-6);
  CHECK(am.defect <= 0.25 * 100.0 * E->dim() * std::sqrt(am.delta));
  CHECK(am.defect_certificate.passed);
}

TEST_CASE("function-system mode: commutative 3-point perturbation") {
  auto amb = AmbientAlgebra::inf_sum(3, 1);  // l^inf_3(M_1)
  CMat d(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 0.2;
  d(2, 2) = -1.0;
  auto E = osys::system_span(amb, {d});
  auto full = osys::full_system(amb);
  SystemMap f = osys::inclusion_map(E, full);
  for (int i = 0; i < full->dim(); ++i) f.coeffs(i, 1) *= 1.02;
  f.refresh_unital();
  auto am = amalg::amalgamate_block(E, f);
  CHECK(am.defect <= 100.0 * E->dim() * std::sqrt(am.delta) + 1e-6);
  CHECK(am.defect_certificate.passed);
  // commutative brute force over states: the defect map on E has norm
  // max over the six evaluation functionals of the target's diagonal
  auto jf = osys::compose(am.j, f);
  auto iE = osys::restrict_map(am.i, E);
  auto h = osys::subtract(jf, iE);
  double brute = 0.0;
  for (int m = 0; m < E->dim(); ++m) {
    // hermitian basis element: sup over diagonal entries of |h(e_m)|
    const CMat y = h.image_of_basis(m);
    // normalize by the element norm on E (coords = unit vector)
    std::vector<cplx> c(E->dim());
    c[m] = 1.0;
    const double xn = osys::element_norm(*E, c);
    brute = std::max(brute, mat::max_abs(y) / xn);
  }
  CHECK(am.defect >= brute / E->dim() - 1e-6);  // coarse consistency
}

TEST_CASE("joint embedding of the scalars") {
  auto A = osys::trivial_system(AmbientAlgebra::full(1));
  auto B = osys::trivial_system(AmbientAlgebra::full(1));
  auto am = amalg::joint_embed(A, B);
  CHECK(am.target->ambient_dim() == 2);
  CHECK(am.defect <= 1e-9);
  // lambda -> lambda I_2 on both sides
  const CMat ia = am.i.apply(mat::identity(1), 1e-8);
  CHECK(mat::frob_norm(mat::sub(ia, mat::identity(2))) <= 1e-9);
}

TEST_CASE("joint embedding M_2 with M_3: corner embeddings, four isometries") {
  auto A = osys::full_system(AmbientAlgebra::full(2));
  auto B = osys::full_system(AmbientAlgebra::full(3));
  amalg::AmalgamOptions opts;
  opts.certify = amalg::CertifyMode::sdp;
  auto am = amalg::joint_embed(A, B, opts);
  CHECK(am.target->ambient_dim() == 5);
  CHECK(am.defect <= 1e-8);
  CHECK(am.isometry_certificate_i.passed);
  CHECK(am.isometry_certificate_j.passed);
  // explicit four-direction verification
  CHECK(std::abs(cb::cb_norm(am.i).value - 1.0) <= 1e-6);
  CHECK(std::abs(cb::cb_norm(osys::inverse_map(am.i)).value - 1.0) <= 1e-6);
  CHECK(std::abs(cb::cb_norm(am.j_full).value - 1.0) <= 1e-6);
  CHECK(std::abs(cb::cb_norm(osys::inverse_map(am.j_full)).value - 1.0) <= 1e-6);
}

TEST_CASE("small perturbation map: equal tuples give the identity") {
  auto amb = AmbientAlgebra::full(2);
  std::vector<CMat> a = {pauli_z()};
  auto pm = amalg::small_perturbation_map(amb, a, a);
  CHECK(pm.delta_hat == 0.0);
  CHECK(pm.cb_f.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(pm.cb_f_inv.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(pm.certificate.passed);
}

TEST_CASE("small perturbation map: shifted tuple obeys 1 + k N delta") {
  auto amb = AmbientAlgebra::full(2);
  std::vector<CMat> a = {pauli_z(), pauli_x()};
  std::vector<CMat> b = {pauli_z(), mat::add(pauli_x(), mat::scale(pauli_z(), 0.01))};
  auto pm = amalg::small_perturbation_map(amb, a, b);
  CHECK(pm.delta_hat == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(pm.certificate.passed);
  CHECK(pm.cb_f.value <= 1.0 + 2.0 * pm.auerbach * pm.delta_hat + 1e-6);
  CHECK(pm.cb_f_inv.value <= 1.0 + 2.0 * pm.auerbach * pm.delta_hat + 1e-6);
}

TEST_CASE("small perturbation map rejects near-dependent tuples") {
  auto amb = AmbientAlgebra::full(2);
  std::vector<CMat> a = {pauli_z(), mat::add(pauli_z(), mat::scale(pauli_x(), 1e-12))};
  std::vector<CMat> b = a;
  CHECK_THROWS(amalg::small_perturbation_map(amb, a, b));
}

TEST_CASE("fraisse upper bound: identical tuples give ~0") {
  auto amb = AmbientAlgebra::full(2);
  Rng rng(7);
  CMat g(2, 2);
  for (auto& v : g.a) v = rng.cgauss();
  std::vector<CMat> a = {g};
  auto fu = amalg::fraisse_distance_upper(amb, a, amb, a, 3);
  CHECK(fu.upper <= 1e-4);
  CHECK(fu.witness.has_value());
}

TEST_CASE("fraisse upper bound through a unital complete isometry is ~0") {
  auto amb = AmbientAlgebra::full(2);
  Rng rng(9);
  CMat g(2, 2);
  for (auto& v : g.a) v = rng.cgauss();
  CMat w(2, 2);
  for (auto& v : w.a) v = rng.cgauss();
  const CMat u = mat::polar_unitary(w);
  std::vector<CMat> a = {g};
  std::vector<CMat> b = {mat::mul(mat::mul(mat::adjoint(u), g), u)};
  auto fu = amalg::fraisse_distance_upper(amb, a, amb, b, 2);
  CHECK(fu.upper <= 1e-4);
}

TEST_CASE("fraisse upper bound for a small perturbation stays under the proof constant") {
  auto amb = AmbientAlgebra::full(2);
  std::vector<CMat> a = {pauli_z(), pauli_x()};
  std::vector<CMat> b = {pauli_z(), mat::add(pauli_x(), mat::scale(pauli_z(), 1e-4))};
  auto pm = amalg::small_perturbation_map(amb, a, b);
  const double delta = std::max(pm.cb_f.value, pm.cb_f_inv.value) - 1.0;
  auto fu = amalg::fraisse_distance_upper(amb, a, amb, b, 2);
  const double k = 2.0;
  CHECK(fu.upper <= 1000.0 * k * std::sqrt(std::max(0.0, delta)) + 1e-4);
  CHECK(fu.upper <= 100.0 * k * std::sqrt(std::max(0.0, delta)) + 1e-4);  // stated constant
}

TEST_CASE("approximate isometry composition") {
  // graph of a bijection relabels
  amalg::DistTable phi;
  phi.rows = 2;
  phi.cols = 2;
  phi.v = {0.5, 1.5, 2.0, 0.25};
  auto sigma = amalg::DistTable::graph_of({1, 0}, 2);
  auto composed = amalg::compose_approximate_isometry(phi, sigma);
  CHECK(composed.at(0, 0) == doctest::Approx(1.5));
  CHECK(composed.at(0, 1) == doctest::Approx(0.5));
  CHECK(composed.at(1, 1) == doctest::Approx(2.0));

  // graphs of maps compose to the graph of the composite
  auto f = amalg::DistTable::graph_of({1, 1, 0}, 2);
  auto g = amalg::DistTable::graph_of({0, 1}, 2);
  auto gf = amalg::compose_approximate_isometry(f, g);
  CHECK(gf.at(0, 1) == 0.0);
  CHECK(gf.at(2, 0) == 0.0);

  // triangle inequality exhaustively on random tables
  Rng rng(13);
  amalg::DistTable p, q;
  p.rows = 3;
  p.cols = 4;
  p.v.resize(12);
  q.rows = 4;
  q.cols = 2;
  q.v.resize(8);
  for (auto& v : p.v) v = rng.u01() * 2.0;
  for (auto& v : q.v) v = rng.u01() * 2.0;
  auto pq = amalg::compose_approximate_isometry(p, q);
  for (int a0 = 0; a0 < 3; ++a0)
    for (int d0 = 0; d0 < 2; ++d0)
      for (int b0 = 0; b0 < 4; ++b0)
        CHECK(pq.at(a0, d0) <= p.at(a0, b0) + q.at(b0, d0) + 1e-12);

  // associativity on a random triple
  amalg::DistTable r;
  r.rows = 2;
  r.cols = 3;
  r.v.resize(6);
  for (auto& v : r.v) v = rng.u01();
  auto left = amalg::compose_approximate_isometry(amalg::compose_approximate_isometry(p, q), r);
  auto right = amalg::compose_approximate_isometry(p, amalg::compose_approximate_isometry(q, r));
  for (size_t i = 0; i < left.v.size(); ++i) CHECK(left.v[i] == doctest::Approx(right.v[i]));
}

TEST_CASE("nuclear chain on C in span{I,z} in M_2") {
  auto amb = AmbientAlgebra::full(2);
  auto e1 = osys::trivial_system(amb);
  auto e2 = osys::system_span(amb, {pauli_z()});
  auto e3 = osys::full_system(amb);
  auto chain = amalg::nuclear_chain({e1, e2, e3});
  REQUIRE(chain.stages.size() == 3);
  CHECK(chain.all_passed());
  CHECK(chain.stages[0].matrix_dim == 2);
  CHECK(chain.stages[1].matrix_dim == 4);
  CHECK(chain.stages[2].matrix_dim == 6);
  // re-verify every certificate claim from scratch
  for (size_t s = 1; s < chain.stages.size(); ++s) {
    const auto& st = chain.stages[s];
    auto lhs = osys::restrict_map(st.tracker, s == 1 ? e1 : e2);
    auto rhs = osys::compose(*st.connective, chain.stages[s - 1].tracker);
    const double compat = cb::cb_norm(osys::subtract(lhs, rhs)).value;
    CHECK(compat <= std::pow(2.0, -static_cast<double>(s)) + 1e-6);
    const double inv = cb::cb_norm(osys::inverse_map(st.tracker)).value;
    const double epsk = std::pow(50.0 * (s == 1 ? e2->dim() : e3->dim()), -2.0);
    CHECK(inv <= 1.0 + epsk * std::pow(2.0, -2.0 * (s + 1)) + 1e-6);
  }
}

TEST_CASE("constant chain gives identity-like connectives") {
  auto amb = AmbientAlgebra::full(2);
  auto e = osys::full_system(amb);
  auto chain = amalg::nuclear_chain({e, e});
  REQUIRE(chain.stages.size() == 2);
  CHECK(chain.all_passed());
  // tracker compatibility defect ~ 0
  for (const auto& c : chain.stages[1].certificates)
    if (c.claim_id == "nuclear-embedding.tracker-compat") CHECK(c.computed_value <= 1e-5);
}
