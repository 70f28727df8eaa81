#include "gos/amalgamation.hpp"

#include <algorithm>
#include <cmath>

namespace gos::amalg {

namespace {

using osys::AmbientAlgebra;
using osys::OperatorSystem;

// diag(x, phi(x)) as a map from the full source system into the full target
// system; `source_first` flips the two legs for the j-side.
SystemMap diag_embedding(const SystemPtr& source_full, const SystemMap& leg,
                         const SystemPtr& target, bool source_first) {
  SystemMap m;
  m.domain = source_full;
  m.codomain = target;
  m.coeffs = CMat(target->dim(), source_full->dim());
  for (int k = 0; k < source_full->dim(); ++k) {
    const CMat x = source_full->basis[k];
    const CMat lx = leg.apply(x, 1e-6);
    const CMat img = source_first ? mat::direct_sum({x, lx}) : mat::direct_sum({lx, x});
    const auto c = target->coords_of(img, 1e-7);
    for (int i = 0; i < target->dim(); ++i) m.coeffs(i, k) = c[i];
  }
  m.refresh_unital();
  return m;
}

// Rigorous deviation bound for diag-form embeddings built on a ucp leg with
// Choi spectrum defect eta and unitality residual rho:
// ||i||_cb <= 1 + rho + 2 (choi dim) eta, ||i^{-1}||_cb = 1 structurally.
double structural_deviation(const cb::ChoiMatrix& leg_choi) {
  const double eta = leg_choi.cp_defect();
  const double rho = leg_choi.unitality_residual();
  const double cd = static_cast<double>(leg_choi.in_dim * leg_choi.out_dim);
  return rho + 2.0 * cd * eta;
}

Certificate isometry_certificate(const std::string& claim, const SystemMap& emb,
                                 const cb::ChoiMatrix& leg_choi, CertifyMode mode,
                                 double tol) {
  double deviation = 0.0;
  if (mode == CertifyMode::structural) {
    deviation = structural_deviation(leg_choi);
  } else {
    const double fwd = cb::cb_norm(emb, tol).value;
    const double bwd = cb::cb_norm(osys::inverse_map(emb), tol).value;
    deviation = std::max(std::abs(fwd - 1.0), std::abs(bwd - 1.0));
  }
  return Certificate::make(claim, 0.0, deviation, 1e-6);
}

cb::ChoiMatrix choi_of(const SystemMap& full_map) { return cb::choi(full_map); }

}  // namespace

AmalgamResult amalgamate_matricial(const SystemPtr& E, const SystemMap& f,
                                   const AmalgamOptions& opts) {
  if (!f.unital) throw std::invalid_argument("amalgamate_matricial: f must be unital");
  if (!osys::same_system(*E, *f.domain))
    throw std::invalid_argument("amalgamate_matricial: domain mismatch");
  const int n = E->ambient_dim();
  const int k = f.codomain->ambient_dim();

  SystemMap finv = osys::inverse_map(f);

  AmalgamResult out;
  const double cbf = cb::cb_norm(f, opts.tol).value;
  const double cbi = cb::cb_norm(finv, opts.tol).value;
  out.delta = std::max(0.0, std::max(cbf, cbi) - 1.0);
  out.in_hypothesis = out.delta <= 1.0;

  auto near_f = cb::ucp_nearest(f, opts.tol);
  auto near_b = cb::ucp_nearest(finv, opts.tol);
  out.dist_forward = near_f.distance;
  out.dist_backward = near_b.distance;
  out.phi_ext = near_f.extension;  // M_n -> M_k, ucp
  out.psi_ext = near_b.extension;  // M_k -> M_n, ucp

  auto src_full = osys::full_system(AmbientAlgebra::full(n));
  auto cod_full = osys::full_system(AmbientAlgebra::full(k));
  out.target = osys::full_system(AmbientAlgebra::full(n + k));

  out.i = diag_embedding(src_full, out.phi_ext, out.target, /*source_first=*/true);
  out.j_full = diag_embedding(cod_full, out.psi_ext, out.target, /*source_first=*/false);
  out.j = osys::restrict_map(out.j_full, f.codomain, 1e-7);

  // defect ||j o f - i|E||_cb, recomputed from scratch
  SystemMap jf = osys::compose(out.j, f);
  SystemMap iE = osys::restrict_map(out.i, E, 1e-7);
  out.defect = cb::cb_norm(osys::subtract(jf, iE), opts.tol).value;

  const double claim = 100.0 * E->dim() * std::sqrt(out.delta);
  out.defect_certificate =
      Certificate::make("amalgamation-matricial.defect", claim, out.defect, 10.0 * opts.tol);
  if (!out.in_hypothesis) out.defect_certificate.claim_id += ".out-of-range";

  out.isometry_certificate_i = isometry_certificate(
      "amalgamation-matricial.isometry-i", out.i, choi_of(out.phi_ext), opts.certify, opts.tol);
  out.isometry_certificate_j = isometry_certificate(
      "amalgamation-matricial.isometry-j", out.j_full, choi_of(out.psi_ext), opts.certify,
      opts.tol);
  return out;
}

AmalgamResult amalgamate_block(const SystemPtr& E, const SystemMap& f,
                               const AmalgamOptions& opts) {
  if (!f.unital) throw std::invalid_argument("amalgamate_block: f must be unital");
  const AmbientAlgebra& amb0 = E->ambient;
  const AmbientAlgebra& amb1 = f.codomain->ambient;
  const int n = amb0.block_dims.empty() ? 0 : amb0.block_dims[0];
  for (int d : amb0.block_dims)
    if (d != n) throw std::invalid_argument("amalgamate_block: equal block sizes required");
  for (int d : amb1.block_dims)
    if (d != n) throw std::invalid_argument("amalgamate_block: matching block sizes required");
  const int k0 = static_cast<int>(amb0.block_dims.size());
  const int k1 = static_cast<int>(amb1.block_dims.size());

  SystemMap finv = osys::inverse_map(f);

  AmalgamResult out;
  const double cbf = cb::cb_norm(f, opts.tol).value;
  const double cbi = cb::cb_norm(finv, opts.tol).value;
  out.delta = std::max(0.0, std::max(cbf, cbi) - 1.0);
  out.in_hypothesis = out.delta <= 1.0;

  // coordinatewise nearest-ucp: one ucp leg per output block, assembled back
  // into a block-form ucp map (ucp into the infinity-sum = ucp per block)
  auto per_block_leg = [&](const SystemMap& g, const AmbientAlgebra& out_amb,
                           double& worst_dist, double& worst_eta, double& worst_rho) {
    const int blocks = static_cast<int>(out_amb.block_dims.size());
    const int a = g.domain->ambient_dim();
    std::vector<cb::UcpNearestResult> legs;
    auto blk_cod = osys::full_system(AmbientAlgebra::full(n));
    for (int c = 0; c < blocks; ++c) {
      SystemMap gc;
      gc.domain = g.domain;
      gc.codomain = blk_cod;
      gc.coeffs = CMat(blk_cod->dim(), g.domain->dim());
      for (int m = 0; m < g.domain->dim(); ++m) {
        const CMat img = out_amb.block(g.image_of_basis(m), c);
        const auto cc = blk_cod->coords_of(img, 1e-7);
        for (int i = 0; i < blk_cod->dim(); ++i) gc.coeffs(i, m) = cc[i];
      }
      gc.refresh_unital();
      legs.push_back(cb::ucp_nearest(gc, opts.tol));
      worst_dist = std::max(worst_dist, legs.back().distance);
      const auto ch = cb::choi(legs.back().extension);
      worst_eta = std::max(worst_eta, ch.cp_defect());
      worst_rho = std::max(worst_rho, ch.unitality_residual());
    }
    // assemble the block-form extension on the full source algebra M_a
    auto dom_full = osys::full_system(AmbientAlgebra::full(a));
    auto cod_full = osys::full_system(out_amb);
    SystemMap leg;
    leg.domain = dom_full;
    leg.codomain = cod_full;
    leg.coeffs = CMat(cod_full->dim(), dom_full->dim());
    for (int m = 0; m < dom_full->dim(); ++m) {
      std::vector<CMat> parts;
      for (int c = 0; c < blocks; ++c)
        parts.push_back(legs[c].extension.apply(dom_full->basis[m], 1e-6));
      const CMat img = mat::direct_sum(parts);
      const auto cc = cod_full->coords_of(img, 1e-7);
      for (int i = 0; i < cod_full->dim(); ++i) leg.coeffs(i, m) = cc[i];
    }
    leg.refresh_unital();
    return leg;
  };

  double eta_f = 0.0, rho_f = 0.0, eta_b = 0.0, rho_b = 0.0;
  out.dist_forward = 0.0;
  out.dist_backward = 0.0;
  out.phi_ext = per_block_leg(f, amb1, out.dist_forward, eta_f, rho_f);
  out.psi_ext = per_block_leg(finv, amb0, out.dist_backward, eta_b, rho_b);

  AmbientAlgebra target_amb = AmbientAlgebra::inf_sum(k0 + k1, n);
  out.target = osys::full_system(target_amb);
  auto src_full = osys::full_system(amb0);
  auto cod_full = osys::full_system(amb1);

  out.i = diag_embedding(src_full, out.phi_ext, out.target, true);
  out.j_full = diag_embedding(cod_full, out.psi_ext, out.target, false);
  out.j = osys::restrict_map(out.j_full, f.codomain, 1e-7);

  SystemMap jf = osys::compose(out.j, f);
  SystemMap iE = osys::restrict_map(out.i, E, 1e-7);
  out.defect = cb::cb_norm(osys::subtract(jf, iE), opts.tol).value;

  const double claim = 100.0 * E->dim() * std::sqrt(out.delta);
  out.defect_certificate =
      Certificate::make("amalgamation-block.defect", claim, out.defect, 10.0 * opts.tol);
  if (!out.in_hypothesis) out.defect_certificate.claim_id += ".out-of-range";

  // structural bound from the worst block leg; sdp mode recomputes honestly
  if (opts.certify == CertifyMode::structural) {
    const double cd = static_cast<double>(src_full->ambient_dim() * n);
    out.isometry_certificate_i = Certificate::make(
        "amalgamation-block.isometry-i", 0.0, rho_f + 2.0 * cd * eta_f, 1e-6);
    const double cdb = static_cast<double>(cod_full->ambient_dim() * n);
    out.isometry_certificate_j = Certificate::make(
        "amalgamation-block.isometry-j", 0.0, rho_b + 2.0 * cdb * eta_b, 1e-6);
  } else {
    const double fi = cb::cb_norm(out.i, opts.tol).value;
    const double bi = cb::cb_norm(osys::inverse_map(out.i), opts.tol).value;
    out.isometry_certificate_i =
        Certificate::make("amalgamation-block.isometry-i", 0.0,
                          std::max(std::abs(fi - 1.0), std::abs(bi - 1.0)), 1e-6);
    const double fj = cb::cb_norm(out.j_full, opts.tol).value;
    const double bj = cb::cb_norm(osys::inverse_map(out.j_full), opts.tol).value;
    out.isometry_certificate_j =
        Certificate::make("amalgamation-block.isometry-j", 0.0,
                          std::max(std::abs(fj - 1.0), std::abs(bj - 1.0)), 1e-6);
  }
  return out;
}

AmalgamResult joint_embed(const SystemPtr& A, const SystemPtr& B,
                          const AmalgamOptions& opts) {
  const int n = A->ambient_dim();
  const int k = B->ambient_dim();
  auto E = osys::trivial_system(A->ambient);
  // f : C 1_A -> C 1_B, lambda 1 -> lambda 1
  SystemMap f;
  f.domain = E;
  f.codomain = B;
  f.coeffs = CMat(B->dim(), 1);
  f.coeffs(0, 0) = 1.0;
  f.refresh_unital();

  AmalgamResult out;
  out.delta = 0.0;
  out.in_hypothesis = true;
  out.target = osys::full_system(AmbientAlgebra::full(n + k));
  auto src_full = osys::full_system(AmbientAlgebra::full(n));
  auto cod_full = osys::full_system(AmbientAlgebra::full(k));

  // normalized-trace states as the ucp legs
  auto state_leg = [](const SystemPtr& from_full, int to_dim) {
    SystemMap leg;
    leg.domain = from_full;
    leg.codomain = osys::full_system(AmbientAlgebra::full(to_dim));
    leg.coeffs = CMat(leg.codomain->dim(), from_full->dim());
    const int d = from_full->ambient_dim();
    for (int m = 0; m < from_full->dim(); ++m) {
      const cplx t = mat::trace(from_full->basis[m]) / static_cast<double>(d);
      const CMat img = mat::scale(mat::identity(to_dim), t);
      const auto cc = leg.codomain->coords_of(img, 1e-9);
      for (int i = 0; i < leg.codomain->dim(); ++i) leg.coeffs(i, m) = cc[i];
    }
    leg.refresh_unital();
    return leg;
  };
  out.phi_ext = state_leg(src_full, k);
  out.psi_ext = state_leg(cod_full, n);

  out.i = diag_embedding(src_full, out.phi_ext, out.target, true);
  out.j_full = diag_embedding(cod_full, out.psi_ext, out.target, false);
  out.j = osys::restrict_map(out.j_full, B, 1e-8);

  SystemMap jf = osys::compose(out.j, f);
  SystemMap iE = osys::restrict_map(out.i, E, 1e-8);
  out.defect = cb::cb_norm(osys::subtract(jf, iE), opts.tol).value;
  out.defect_certificate =
      Certificate::make("joint-embed.defect", 0.0, out.defect, 10.0 * opts.tol);
  out.isometry_certificate_i = isometry_certificate(
      "joint-embed.isometry-i", out.i, cb::choi(out.phi_ext), opts.certify, opts.tol);
  out.isometry_certificate_j = isometry_certificate(
      "joint-embed.isometry-j", out.j_full, cb::choi(out.psi_ext), opts.certify, opts.tol);
  return out;
}

PerturbationMap small_perturbation_map(const osys::AmbientAlgebra& ambient,
                                       const std::vector<CMat>& a,
                                       const std::vector<CMat>& b,
                                       double tol, uint64_t seed) {
  if (a.size() != b.size())
    throw std::invalid_argument("small_perturbation_map: tuple lengths differ");
  const int k = static_cast<int>(a.size());
  auto A = osys::system_span(ambient, a);
  auto B = osys::system_span(ambient, b);
  if (A->dim() != B->dim())
    throw std::invalid_argument("small_perturbation_map: span dimensions differ");

  auto fopt = osys::map_from_tuples(A, a, B, b, 1e-8);
  if (!fopt)
    throw std::invalid_argument("small_perturbation_map: correspondence is not well-defined");
  PerturbationMap out;
  out.f = *fopt;
  out.f_inv = osys::inverse_map(out.f);

  double dh = 0.0;
  for (int t = 0; t < k; ++t)
    dh = std::max(dh, mat::operator_norm(mat::sub(a[t], b[t])));
  out.delta_hat = dh;

  // tuple-dual functionals xi_i with xi_i(a_j) = delta_ij, xi_i(1) = 0:
  // coordinates through the basis-change matrix of (1, a) in the system basis
  auto tuple_dual_norms = [&](const SystemPtr& sys, const std::vector<CMat>& tup) {
    const int dim = sys->dim();
    if (dim != k + 1)
      throw std::invalid_argument(
          "small_perturbation_map: (1, tuple) must be a basis of its span");
    CMat t(dim, dim);
    std::vector<cplx> unit(dim);
    unit[0] = 1.0;
    for (int i = 0; i < dim; ++i) t(i, 0) = unit[i];
    for (int j = 0; j < k; ++j) {
      const auto c = sys->coords_of(tup[j], 1e-8);
      for (int i = 0; i < dim; ++i) t(i, j + 1) = c[i];
    }
    auto sv = mat::svd(t);
    if (sv.s.back() <= 1e-10 * sv.s.front())
      throw std::invalid_argument("small_perturbation_map: near-dependent tuple rejected");
    // rows of t^{-1} give the dual functionals in basis coordinates
    CMat tinv(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        cplx acc = 0.0;
        for (int l = 0; l < dim; ++l)
          acc += sv.v(i, l) * (1.0 / sv.s[l]) * std::conj(sv.u(j, l));
        tinv(i, j) = acc;
      }
    std::vector<double> norms;
    for (int i = 1; i <= k; ++i) {
      // the functional's value on basis_j is the (i,j) entry of t^{-1}
      std::vector<cplx> targets(dim);
      for (int j = 0; j < dim; ++j) targets[j] = tinv(i, j);
      norms.push_back(osys::functional_norm_exact(*sys, targets, 1e-9));
    }
    return norms;
  };

  auto na = tuple_dual_norms(A, a);
  auto nb = tuple_dual_norms(B, b);
  double nmax = 0.0;
  for (int t = 0; t < k; ++t) {
    nmax = std::max(nmax, mat::operator_norm(a[t]));
    nmax = std::max(nmax, mat::operator_norm(b[t]));
    nmax = std::max(nmax, na[t]);
    nmax = std::max(nmax, nb[t]);
  }
  out.auerbach = nmax;

  out.correction_bound = 0.0;
  for (int t = 0; t < k; ++t)
    out.correction_bound += na[t] * mat::operator_norm(mat::sub(b[t], a[t]));
  if (out.correction_bound >= 1.0)
    throw std::invalid_argument("small_perturbation_map: correction norm " +
                                std::to_string(out.correction_bound) + " >= 1, rejected");

  out.cb_f = cb::cb_norm(out.f, tol);
  out.cb_f_inv = cb::cb_norm(out.f_inv, tol);
  const double claim = 1.0 + k * nmax * dh;
  const double worst = std::max(out.cb_f.value, out.cb_f_inv.value);
  out.certificate = Certificate::make("ucb-smaller-fraisse.cb-bound", claim, worst,
                                      10.0 * tol, seed);
  return out;
}

FraisseUpper fraisse_distance_upper(const osys::AmbientAlgebra& amb_a,
                                    const std::vector<CMat>& a,
                                    const osys::AmbientAlgebra& amb_b,
                                    const std::vector<CMat>& b, int budget,
                                    uint64_t seed, double tol) {
  if (a.size() != b.size())
    throw std::invalid_argument("fraisse_distance_upper: tuple lengths differ");
  auto A = osys::system_span(amb_a, a);
  auto B = osys::system_span(amb_b, b);
  FraisseUpper out;
  out.upper = std::numeric_limits<double>::infinity();
  Rng rng(seed);

  for (int trial = 0; trial < std::max(1, budget); ++trial) {
    // trial 0 is the natural correspondence; later trials compose with a
    // random unital near-identity self-map of the target span
    SystemMap g;  // B -> B perturbation in coordinates
    g.domain = B;
    g.codomain = B;
    g.coeffs = mat::identity(B->dim());
    if (trial > 0) {
      const double eps = 0.05 / trial;
      for (int i = 0; i < B->dim(); ++i)
        for (int j = 1; j < B->dim(); ++j) g.coeffs(i, j) += eps * rng.normal();
    }
    g.refresh_unital();

    std::vector<CMat> bt;
    for (const auto& x : b) bt.push_back(g.apply(x, 1e-6));
    auto fopt = osys::map_from_tuples(A, a, B, bt, 1e-7);
    if (!fopt) {
      out.trial_log.push_back("trial " + std::to_string(trial) + ": correspondence rejected");
      out.trial_values.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    AmalgamOptions opts;
    opts.tol = tol;
    AmalgamResult am;
    try {
      am = amalgamate_matricial(A, *fopt, opts);
    } catch (const std::exception& e) {
      out.trial_log.push_back("trial " + std::to_string(trial) + ": " + e.what());
      out.trial_values.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    double val = 0.0;
    for (size_t t = 0; t < a.size(); ++t) {
      const CMat ia = am.i.apply(a[t], 1e-6);
      const CMat jb = am.j.apply(b[t], 1e-6);
      val = std::max(val, mat::operator_norm(mat::sub(ia, jb)));
    }
    out.trial_values.push_back(val);
    if (val < out.upper) {
      out.upper = val;
      out.best_trial = trial;
      out.witness = am;
    }
  }
  return out;
}

DistTable DistTable::graph_of(const std::vector<int>& image, int cols) {
  DistTable t;
  t.rows = static_cast<int>(image.size());
  t.cols = cols;
  t.v.assign(static_cast<size_t>(t.rows) * cols, std::numeric_limits<double>::infinity());
  for (int r = 0; r < t.rows; ++r) t.at(r, image[r]) = 0.0;
  return t;
}

DistTable compose_approximate_isometry(const DistTable& phi, const DistTable& psi) {
  if (phi.cols != psi.rows)
    throw std::invalid_argument("compose_approximate_isometry: inner sizes differ");
  for (double x : phi.v)
    if (x < 0.0) throw std::invalid_argument("compose_approximate_isometry: negative entry");
  for (double x : psi.v)
    if (x < 0.0) throw std::invalid_argument("compose_approximate_isometry: negative entry");
  DistTable out;
  out.rows = phi.rows;
  out.cols = psi.cols;
  out.v.assign(static_cast<size_t>(out.rows) * out.cols,
               std::numeric_limits<double>::infinity());
  for (int ar = 0; ar < out.rows; ++ar)
    for (int dc = 0; dc < out.cols; ++dc) {
      double best = std::numeric_limits<double>::infinity();
      for (int bm = 0; bm < phi.cols; ++bm)
        best = std::min(best, phi.at(ar, bm) + psi.at(bm, dc));
      out.at(ar, dc) = best;
    }
  return out;
}

EmbeddingChain nuclear_chain(const std::vector<SystemPtr>& systems, double tol) {
  if (systems.empty()) throw std::invalid_argument("nuclear_chain: no systems");
  const int bigN = systems[0]->ambient_dim();
  for (size_t s = 1; s < systems.size(); ++s) {
    if (systems[s]->ambient_dim() != bigN)
      throw std::invalid_argument("nuclear_chain: systems must share an ambient");
    for (int m = 0; m < systems[s - 1]->dim(); ++m)
      if (!systems[s]->contains(systems[s - 1]->basis[m], 1e-8))
        throw std::invalid_argument("nuclear_chain: inclusions violated at stage " +
                                    std::to_string(s));
  }

  EmbeddingChain chain;
  auto amb_full = osys::full_system(osys::AmbientAlgebra::full(bigN));

  ChainStage first;
  first.matrix_dim = bigN;
  first.stage_system = amb_full;
  first.tracker = osys::inclusion_map(systems[0], amb_full);
  {
    const double inv =
        cb::cb_norm(osys::inverse_map(first.tracker), tol).value;
    const double epsk = std::pow(50.0 * systems[0]->dim(), -2.0);
    first.certificates.push_back(Certificate::make(
        "nuclear-embedding.tracker-inverse", 1.0 + epsk * std::pow(2.0, -2.0), inv, 1e-6));
  }
  chain.stages.push_back(std::move(first));

  for (size_t m = 1; m < systems.size(); ++m) {
    const ChainStage& prev = chain.stages.back();
    const int nk = prev.matrix_dim;
    const int stage_no = static_cast<int>(m);  // builds stage m+1 (1-based)

    // alpha ~ theta o i_m^{-1} on the tracked image, extended ucp to M_{n_k}
    SystemMap inv_tracker = osys::inverse_map(prev.tracker);  // image -> E_m
    SystemMap alpha0 = osys::compose(osys::inclusion_map(systems[m - 1], amb_full),
                                     inv_tracker);  // image -> M_N
    auto near_alpha = cb::ucp_nearest(alpha0, tol);
    const double dist_alpha = near_alpha.distance;

    // connective z -> diag(z, alpha(z))
    auto stage_prev_full = prev.stage_system;
    auto stage_next_full = osys::full_system(osys::AmbientAlgebra::full(nk + bigN));
    SystemMap connective =
        diag_embedding(stage_prev_full, near_alpha.extension, stage_next_full, true);

    // tracker i_{m+1}(x) = diag(itilde_m(x), x) with itilde_m a ucp extension
    // of the previous tracker over the common ambient
    auto near_prev = cb::ucp_nearest(prev.tracker, tol);
    SystemMap itilde = near_prev.extension;  // M_N -> M_{n_k}, ucp
    SystemMap tracker;
    tracker.domain = systems[m];
    tracker.codomain = stage_next_full;
    tracker.coeffs = CMat(stage_next_full->dim(), systems[m]->dim());
    for (int j = 0; j < systems[m]->dim(); ++j) {
      const CMat x = systems[m]->basis[j];
      const CMat img = mat::direct_sum({itilde.apply(x, 1e-6), x});
      const auto c = stage_next_full->coords_of(img, 1e-7);
      for (int i = 0; i < stage_next_full->dim(); ++i) tracker.coeffs(i, j) = c[i];
    }
    tracker.refresh_unital();

    ChainStage stage;
    stage.matrix_dim = nk + bigN;
    stage.stage_system = stage_next_full;
    stage.tracker = tracker;
    stage.connective = connective;

    const double budget = std::pow(2.0, -static_cast<double>(stage_no));
    stage.certificates.push_back(Certificate::make(
        "nuclear-embedding.step-distance", budget, dist_alpha, 1e-6));

    // compatibility || i_{m+1}|E_m - phi_m o i_m ||_cb
    SystemMap lhs = osys::restrict_map(tracker, systems[m - 1], 1e-7);
    SystemMap rhs = osys::compose(connective, prev.tracker);
    const double compat = cb::cb_norm(osys::subtract(lhs, rhs), tol).value;
    stage.certificates.push_back(Certificate::make(
        "nuclear-embedding.tracker-compat", budget, compat, 1e-6));

    const double inv = cb::cb_norm(osys::inverse_map(tracker), tol).value;
    const double epsk = std::pow(50.0 * systems[m]->dim(), -2.0);
    const double claim = 1.0 + epsk * std::pow(2.0, -2.0 * (stage_no + 1));
    stage.certificates.push_back(
        Certificate::make("nuclear-embedding.tracker-inverse", claim, inv, 1e-6));

    // connective is diag(id, ucp): structural deviation bound
    const auto ch = cb::choi(near_alpha.extension);
    stage.certificates.push_back(Certificate::make(
        "nuclear-embedding.connective", 0.0, structural_deviation(ch), 1e-6));

    chain.stages.push_back(std::move(stage));
  }
  return chain;
}

}  // namespace gos::amalg
