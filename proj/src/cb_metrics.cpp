#include "gos/cb_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace gos::cb {

namespace {

// Accumulate herm(K) into a sparse Hermitian block term so that
// <herm(K), X> = Re tr(K^* X); pass i*K for the imaginary part.
void add_retr(sdp::BlockTerm& t, const std::vector<std::tuple<int, int, cplx>>& k) {
  for (const auto& [r, c, v] : k) {
    if (v == cplx(0.0, 0.0)) continue;
    if (r == c) {
      t.entries.push_back({r, r, cplx(v.real(), 0.0)});
    } else if (r < c) {
      t.entries.push_back({r, c, 0.5 * v});
    } else {
      t.entries.push_back({c, r, 0.5 * std::conj(v)});
    }
  }
}

void fold_entries(sdp::BlockTerm& t) {
  // merge duplicate coordinates (diagonal entries from herm() can repeat)
  std::sort(t.entries.begin(), t.entries.end(), [](const auto& x, const auto& y) {
    return std::tie(x.r, x.c) < std::tie(y.r, y.c);
  });
  std::vector<sdp::CEntry> out;
  for (const auto& e : t.entries) {
    if (!out.empty() && out.back().r == e.r && out.back().c == e.c)
      out.back().v += e.v;
    else
      out.push_back(e);
  }
  t.entries = std::move(out);
}

struct MapData {
  std::vector<CMat> basis;   // e_m in M_a, e_0 = I
  std::vector<CMat> values;  // f(e_m) in M_b
  int a = 0;
  int b = 0;
};

MapData map_data(const SystemMap& f) {
  MapData d;
  d.a = f.domain->ambient_dim();
  d.b = f.codomain->ambient_dim();
  d.basis = f.domain->basis;
  for (int m = 0; m < f.domain->dim(); ++m) d.values.push_back(f.image_of_basis(m));
  return d;
}

// Pin unitality exactly: psi(x) + (tr x / a)(1 - psi(1)). The correction is a
// cp-small rank-one drift that keeps compositions of unital maps exactly
// unital downstream.
void make_exactly_unital(SystemMap& f) {
  const int a = f.domain->ambient_dim();
  const CMat defect = mat::sub(f.codomain->ambient.identity_matrix(), f.image_of_basis(0));
  if (mat::frob_norm(defect) == 0.0) {
    f.unital = true;
    return;
  }
  const auto dc = f.codomain->coords_of(defect, 1e-5);
  for (int m = 0; m < f.domain->dim(); ++m) {
    const cplx w = mat::trace(f.domain->basis[m]) / static_cast<double>(a);
    if (w == cplx(0.0, 0.0)) continue;
    for (int i = 0; i < f.codomain->dim(); ++i) f.coeffs(i, m) += w * dc[i];
  }
  f.refresh_unital();
}

}  // namespace

bool ChoiMatrix::completely_positive(double tol) const { return cp_defect() <= tol; }

double ChoiMatrix::cp_defect() const { return std::max(0.0, -mat::min_eig(matrix)); }

CMat ChoiMatrix::unit_image() const {
  return mat::partial_trace(matrix, in_dim, out_dim, mat::TraceSide::first);
}

double ChoiMatrix::unitality_residual() const {
  return mat::frob_norm(mat::sub(unit_image(), mat::identity(out_dim)));
}

CMat ChoiMatrix::apply(const CMat& x) const {
  CMat y(out_dim, out_dim);
  for (int p = 0; p < out_dim; ++p)
    for (int q = 0; q < out_dim; ++q) {
      cplx s = 0.0;
      for (int i = 0; i < in_dim; ++i)
        for (int j = 0; j < in_dim; ++j)
          s += x(i, j) * matrix(i * out_dim + p, j * out_dim + q);
      y(p, q) = s;
    }
  return y;
}

ChoiMatrix choi(const SystemMap& phi) {
  const int a = phi.domain->ambient_dim();
  const int b = phi.codomain->ambient_dim();
  if (phi.domain->dim() != a * a)
    throw std::invalid_argument("choi: domain must be the full matrix algebra");
  ChoiMatrix c;
  c.in_dim = a;
  c.out_dim = b;
  c.matrix = CMat(a * b, a * b);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) {
      CMat eij(a, a);
      eij(i, j) = 1.0;
      const CMat img = phi.apply(eij, 1e-7);
      for (int p = 0; p < b; ++p)
        for (int q = 0; q < b; ++q) c.matrix(i * b + p, j * b + q) = img(p, q);
    }
  return c;
}

SystemMap inverse_choi(const ChoiMatrix& c) {
  auto dom = osys::full_system(osys::AmbientAlgebra::full(c.in_dim));
  auto cod = osys::full_system(osys::AmbientAlgebra::full(c.out_dim));
  SystemMap f;
  f.domain = dom;
  f.codomain = cod;
  f.coeffs = CMat(cod->dim(), dom->dim());
  for (int m = 0; m < dom->dim(); ++m) {
    const CMat img = c.apply(dom->basis[m]);
    const auto cc = cod->coords_of(img, 1e-8);
    for (int i = 0; i < cod->dim(); ++i) f.coeffs(i, m) = cc[i];
  }
  f.refresh_unital();
  return f;
}

CbNormResult cb_norm_values(const std::vector<CMat>& basis, const std::vector<CMat>& values,
                            int a, int b, double tol, const sdp::SolveOptions* base_opts) {
  const int d = static_cast<int>(basis.size());
  CbNormResult out;
  double scale = 0.0;
  for (const auto& v : values) scale = std::max(scale, mat::operator_norm(v));
  if (scale == 0.0) {
    out.value = 0.0;
    out.certified = CbNormResult::Kind::exact;
    return out;
  }
  // The normalized problem only needs tol/scale accuracy to pin the original
  // value to tol; keeps near-zero maps (defect measurements) cheap.
  const double tol_eff = std::min(1e-4, std::max(tol, 0.25 * tol / scale));

  const int ab = a * b;
  sdp::SDPProblem p;
  const int zb = p.add_block(2 * ab);
  const int s0 = p.add_block(b);
  const int s1 = p.add_block(b);
  const int t0 = p.add_block(1);
  const int t1 = p.add_block(1);

  auto top = [a](int pp, int ii) { return pp * a + ii; };
  auto bot = [a, ab](int qq, int jj) { return ab + qq * a + jj; };

  // G agrees with f on E: G(e_m)_pq = v_m(p,q) read through the corner of Z.
  for (int m = 0; m < d; ++m) {
    for (int pp = 0; pp < b; ++pp)
      for (int qq = 0; qq < b; ++qq) {
        std::vector<std::tuple<int, int, cplx>> k;
        for (int i = 0; i < a; ++i)
          for (int j = 0; j < a; ++j) {
            const cplx e = basis[m](i, j);
            if (e != cplx(0.0, 0.0)) k.emplace_back(top(pp, i), bot(qq, j), e);
          }
        const cplx target = values[m](pp, qq) / scale;
        {
          sdp::Constraint cn;
          sdp::BlockTerm tz{zb, {}};
          std::vector<std::tuple<int, int, cplx>> mk = k;
          for (auto& [r, c, v] : mk) v = -v;
          add_retr(tz, mk);
          fold_entries(tz);
          cn.terms.push_back(tz);
          cn.rhs = target.real();
          p.add_constraint(cn);
        }
        {
          sdp::Constraint cn;
          sdp::BlockTerm tz{zb, {}};
          std::vector<std::tuple<int, int, cplx>> mk = k;
          for (auto& [r, c, v] : mk) v = v * cplx(0.0, 1.0);
          add_retr(tz, mk);
          fold_entries(tz);
          cn.terms.push_back(tz);
          cn.rhs = target.imag();
          p.add_constraint(cn);
        }
      }
  }

  // Tr over the output factor of each diagonal corner stays below t I.
  for (int half = 0; half < 2; ++half) {
    const int sblk = half == 0 ? s0 : s1;
    const int tblk = half == 0 ? t0 : t1;
    auto idx = [&](int pp, int ii) { return half == 0 ? top(pp, ii) : bot(pp, ii); };
    for (int pp = 0; pp < b; ++pp)
      for (int qq = pp; qq < b; ++qq) {
        {
          sdp::Constraint cn;
          sdp::BlockTerm tz{zb, {}};
          std::vector<std::tuple<int, int, cplx>> k;
          for (int i = 0; i < a; ++i) k.emplace_back(idx(pp, i), idx(qq, i), cplx(1.0, 0.0));
          add_retr(tz, k);
          fold_entries(tz);
          cn.terms.push_back(tz);
          sdp::BlockTerm ts{sblk, {}};
          add_retr(ts, {{pp, qq, cplx(1.0, 0.0)}});
          cn.terms.push_back(ts);
          if (pp == qq) cn.terms.push_back({tblk, {{0, 0, cplx(-1.0, 0.0)}}});
          cn.rhs = 0.0;
          p.add_constraint(cn);
        }
        if (pp != qq) {
          sdp::Constraint cn;
          sdp::BlockTerm tz{zb, {}};
          std::vector<std::tuple<int, int, cplx>> k;
          for (int i = 0; i < a; ++i) k.emplace_back(idx(pp, i), idx(qq, i), cplx(0.0, 1.0));
          add_retr(tz, k);
          fold_entries(tz);
          cn.terms.push_back(tz);
          sdp::BlockTerm ts{sblk, {}};
          add_retr(ts, {{pp, qq, cplx(0.0, 1.0)}});
          cn.terms.push_back(ts);
          cn.rhs = 0.0;
          p.add_constraint(cn);
        }
      }
  }

  p.objective.push_back({t0, {{0, 0, cplx(0.5, 0.0)}}});
  p.objective.push_back({t1, {{0, 0, cplx(0.5, 0.0)}}});

  sdp::SolveOptions opts;
  if (base_opts) opts = *base_opts;
  opts.tol = tol_eff;
  if (opts.max_iter < 200000) opts.max_iter = 200000;
  auto sol = sdp::solve(p, opts);
  out.value = sol.primal_objective * scale;
  out.certified = sol.status == sdp::SolveStatus::optimal ? CbNormResult::Kind::exact
                                                          : CbNormResult::Kind::lower_bound;
  out.solver_gap = sol.gap;
  out.solver_residual = std::max(sol.primal_residual, sol.dual_residual);
  out.iterations = sol.iterations;
  // corner of Z carries -J(G^*); hand the norm-attaining extension back
  CMat corner(ab, ab);
  for (int r = 0; r < ab; ++r)
    for (int c = 0; c < ab; ++c) corner(r, c) = sol.X[zb](r, ab + c) * scale;
  out.witness = corner;
  return out;
}

CbNormResult cb_norm(const SystemMap& f, double tol) {
  MapData d = map_data(f);
  return cb_norm_values(d.basis, d.values, d.a, d.b, tol);
}

namespace {

struct AscentData {
  std::vector<CMat> e_on;  // HS-orthonormal basis of E
  std::vector<CMat> v_on;  // matching images
  int a = 0, b = 0;
  bool full_domain = false;
};

AscentData ascent_data(const SystemMap& f) {
  AscentData d;
  d.a = f.domain->ambient_dim();
  d.b = f.codomain->ambient_dim();
  const double rt = std::sqrt(static_cast<double>(d.a));
  for (int m = 0; m < f.domain->dim(); ++m) {
    const double w = (m == 0) ? 1.0 / rt : 1.0;
    d.e_on.push_back(mat::scale(f.domain->basis[m], w));
    d.v_on.push_back(mat::scale(f.image_of_basis(m), w));
  }
  d.full_domain = f.domain->dim() == d.a * d.a;
  return d;
}

CMat assemble(const AscentData& d, int r, const std::vector<cplx>& w) {
  const int a = d.a;
  CMat x(r * a, r * a);
  const int nm = static_cast<int>(d.e_on.size());
  for (int al = 0; al < r; ++al)
    for (int be = 0; be < r; ++be)
      for (int m = 0; m < nm; ++m) {
        const cplx c = w[(al * r + be) * nm + m];
        if (c == cplx(0.0, 0.0)) continue;
        for (int i = 0; i < a; ++i)
          for (int j = 0; j < a; ++j)
            x(al * a + i, be * a + j) += c * d.e_on[m](i, j);
      }
  return x;
}

CMat apply_amp(const AscentData& d, int r, const std::vector<cplx>& w) {
  const int b = d.b;
  CMat y(r * b, r * b);
  const int nm = static_cast<int>(d.e_on.size());
  for (int al = 0; al < r; ++al)
    for (int be = 0; be < r; ++be)
      for (int m = 0; m < nm; ++m) {
        const cplx c = w[(al * r + be) * nm + m];
        if (c == cplx(0.0, 0.0)) continue;
        for (int i = 0; i < b; ++i)
          for (int j = 0; j < b; ++j)
            y(al * b + i, be * b + j) += c * d.v_on[m](i, j);
      }
  return y;
}

std::vector<cplx> coords_of_amp(const AscentData& d, int r, const CMat& x) {
  const int a = d.a;
  const int nm = static_cast<int>(d.e_on.size());
  std::vector<cplx> w(static_cast<size_t>(r) * r * nm);
  for (int al = 0; al < r; ++al)
    for (int be = 0; be < r; ++be)
      for (int m = 0; m < nm; ++m) {
        cplx ip = 0.0;
        for (int i = 0; i < a; ++i)
          for (int j = 0; j < a; ++j)
            ip += std::conj(d.e_on[m](i, j)) * x(al * a + i, be * a + j);
        w[(al * r + be) * nm + m] = ip;
      }
  return w;
}

void clip_to_ball(const AscentData& d, int r, std::vector<cplx>& w) {
  const CMat x = assemble(d, r, w);
  const double nrm = mat::operator_norm(x);
  if (nrm > 1.0)
    for (auto& v : w) v /= nrm;
}

}  // namespace

double cb_lower_ascent(const SystemMap& f, int level, int starts, int iters, uint64_t seed) {
  AscentData d = ascent_data(f);
  const int r = level;
  const int nm = static_cast<int>(d.e_on.size());
  Rng rng(seed);
  double best = 0.0;

  for (int s = 0; s < starts; ++s) {
    std::vector<cplx> w(static_cast<size_t>(r) * r * nm);
    for (auto& v : w) v = rng.cgauss();
    clip_to_ball(d, r, w);
    double cur = mat::operator_norm(apply_amp(d, r, w));
    double step = 0.3;

    for (int it = 0; it < iters; ++it) {
      const CMat y = apply_amp(d, r, w);
      auto sv = mat::svd(y);
      // top singular pair
      CMat u(r * d.b, 1), vv(r * d.b, 1);
      for (int i = 0; i < r * d.b; ++i) {
        u(i, 0) = sv.u(i, 0);
        vv(i, 0) = sv.v(i, 0);
      }
      // linearized objective coefficients gamma_m(al,be) = u_al^* v_m v_be
      std::vector<cplx> gamma(static_cast<size_t>(r) * r * nm);
      for (int al = 0; al < r; ++al)
        for (int be = 0; be < r; ++be)
          for (int m = 0; m < nm; ++m) {
            cplx g = 0.0;
            for (int i = 0; i < d.b; ++i)
              for (int j = 0; j < d.b; ++j)
                g += std::conj(u(al * d.b + i, 0)) * d.v_on[m](i, j) * vv(be * d.b + j, 0);
            gamma[(al * r + be) * nm + m] = g;
          }

      if (d.full_domain) {
        // exact linear maximization over the ball: polar factor of the
        // gradient matrix sum_m conj(gamma_m) e_m per block
        std::vector<cplx> gw(gamma.size());
        for (size_t i = 0; i < gamma.size(); ++i) gw[i] = std::conj(gamma[i]);
        const CMat g = assemble(d, r, gw);
        const CMat xnew = mat::polar_unitary(g);
        auto wn = coords_of_amp(d, r, xnew);
        const double val = mat::operator_norm(apply_amp(d, r, wn));
        if (val >= cur - 1e-15) {
          if (val - cur < 1e-13) {
            w = wn;
            cur = std::max(cur, val);
            break;
          }
          w = wn;
          cur = val;
        } else {
          break;
        }
      } else {
        // projected gradient with backtracking
        bool improved = false;
        for (int bt = 0; bt < 25; ++bt) {
          std::vector<cplx> wn = w;
          for (size_t i = 0; i < wn.size(); ++i) wn[i] += step * std::conj(gamma[i]);
          clip_to_ball(d, r, wn);
          const double val = mat::operator_norm(apply_amp(d, r, wn));
          if (val > cur + 1e-15) {
            w = wn;
            cur = val;
            step *= 1.3;
            improved = true;
            break;
          }
          step *= 0.5;
        }
        if (!improved && step < 1e-12) break;
      }
    }
    best = std::max(best, cur);
  }
  return best;
}

UcpCheck is_ucp(const SystemMap& phi, double tol) {
  UcpCheck out;
  const int a = phi.domain->ambient_dim();
  const int b = phi.codomain->ambient_dim();
  const int d = phi.domain->dim();

  if (d == a * a) {  // Choi pinned: spectral test
    ChoiMatrix c = choi(phi);
    const double defect = c.cp_defect();
    const double ur = c.unitality_residual();
    out.residual = std::max(defect, ur);
    out.ucp = out.residual <= tol * 10.0 + 1e-9;
    if (out.ucp) out.extension = c;
    return out;
  }

  sdp::SDPProblem p;
  const int cb_blk = p.add_block(a * b);
  for (int m = 0; m < d; ++m) {
    const CMat v = phi.image_of_basis(m);
    for (int pp = 0; pp < b; ++pp)
      for (int qq = pp; qq < b; ++qq) {
        std::vector<std::tuple<int, int, cplx>> k;
        for (int i = 0; i < a; ++i)
          for (int j = 0; j < a; ++j) {
            const cplx e = phi.domain->basis[m](i, j);
            if (e != cplx(0.0, 0.0))
              k.emplace_back(i * b + pp, j * b + qq, std::conj(e));
          }
        {
          sdp::Constraint cn;
          sdp::BlockTerm t{cb_blk, {}};
          add_retr(t, k);
          fold_entries(t);
          cn.terms.push_back(t);
          cn.rhs = v(pp, qq).real();
          p.add_constraint(cn);
        }
        if (pp != qq) {
          sdp::Constraint cn;
          sdp::BlockTerm t{cb_blk, {}};
          std::vector<std::tuple<int, int, cplx>> ik = k;
          for (auto& [r, c, vv] : ik) vv *= cplx(0.0, 1.0);
          add_retr(t, ik);
          fold_entries(t);
          cn.terms.push_back(t);
          cn.rhs = v(pp, qq).imag();
          p.add_constraint(cn);
        }
      }
  }

  auto sol = sdp::feasibility(p, std::min(tol, 1e-8), 200000);
  if (sol.status == sdp::SolveStatus::infeasible) {
    out.ucp = false;
    out.dual_witness = sol.infeasibility_ray;
    out.residual = 1.0;
    return out;
  }
  auto res = sdp::verify_solution(p, sol.X);
  out.residual = std::max(res.constraint, -res.min_eig);
  out.ucp = sol.status == sdp::SolveStatus::optimal && out.residual <= 10.0 * tol;
  if (out.ucp) {
    ChoiMatrix c;
    c.in_dim = a;
    c.out_dim = b;
    c.matrix = sol.X[cb_blk];
    out.extension = c;
  }
  return out;
}

SystemMap arveson_extend(const SystemMap& phi, double tol) {
  UcpCheck chk = is_ucp(phi, tol);
  if (!chk.ucp)
    throw std::invalid_argument("arveson_extend: map admits no ucp extension (residual " +
                                std::to_string(chk.residual) + ")");
  auto dom = osys::full_system(osys::AmbientAlgebra::full(phi.domain->ambient_dim()));
  auto cod = osys::full_system(osys::AmbientAlgebra::full(phi.codomain->ambient_dim()));
  SystemMap f;
  f.domain = dom;
  f.codomain = cod;
  f.coeffs = CMat(cod->dim(), dom->dim());
  for (int m = 0; m < dom->dim(); ++m) {
    const CMat img = chk.extension->apply(dom->basis[m]);
    const auto cc = cod->coords_of(img, 1e-7);
    for (int i = 0; i < cod->dim(); ++i) f.coeffs(i, m) = cc[i];
  }
  make_exactly_unital(f);
  return f;
}

ReImParts re_im_parts(const SystemMap& f) {
  ReImParts out;
  out.re = f;
  out.im = f;
  for (size_t i = 0; i < f.coeffs.a.size(); ++i) {
    out.re.coeffs.a[i] = cplx(f.coeffs.a[i].real(), 0.0);
    out.im.coeffs.a[i] = cplx(f.coeffs.a[i].imag(), 0.0);
  }
  out.re.refresh_unital();
  out.im.refresh_unital();
  return out;
}

ImBoundCheck im_bound_check(const SystemMap& f, double tol) {
  if (!f.unital) throw std::invalid_argument("im_bound_check: map must be unital");
  ImBoundCheck out;
  auto nf = cb_norm(f, tol);
  out.delta = std::max(0.0, nf.value - 1.0);
  auto parts = re_im_parts(f);
  out.im_cb = cb_norm(parts.im, tol).value;
  out.bound = 4.0 * std::sqrt(out.delta);
  out.certificate =
      Certificate::make("imaginary-function.cb-bound", out.bound, out.im_cb, 10.0 * tol);
  return out;
}

Certificate scalar_im_bound(const SystemMap& phi, const std::vector<double>& x_coords,
                            double tol) {
  if (phi.codomain->ambient_dim() != 1)
    throw std::invalid_argument("scalar_im_bound: functional expected (codomain M_1)");
  if (!phi.unital) throw std::invalid_argument("scalar_im_bound: functional must be unital");
  auto nf = cb_norm(phi, tol);
  const double delta = std::max(0.0, nf.value - 1.0);
  std::vector<cplx> xc(x_coords.begin(), x_coords.end());
  cplx val = 0.0;
  for (int m = 0; m < phi.domain->dim(); ++m) val += phi.coeffs(0, m) * xc[m];
  const double xnorm = osys::element_norm(*phi.domain, xc);
  const double bound = 2.0 * std::sqrt(delta) * xnorm;
  return Certificate::make("imaginary-functional.bound", bound, std::abs(val.imag()),
                           10.0 * tol);
}

CpJordanSplit cp_jordan_split(const SystemMap& phi) {
  if (!phi.self_adjoint(1e-10))
    throw std::invalid_argument("cp_jordan_split: map must be hermitian-preserving");
  ChoiMatrix c = choi(phi);
  auto js = mat::jordan_split(c.matrix);
  CpJordanSplit out;
  out.cp_pos = {c.in_dim, c.out_dim, js.pos};
  out.cp_neg = {c.in_dim, c.out_dim, js.neg};
  return out;
}

UcpNearestResult ucp_nearest(const SystemMap& f, double tol) {
  if (!f.unital) throw std::invalid_argument("ucp_nearest: map must be unital");
  const int a = f.domain->ambient_dim();
  const int b = f.codomain->ambient_dim();
  const int d = f.domain->dim();
  MapData md = map_data(f);

  const int ab = a * b;
  sdp::SDPProblem p;
  const int zb = p.add_block(2 * ab);
  const int psi_blk = p.add_block(ab);
  const int s0 = p.add_block(b);
  const int s1 = p.add_block(b);
  const int t0 = p.add_block(1);
  const int t1 = p.add_block(1);

  auto top = [a](int pp, int ii) { return pp * a + ii; };
  auto bot = [a, ab](int qq, int jj) { return ab + qq * a + jj; };

  // G(e_m) + Psi(e_m) = f(e_m) with G read off the corner of Z and Psi from
  // its extension Choi matrix.
  for (int m = 0; m < d; ++m) {
    for (int pp = 0; pp < b; ++pp)
      for (int qq = 0; qq < b; ++qq) {
        std::vector<std::tuple<int, int, cplx>> kz, kp;
        for (int i = 0; i < a; ++i)
          for (int j = 0; j < a; ++j) {
            const cplx e = md.basis[m](i, j);
            if (e == cplx(0.0, 0.0)) continue;
            kz.emplace_back(top(pp, i), bot(qq, j), e);
            kp.emplace_back(i * b + pp, j * b + qq, std::conj(e));
          }
        const cplx target = md.values[m](pp, qq);
        {
          sdp::Constraint cn;
          sdp::BlockTerm tz{zb, {}};
          std::vector<std::tuple<int, int, cplx>> mk = kz;
          for (auto& [r, c, v] : mk) v = -v;
          add_retr(tz, mk);
          fold_entries(tz);
          cn.terms.push_back(tz);
          sdp::BlockTerm tp{psi_blk, {}};
          add_retr(tp, kp);
          fold_entries(tp);
          cn.terms.push_back(tp);
          cn.rhs = target.real();
          p.add_constraint(cn);
        }
        {
          sdp::Constraint cn;
          sdp::BlockTerm tz{zb, {}};
          std::vector<std::tuple<int, int, cplx>> mk = kz;
          for (auto& [r, c, v] : mk) v *= cplx(0.0, 1.0);
          add_retr(tz, mk);
          fold_entries(tz);
          cn.terms.push_back(tz);
          sdp::BlockTerm tp{psi_blk, {}};
          std::vector<std::tuple<int, int, cplx>> ik = kp;
          for (auto& [r, c, v] : ik) v *= cplx(0.0, 1.0);
          add_retr(tp, ik);
          fold_entries(tp);
          cn.terms.push_back(tp);
          cn.rhs = target.imag();
          p.add_constraint(cn);
        }
      }
  }

  // Psi unital: Tr over the input factor of its Choi equals I_b.
  for (int pp = 0; pp < b; ++pp)
    for (int qq = pp; qq < b; ++qq) {
      {
        sdp::Constraint cn;
        sdp::BlockTerm t{psi_blk, {}};
        std::vector<std::tuple<int, int, cplx>> k;
        for (int i = 0; i < a; ++i) k.emplace_back(i * b + pp, i * b + qq, cplx(1.0, 0.0));
        add_retr(t, k);
        fold_entries(t);
        cn.terms.push_back(t);
        cn.rhs = (pp == qq) ? 1.0 : 0.0;
        p.add_constraint(cn);
      }
      if (pp != qq) {
        sdp::Constraint cn;
        sdp::BlockTerm t{psi_blk, {}};
        std::vector<std::tuple<int, int, cplx>> k;
        for (int i = 0; i < a; ++i) k.emplace_back(i * b + pp, i * b + qq, cplx(0.0, 1.0));
        add_retr(t, k);
        fold_entries(t);
        cn.terms.push_back(t);
        cn.rhs = 0.0;
        p.add_constraint(cn);
      }
    }

  // slack rows: Tr_out of the diagonal corners of Z dominated by t I
  for (int half = 0; half < 2; ++half) {
    const int sblk = half == 0 ? s0 : s1;
    const int tblk = half == 0 ? t0 : t1;
    auto idx = [&](int pp, int ii) { return half == 0 ? top(pp, ii) : bot(pp, ii); };
    for (int pp = 0; pp < b; ++pp)
      for (int qq = pp; qq < b; ++qq) {
        {
          sdp::Constraint cn;
          sdp::BlockTerm tz{zb, {}};
          std::vector<std::tuple<int, int, cplx>> k;
          for (int i = 0; i < a; ++i) k.emplace_back(idx(pp, i), idx(qq, i), cplx(1.0, 0.0));
          add_retr(tz, k);
          fold_entries(tz);
          cn.terms.push_back(tz);
          sdp::BlockTerm ts{sblk, {}};
          add_retr(ts, {{pp, qq, cplx(1.0, 0.0)}});
          cn.terms.push_back(ts);
          if (pp == qq) cn.terms.push_back({tblk, {{0, 0, cplx(-1.0, 0.0)}}});
          cn.rhs = 0.0;
          p.add_constraint(cn);
        }
        if (pp != qq) {
          sdp::Constraint cn;
          sdp::BlockTerm tz{zb, {}};
          std::vector<std::tuple<int, int, cplx>> k;
          for (int i = 0; i < a; ++i) k.emplace_back(idx(pp, i), idx(qq, i), cplx(0.0, 1.0));
          add_retr(tz, k);
          fold_entries(tz);
          cn.terms.push_back(tz);
          sdp::BlockTerm ts{sblk, {}};
          add_retr(ts, {{pp, qq, cplx(0.0, 1.0)}});
          cn.terms.push_back(ts);
          cn.rhs = 0.0;
          p.add_constraint(cn);
        }
      }
  }

  p.objective.push_back({t0, {{0, 0, cplx(0.5, 0.0)}}});
  p.objective.push_back({t1, {{0, 0, cplx(0.5, 0.0)}}});

  sdp::SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = 200000;
  auto sol = sdp::solve(p, opts);
  if (sol.status == sdp::SolveStatus::infeasible)
    throw std::runtime_error("ucp_nearest: feasibility lost (unexpected)");

  UcpNearestResult out;
  out.distance = std::max(0.0, sol.primal_objective);

  ChoiMatrix cpsi;
  cpsi.in_dim = a;
  cpsi.out_dim = b;
  cpsi.matrix = sol.X[psi_blk];
  auto dom_full = osys::full_system(osys::AmbientAlgebra::full(a));
  SystemMap ext;
  ext.domain = dom_full;
  ext.codomain = osys::full_system(osys::AmbientAlgebra::full(b));
  ext.coeffs = CMat(ext.codomain->dim(), dom_full->dim());
  for (int m = 0; m < dom_full->dim(); ++m) {
    const CMat img = cpsi.apply(dom_full->basis[m]);
    const auto cc = ext.codomain->coords_of(img, 1e-6);
    for (int i = 0; i < ext.codomain->dim(); ++i) ext.coeffs(i, m) = cc[i];
  }
  make_exactly_unital(ext);
  out.extension = ext;

  // psi = extension restricted to E, expressed on E's basis
  SystemMap psi;
  psi.domain = f.domain;
  psi.codomain = f.codomain;
  psi.coeffs = CMat(f.codomain->dim(), d);
  for (int m = 0; m < d; ++m) {
    const CMat img = cpsi.apply(md.basis[m]);
    const auto cc = f.codomain->coords_of(img, 1e-6);
    for (int i = 0; i < f.codomain->dim(); ++i) psi.coeffs(i, m) = cc[i];
  }
  make_exactly_unital(psi);
  out.psi = psi;

  auto nf = cb_norm(f, tol);
  out.delta = std::max(0.0, nf.value - 1.0);
  out.in_hypothesis = out.delta <= 1.0;
  const double bound = 20.0 * (d + 1) * std::sqrt(out.delta);
  out.certificate =
      Certificate::make("perturbation.ucp-distance", bound, out.distance, 10.0 * tol);
  if (!out.in_hypothesis) out.certificate.claim_id += ".out-of-range";
  return out;
}

double effros_functional_norm(const SystemMap& cp_deficit, double tol) {
  const int a = cp_deficit.domain->ambient_dim();
  const int b = cp_deficit.codomain->ambient_dim();
  const int d = cp_deficit.domain->dim();
  MapData md = map_data(cp_deficit);

  sdp::SDPProblem p;
  const int cb_blk = p.add_block(a * b);  // Choi of a CP extension of theta - phi2
  const int wb = p.add_block(2 * a);      // [[A, W],[W^*, B]] for the representer of theta

  // theta(e_m) = tr(e_m^* W) must be real: Im tr(e_m^* W) = 0.
  for (int m = 0; m < d; ++m) {
    sdp::Constraint cn;
    sdp::BlockTerm t{wb, {}};
    std::vector<std::tuple<int, int, cplx>> k;
    for (int r = 0; r < a; ++r)
      for (int c = 0; c < a; ++c) {
        const cplx e = md.basis[m](r, c);
        if (e != cplx(0.0, 0.0)) k.emplace_back(r, a + c, e * cplx(0.0, 1.0));
      }
    add_retr(t, k);
    fold_entries(t);
    cn.terms.push_back(t);
    cn.rhs = 0.0;
    p.add_constraint(cn);
  }

  // C agrees with theta(.) 1_b - phi2 on E.
  for (int m = 0; m < d; ++m) {
    for (int pp = 0; pp < b; ++pp)
      for (int qq = pp; qq < b; ++qq) {
        std::vector<std::tuple<int, int, cplx>> kc;
        for (int i = 0; i < a; ++i)
          for (int j = 0; j < a; ++j) {
            const cplx e = md.basis[m](i, j);
            if (e != cplx(0.0, 0.0)) kc.emplace_back(i * b + pp, j * b + qq, std::conj(e));
          }
        {
          sdp::Constraint cn;
          sdp::BlockTerm t{cb_blk, {}};
          add_retr(t, kc);
          fold_entries(t);
          cn.terms.push_back(t);
          if (pp == qq) {
            sdp::BlockTerm tw{wb, {}};
            std::vector<std::tuple<int, int, cplx>> kw;
            for (int r = 0; r < a; ++r)
              for (int c = 0; c < a; ++c) {
                const cplx e = md.basis[m](r, c);
                if (e != cplx(0.0, 0.0)) kw.emplace_back(r, a + c, -e);
              }
            add_retr(tw, kw);
            fold_entries(tw);
            cn.terms.push_back(tw);
          }
          cn.rhs = -md.values[m](pp, qq).real();
          p.add_constraint(cn);
        }
        if (pp != qq) {
          sdp::Constraint cn;
          sdp::BlockTerm t{cb_blk, {}};
          std::vector<std::tuple<int, int, cplx>> ik = kc;
          for (auto& [r, c, v] : ik) v *= cplx(0.0, 1.0);
          add_retr(t, ik);
          fold_entries(t);
          cn.terms.push_back(t);
          cn.rhs = -md.values[m](pp, qq).imag();
          p.add_constraint(cn);
        }
      }
  }

  sdp::BlockTerm obj{wb, {}};
  for (int i = 0; i < 2 * a; ++i) obj.entries.push_back({i, i, cplx(0.5, 0.0)});
  p.objective.push_back(obj);

  sdp::SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = 200000;
  auto sol = sdp::solve(p, opts);
  if (sol.status != sdp::SolveStatus::optimal)
    throw std::runtime_error("effros_functional_norm: solver did not converge");
  return sol.primal_objective;
}

}  // namespace gos::cb
