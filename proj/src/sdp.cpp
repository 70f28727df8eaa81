#include "gos/sdp.hpp"
#include <cstdio>
#include <cstdlib>

#include <algorithm>
#include <cmath>

namespace gos::sdp {

void SDPProblem::pin_real(int block, int r, int c, double target) {
  Constraint cn;
  if (r == c) {
    cn.terms.push_back({block, {{r, c, cplx(1.0, 0.0)}}});
    cn.rhs = target;
  } else {
    cn.terms.push_back({block, {{r, c, cplx(1.0, 0.0)}}});
    cn.rhs = 2.0 * target;
  }
  add_constraint(std::move(cn));
}

void SDPProblem::pin_imag(int block, int r, int c, double target) {
  if (r == c) throw std::invalid_argument("pin_imag: diagonal entries are real");
  Constraint cn;
  cn.terms.push_back({block, {{r, c, cplx(0.0, 1.0)}}});
  cn.rhs = 2.0 * target;
  add_constraint(std::move(cn));
}

void SDPProblem::pin_entry(int block, int r, int c, cplx target) {
  pin_real(block, r, c, target.real());
  if (r != c) pin_imag(block, r, c, target.imag());
}

namespace {

double pair_term(const BlockTerm& t, const CMat& x) {
  double s = 0.0;
  for (const auto& e : t.entries) {
    if (e.r == e.c) {
      s += e.v.real() * x(e.r, e.r).real();
    } else {
      const cplx xv = x(e.r, e.c);
      s += 2.0 * (e.v.real() * xv.real() + e.v.imag() * xv.imag());
    }
  }
  return s;
}

void axpy_term(const BlockTerm& t, double w, std::vector<CMat>& out) {
  CMat& x = out[t.block];
  for (const auto& e : t.entries) {
    if (e.r == e.c) {
      x(e.r, e.r) += w * e.v.real();
    } else {
      x(e.r, e.c) += w * e.v;
      x(e.c, e.r) += w * std::conj(e.v);
    }
  }
}

double term_norm2(const BlockTerm& t) {
  double s = 0.0;
  for (const auto& e : t.entries) s += (e.r == e.c ? 1.0 : 2.0) * std::norm(e.v);
  return s;
}

double term_dot(const BlockTerm& a, const BlockTerm& b) {
  // Both entry lists are short; quadratic matching is fine.
  double s = 0.0;
  for (const auto& ea : a.entries)
    for (const auto& eb : b.entries)
      if (ea.r == eb.r && ea.c == eb.c)
        s += (ea.r == ea.c ? 1.0 : 2.0) *
             (ea.v.real() * eb.v.real() + ea.v.imag() * eb.v.imag());
  return s;
}

struct Chol {
  int n = 0;
  std::vector<double> l;  // row-major lower triangle, dense
  bool factor(const std::vector<double>& g) {
    l = g;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = l[static_cast<size_t>(i) * n + j];
        for (int k = 0; k < j; ++k)
          s -= l[static_cast<size_t>(i) * n + k] * l[static_cast<size_t>(j) * n + k];
        if (i == j) {
          if (s <= 0.0) return false;
          l[static_cast<size_t>(i) * n + i] = std::sqrt(s);
        } else {
          l[static_cast<size_t>(i) * n + j] = s / l[static_cast<size_t>(j) * n + j];
        }
      }
    }
    return true;
  }
  void solve(std::vector<double>& x) const {
    for (int i = 0; i < n; ++i) {
      double s = x[i];
      for (int k = 0; k < i; ++k) s -= l[static_cast<size_t>(i) * n + k] * x[k];
      x[i] = s / l[static_cast<size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = x[i];
      for (int k = i + 1; k < n; ++k) s -= l[static_cast<size_t>(k) * n + i] * x[k];
      x[i] = s / l[static_cast<size_t>(i) * n + i];
    }
  }
};

struct Workspace {
  const SDPProblem* p = nullptr;
  std::vector<Constraint> cons;    // scaled copies
  std::vector<double> scale;       // per-constraint normalization
  std::vector<double> b;           // scaled rhs
  std::vector<CMat> C;             // objective blocks (sign-adjusted)
  double sign = 1.0;               // +1 minimize, -1 maximize
  Chol gram;

  std::vector<double> apply_A(const std::vector<CMat>& x) const {
    std::vector<double> out(cons.size(), 0.0);
    for (size_t i = 0; i < cons.size(); ++i) {
      double s = 0.0;
      for (const auto& t : cons[i].terms) s += pair_term(t, x[t.block]);
      out[i] = s;
    }
    return out;
  }

  std::vector<CMat> apply_At(const std::vector<double>& y) const {
    std::vector<CMat> out;
    out.reserve(p->block_dims.size());
    for (int d : p->block_dims) out.emplace_back(d, d);
    for (size_t i = 0; i < cons.size(); ++i) {
      if (y[i] == 0.0) continue;
      for (const auto& t : cons[i].terms) axpy_term(t, y[i], out);
    }
    return out;
  }
};

Workspace prepare(const SDPProblem& p) {
  Workspace w;
  w.p = &p;
  w.sign = p.maximize ? -1.0 : 1.0;
  w.C.reserve(p.block_dims.size());
  for (int d : p.block_dims) w.C.emplace_back(d, d);
  for (const auto& t : p.objective) axpy_term(t, w.sign, w.C);

  w.cons = p.constraints;
  w.scale.resize(w.cons.size());
  w.b.resize(w.cons.size());
  for (size_t i = 0; i < w.cons.size(); ++i) {
    double n2 = 0.0;
    for (const auto& t : w.cons[i].terms) n2 += term_norm2(t);
    const double nrm = std::sqrt(std::max(n2, 1e-30));
    w.scale[i] = 1.0 / nrm;
    for (auto& t : w.cons[i].terms)
      for (auto& e : t.entries) e.v *= w.scale[i];
    w.b[i] = w.cons[i].rhs * w.scale[i];
  }

  const int m = static_cast<int>(w.cons.size());
  // Gram matrix of the scaled constraints, grouped per block for sparsity.
  std::vector<double> g(static_cast<size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      double s = 0.0;
      for (const auto& ti : w.cons[i].terms)
        for (const auto& tj : w.cons[j].terms)
          if (ti.block == tj.block) s += term_dot(ti, tj);
      g[static_cast<size_t>(i) * m + j] = s;
      g[static_cast<size_t>(j) * m + i] = s;
    }
  }
  for (int i = 0; i < m; ++i) g[static_cast<size_t>(i) * m + i] += 1e-12;
  if (std::getenv("GOS_SDP_DEBUG")) {
    CMat gm(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) gm(i, j) = g[static_cast<size_t>(i) * m + j];
    auto e = mat::herm_eig(gm);
    std::fprintf(stderr, "[sdp gram] m=%d lambda_min=%.3e lambda_max=%.3e\n", m,
                 e.values.front(), e.values.back());
  }
  w.gram.n = m;
  if (!w.gram.factor(g))
    throw std::runtime_error("sdp: constraint Gram matrix is not positive definite "
                             "(redundant constraints?)");
  return w;
}

double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

bool check_infeasibility_ray(const SDPProblem& p, const std::vector<double>& ray,
                             double tol) {
  if (ray.size() != p.constraints.size()) return false;
  double bty = 0.0;
  for (size_t i = 0; i < ray.size(); ++i) bty += p.constraints[i].rhs * ray[i];
  if (!(bty > tol)) return false;
  std::vector<CMat> aty;
  for (int d : p.block_dims) aty.emplace_back(d, d);
  double scale = 0.0;
  for (size_t i = 0; i < ray.size(); ++i)
    for (const auto& t : p.constraints[i].terms) {
      axpy_term(t, ray[i], aty);
      scale = std::max(scale, std::abs(ray[i]));
    }
  double top = 0.0;
  for (const auto& blk : aty)
    if (blk.rows > 0) {
      mat::EigResult e = mat::herm_eig(blk);
      top = std::max(top, e.values.empty() ? 0.0 : e.values.back());
    }
  // A*(y) must be negative semidefinite (up to tol) while <b,y> > 0.
  return top <= tol * std::max(1.0, scale) + tol;
}

SDPSolution solve(const SDPProblem& p, const SolveOptions& opts) {
  Workspace w = prepare(p);
  const int m = static_cast<int>(w.cons.size());
  const size_t nb = p.block_dims.size();

  std::vector<CMat> X, S, V;
  std::vector<CMat> vcache;  // eigenbasis warm starts per block
  for (int d : p.block_dims) {
    X.emplace_back(d, d);
    S.emplace_back(d, d);
    V.emplace_back(d, d);
    vcache.push_back(mat::identity(d));
  }

  double mu = opts.mu0;
  const double bnorm = vec_norm(w.b);
  double cnorm = 0.0;
  for (const auto& c : w.C) cnorm += mat::frob_norm(c) * mat::frob_norm(c);
  cnorm = std::sqrt(cnorm);

  SDPSolution sol;
  sol.y.assign(m, 0.0);
  std::vector<double> y_prev_window(m, 0.0);
  int window_mark = 0;
  double pres = 1.0, dres = 1.0;

  auto project_psd = [&](int bi) {
    // S = positive part of V, X = -negative part / mu; warm-started Jacobi.
    const CMat& v = V[bi];
    if (v.rows == 0) return;
    if (v.rows == 1) {
      const double val = v(0, 0).real();
      S[bi](0, 0) = std::max(val, 0.0);
      X[bi](0, 0) = std::max(-val, 0.0) / mu;
      return;
    }
    mat::EigResult e = mat::herm_eig(v, &vcache[bi]);
    vcache[bi] = e.vectors;
    const int n = v.rows;
    CMat sp(n, n), xn(n, n);
    for (int k = 0; k < n; ++k) {
      const double lam = e.values[k];
      if (lam == 0.0) continue;
      const double wpos = lam > 0.0 ? lam : 0.0;
      const double wneg = lam < 0.0 ? -lam / mu : 0.0;
      for (int i = 0; i < n; ++i) {
        const cplx vi = e.vectors(i, k);
        if (vi == cplx(0.0, 0.0)) continue;
        for (int j = i; j < n; ++j) {
          const cplx prod = vi * std::conj(e.vectors(j, k));
          if (wpos != 0.0) sp(i, j) += wpos * prod;
          if (wneg != 0.0) xn(i, j) += wneg * prod;
        }
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        sp(j, i) = std::conj(sp(i, j));
        xn(j, i) = std::conj(xn(i, j));
      }
    S[bi] = std::move(sp);
    X[bi] = std::move(xn);
  };

  auto iterate_once = [&]() {
    // dual update: y solves (A A^T) y = -(mu (A(X) - b) + A(S - C))
    std::vector<double> ax = w.apply_A(X);
    std::vector<CMat> smc(nb);
    for (size_t bi = 0; bi < nb; ++bi) smc[bi] = mat::sub(S[bi], w.C[bi]);
    std::vector<double> asmc = w.apply_A(smc);
    std::vector<double> rhs(m);
    for (int i = 0; i < m; ++i) rhs[i] = -(mu * (ax[i] - w.b[i]) + asmc[i]);
    w.gram.solve(rhs);
    sol.y = rhs;

    // splitting step: V = C - A*(y) - mu X, S = V_+, X = V_- / mu
    std::vector<CMat> aty = w.apply_At(sol.y);
    for (size_t bi = 0; bi < nb; ++bi) {
      V[bi] = mat::sub(mat::sub(w.C[bi], aty[bi]), mat::scale(X[bi], mu));
      project_psd(static_cast<int>(bi));
    }
  };

  auto residual_pair = [&]() {
    std::vector<double> ax2 = w.apply_A(X);
    double pr = 0.0;
    for (int i = 0; i < m; ++i) pr += (ax2[i] - w.b[i]) * (ax2[i] - w.b[i]);
    std::vector<CMat> aty2 = w.apply_At(sol.y);
    double dr = 0.0;
    for (size_t bi = 0; bi < nb; ++bi) {
      const CMat resid = mat::sub(mat::add(aty2[bi], S[bi]), w.C[bi]);
      const double fr = mat::frob_norm(resid);
      dr += fr * fr;
    }
    return std::pair<double, double>(std::sqrt(pr) / (1.0 + bnorm),
                                     std::sqrt(dr) / (1.0 + cnorm));
  };

  // Fixed-penalty splitting can crawl when mu sits far from the problem's
  // natural scale; when progress stalls, probe a deterministic mu ladder from
  // the current iterate and keep the best-performing continuation.
  auto probe_mu = [&]() {
    const auto snapX = X;
    const auto snapS = S;
    const auto snapY = sol.y;
    const auto snapV = vcache;
    double best_mu = mu;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<CMat> bestX = X, bestS = S;
    std::vector<double> bestY = sol.y;
    std::vector<CMat> bestV = vcache;
    for (double cand : {mu * 64.0, mu * 8.0, mu, mu / 8.0, mu / 64.0}) {
      cand = std::clamp(cand, 1e-6, 1e6);
      X = snapX;
      S = snapS;
      sol.y = snapY;
      vcache = snapV;
      mu = cand;
      for (int t = 0; t < 300; ++t) iterate_once();
      const auto [pr, dr] = residual_pair();
      const double score = std::max(pr, dr);
      if (std::getenv("GOS_SDP_DEBUG"))
        std::fprintf(stderr, "[sdp probe] mu=%g score=%.3e\n", cand, score);
      if (score < best_score) {
        best_score = score;
        best_mu = cand;
        bestX = X;
        bestS = S;
        bestY = sol.y;
        bestV = vcache;
      }
    }
    X = bestX;
    S = bestS;
    sol.y = bestY;
    vcache = bestV;
    mu = best_mu;
  };

  int it = 0;
  int next_adapt = opts.adapt_every;
  int opts_adapt_stretch = 0;
  int next_probe = 4000;
  double last_probe_score = std::numeric_limits<double>::infinity();
  for (; it < opts.max_iter; ++it) {
    iterate_once();

    if (it % opts.check_every == 0 || it + 1 == opts.max_iter) {
      std::vector<double> ax2 = w.apply_A(X);
      double pr = 0.0;
      for (int i = 0; i < m; ++i) pr += (ax2[i] - w.b[i]) * (ax2[i] - w.b[i]);
      pres = std::sqrt(pr) / (1.0 + bnorm);
      std::vector<CMat> aty2 = w.apply_At(sol.y);
      double dr = 0.0;
      for (size_t bi = 0; bi < nb; ++bi) {
        const CMat resid = mat::sub(mat::add(aty2[bi], S[bi]), w.C[bi]);
        const double f = mat::frob_norm(resid);
        dr += f * f;
      }
      dres = std::sqrt(dr) / (1.0 + cnorm);

      double pobj = 0.0, dobj = 0.0;
      for (size_t bi = 0; bi < nb; ++bi) pobj += mat::hs_inner(w.C[bi], X[bi]);
      for (int i = 0; i < m; ++i) dobj += w.b[i] * sol.y[i];
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

      if (opts.callback)
        opts.callback(it, w.sign * pobj, w.sign * dobj, pres, dres, dres <= 1e-9);

      if (pres <= opts.tol && dres <= opts.tol && gap <= opts.tol) {
        sol.status = SolveStatus::optimal;
        sol.primal_objective = w.sign * pobj;
        sol.dual_objective = w.sign * dobj;
        sol.gap = gap;
        break;
      }

      // Divergence of the alternating sequence: the dual iterates march along
      // a direction; verify it as a Farkas ray before declaring infeasible.
      if (it - window_mark >= opts.infeas_window) {
        std::vector<double> drift(m);
        for (int i = 0; i < m; ++i) drift[i] = sol.y[i] - y_prev_window[i];
        const double dn = vec_norm(drift);
        const double yn = vec_norm(sol.y);
        if (dn > 1e-12 && pres > opts.tol &&
            (yn > opts.infeas_growth * (1.0 + bnorm) || dn > 0.05 * yn)) {
          std::vector<double> ray(m);
          for (int i = 0; i < m; ++i) ray[i] = drift[i] / dn * w.scale[i];
          if (check_infeasibility_ray(p, ray, std::max(opts.tol, 1e-9))) {
            sol.status = SolveStatus::infeasible;
            sol.infeasibility_ray = ray;
            sol.message = "dual improving ray verified";
            break;
          }
        }
        y_prev_window = sol.y;
        window_mark = it;
      }

      if (opts.adapt_every > 0 && it >= next_adapt) {
        next_adapt = it + opts.adapt_every;
        if (pres > opts.adapt_ratio * dres)
          mu = std::max(mu / opts.adapt_factor, 1e-6);
        else if (dres > opts.adapt_ratio * pres)
          mu = std::min(mu * opts.adapt_factor, 1e6);
        // successive adaptations get rarer so the iteration settles into a
        // fixed-penalty regime and cannot limit-cycle
        opts_adapt_stretch = std::min(opts_adapt_stretch + 1, 200);
        next_adapt += opts.adapt_every * opts_adapt_stretch;
      }

      if (it >= next_probe) {
        const double score = std::max(pres, dres);
        const bool stalled =
            !std::isfinite(last_probe_score) || score > 0.01 * last_probe_score;
        if (score > opts.tol && stalled) {
          probe_mu();
          last_probe_score = score;
        }
        next_probe = it + 8000;
      }
    }
  }

  sol.iterations = it;
  sol.primal_residual = pres;
  sol.dual_residual = dres;
  if (sol.status != SolveStatus::infeasible) {
    double pobj = 0.0, dobj = 0.0;
    for (size_t bi = 0; bi < nb; ++bi) pobj += mat::hs_inner(w.C[bi], X[bi]);
    for (int i = 0; i < m; ++i) dobj += w.b[i] * sol.y[i];
    sol.primal_objective = w.sign * pobj;
    sol.dual_objective = w.sign * dobj;
    sol.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (sol.status != SolveStatus::optimal) {
      sol.status = SolveStatus::max_iter;
      sol.message = "iteration cap reached";
    }
  }
  sol.X = X;
  sol.S = S;
  // Report multipliers in the original (unscaled) constraint basis.
  for (int i = 0; i < m; ++i) sol.y[i] *= w.scale[i];
  return sol;
}

SDPSolution feasibility(const SDPProblem& p, double tol, int max_iter) {
  SDPProblem q = p;
  q.objective.clear();
  q.maximize = false;
  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  SDPSolution s = solve(q, opts);
  if (s.status == SolveStatus::optimal) s.message = "feasible point found";
  return s;
}

Residuals verify_solution(const SDPProblem& p, const std::vector<CMat>& X) {
  Residuals r;
  for (const auto& c : p.constraints) {
    double s = 0.0;
    for (const auto& t : c.terms) s += pair_term(t, X[t.block]);
    r.constraint = std::max(r.constraint, std::abs(s - c.rhs));
  }
  r.min_eig = 0.0;
  for (const auto& blk : X)
    if (blk.rows > 0) r.min_eig = std::min(r.min_eig, mat::min_eig(blk));
  for (const auto& t : p.objective) r.objective += pair_term(t, X[t.block]);
  return r;
}

}  // namespace gos::sdp
