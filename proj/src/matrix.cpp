#include "gos/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gos::mat {

CMat zeros(int r, int c) { return CMat(r, c); }

CMat identity(int n) {
  CMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat adjoint(const CMat& m) {
  CMat r(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r(j, i) = std::conj(m(i, j));
  return r;
}

CMat transpose(const CMat& m) {
  CMat r(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r(j, i) = m(i, j);
  return r;
}

CMat conj(const CMat& m) {
  CMat r = m;
  for (auto& v : r.a) v = std::conj(v);
  return r;
}

static void check_same_shape(const CMat& x, const CMat& y, const char* op) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

CMat add(const CMat& x, const CMat& y) {
  check_same_shape(x, y, "add");
  CMat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}

CMat sub(const CMat& x, const CMat& y) {
  check_same_shape(x, y, "sub");
  CMat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
  return r;
}

CMat scale(const CMat& x, cplx s) {
  CMat r = x;
  for (auto& v : r.a) v *= s;
  return r;
}

CMat mul(const CMat& x, const CMat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mul: inner dimension mismatch");
  CMat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int k = 0; k < x.cols; ++k) {
      const cplx xv = x(i, k);
      if (xv == cplx(0.0, 0.0)) continue;
      const cplx* yrow = &y.a[static_cast<size_t>(k) * y.cols];
      cplx* rrow = &r.a[static_cast<size_t>(i) * r.cols];
      for (int j = 0; j < y.cols; ++j) rrow[j] += xv * yrow[j];
    }
  }
  return r;
}

CMat kron(const CMat& x, const CMat& y) {
  CMat r(x.rows * y.rows, x.cols * y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) {
      const cplx xv = x(i, j);
      if (xv == cplx(0.0, 0.0)) continue;
      for (int p = 0; p < y.rows; ++p)
        for (int q = 0; q < y.cols; ++q)
          r(i * y.rows + p, j * y.cols + q) = xv * y(p, q);
    }
  return r;
}

CMat direct_sum(const std::vector<CMat>& blocks) {
  int rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows;
    cols += b.cols;
  }
  CMat r(rows, cols);
  int ro = 0, co = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.rows; ++i)
      for (int j = 0; j < b.cols; ++j) r(ro + i, co + j) = b(i, j);
    ro += b.rows;
    co += b.cols;
  }
  return r;
}

CMat partial_trace(const CMat& m, int n, int k, TraceSide side) {
  if (m.rows != n * k || m.cols != n * k)
    throw std::invalid_argument("partial_trace: dimension mismatch");
  if (side == TraceSide::second) {
    CMat r(n, n);
    for (int i = 0; i < n; ++i)
      for (int ip = 0; ip < n; ++ip) {
        cplx s = 0.0;
        for (int j = 0; j < k; ++j) s += m(i * k + j, ip * k + j);
        r(i, ip) = s;
      }
    return r;
  }
  CMat r(k, k);
  for (int j = 0; j < k; ++j)
    for (int jp = 0; jp < k; ++jp) {
      cplx s = 0.0;
      for (int i = 0; i < n; ++i) s += m(i * k + j, i * k + jp);
      r(j, jp) = s;
    }
  return r;
}

cplx trace(const CMat& m) {
  cplx s = 0.0;
  for (int i = 0; i < std::min(m.rows, m.cols); ++i) s += m(i, i);
  return s;
}

double frob_norm(const CMat& m) {
  double s = 0.0;
  for (const auto& v : m.a) s += std::norm(v);
  return std::sqrt(s);
}

double max_abs(const CMat& m) {
  double s = 0.0;
  for (const auto& v : m.a) s = std::max(s, std::abs(v));
  return s;
}

bool all_finite(const CMat& m) {
  for (const auto& v : m.a)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

double hs_inner(const CMat& x, const CMat& y) {
  check_same_shape(x, y, "hs_inner");
  double s = 0.0;
  for (size_t i = 0; i < x.a.size(); ++i)
    s += x.a[i].real() * y.a[i].real() + x.a[i].imag() * y.a[i].imag();
  return s;
}

double herm_deviation(const CMat& m) {
  if (!m.square()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (int i = 0; i < m.rows; ++i)
    for (int j = i; j < m.cols; ++j)
      d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
  return d;
}

bool is_hermitian(const CMat& m, double tol) { return m.square() && herm_deviation(m) <= tol; }

CMat hermitize(const CMat& m) {
  CMat r(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return r;
}

namespace {

double offdiag_norm(const CMat& h) {
  double s = 0.0;
  for (int i = 0; i < h.rows; ++i)
    for (int j = 0; j < h.cols; ++j)
      if (i != j) s += std::norm(h(i, j));
  return std::sqrt(s);
}

// One two-sided rotation zeroing h(p,q). Returns the 2x2 unitary acting on
// coordinates (p,q) so h <- R^* h R also updates the accumulated basis.
void jacobi_rotate(CMat& h, CMat& v, int p, int q) {
  const cplx hpq = h(p, q);
  const double apq = std::abs(hpq);
  if (apq == 0.0) return;
  const double app = h(p, p).real();
  const double aqq = h(q, q).real();
  const cplx phase = hpq / apq;

  const double tau = (aqq - app) / (2.0 * apq);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  // R = [[c, s*phase], [-s*conj(phase), c]] diagonalizes the 2x2 pivot.
  const cplx rpq = s * phase;
  const cplx rqp = -s * std::conj(phase);

  const int n = h.rows;
  for (int k = 0; k < n; ++k) {  // columns: h <- h R
    const cplx hk_p = h(k, p);
    const cplx hk_q = h(k, q);
    h(k, p) = hk_p * c + hk_q * rqp;
    h(k, q) = hk_p * rpq + hk_q * c;
  }
  for (int k = 0; k < n; ++k) {  // rows: h <- R^* h
    const cplx hp_k = h(p, k);
    const cplx hq_k = h(q, k);
    h(p, k) = std::conj(c) * hp_k + std::conj(rqp) * hq_k;
    h(q, k) = std::conj(rpq) * hp_k + std::conj(c) * hq_k;
  }
  h(p, q) = 0.0;
  h(q, p) = 0.0;
  h(p, p) = cplx(h(p, p).real(), 0.0);
  h(q, q) = cplx(h(q, q).real(), 0.0);
  for (int k = 0; k < n; ++k) {
    const cplx vk_p = v(k, p);
    const cplx vk_q = v(k, q);
    v(k, p) = vk_p * c + vk_q * rqp;
    v(k, q) = vk_p * rpq + vk_q * c;
  }
}

}  // namespace

EigResult herm_eig(const CMat& h0, const CMat* guess, int max_sweeps) {
  if (!h0.square()) throw std::invalid_argument("herm_eig: square matrix required");
  const int n = h0.rows;
  EigResult res;
  if (n == 0) {
    res.vectors = CMat(0, 0);
    return res;
  }

  CMat h = hermitize(h0);
  CMat v = identity(n);
  if (guess && guess->rows == n && guess->cols == n) {
    // Pre-rotate by the supplied basis; cheap when h is near a previously
    // diagonalized matrix.
    h = mul(mul(adjoint(*guess), h), *guess);
    h = hermitize(h);
    v = *guess;
  }

  const double scale0 = std::max(frob_norm(h), 1e-300);
  const double stop = 1e-14 * scale0;
  int sweep = 0;
  double off = offdiag_norm(h);
  while (off > stop && sweep < max_sweeps) {
    const double thresh = (sweep < 3) ? off / (n * n) : 0.0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q)
        if (std::abs(h(p, q)) > thresh) jacobi_rotate(h, v, p, q);
    off = offdiag_norm(h);
    ++sweep;
  }
  if (off > 1e-10 * scale0)
    throw NumericFailure("herm_eig: Jacobi sweeps did not converge", off);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = h(i, i).real();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return diag[a] < diag[b]; });

  res.values.resize(n);
  res.vectors = CMat(n, n);
  for (int j = 0; j < n; ++j) {
    res.values[j] = diag[order[j]];
    for (int i = 0; i < n; ++i) res.vectors(i, j) = v(i, order[j]);
  }
  res.sweeps = sweep;
  res.offdiag = off;
  return res;
}

double operator_norm(const CMat& m) {
  if (m.empty()) return 0.0;
  // sqrt of the top eigenvalue of m^* m (the smaller Gram side).
  const CMat g = (m.rows >= m.cols) ? mul(adjoint(m), m) : mul(m, adjoint(m));
  EigResult e = herm_eig(g);
  const double top = e.values.empty() ? 0.0 : std::max(0.0, e.values.back());
  return std::sqrt(top);
}

JordanSplit jordan_split(const CMat& h) {
  EigResult e = herm_eig(h);
  const int n = h.rows;
  CMat pos(n, n), neg(n, n);
  for (int k = 0; k < n; ++k) {
    const double lam = e.values[k];
    if (lam == 0.0) continue;
    CMat& dst = (lam > 0.0) ? pos : neg;
    const double w = std::abs(lam);
    for (int i = 0; i < n; ++i) {
      const cplx vi = e.vectors(i, k);
      if (vi == cplx(0.0, 0.0)) continue;
      for (int j = 0; j < n; ++j) dst(i, j) += w * vi * std::conj(e.vectors(j, k));
    }
  }
  return {pos, neg};
}

CMat psd_projection(const CMat& h) { return jordan_split(h).pos; }

double min_eig(const CMat& h) {
  EigResult e = herm_eig(h);
  return e.values.empty() ? 0.0 : e.values.front();
}

SvdResult svd(const CMat& m) {
  // Right singular vectors from m^* m, left ones by applying m; zero
  // directions completed deterministically by Gram-Schmidt over the
  // standard basis.
  const CMat g = mul(adjoint(m), m);
  EigResult e = herm_eig(g);
  const int r = m.rows, c = m.cols;
  SvdResult out;
  out.v = CMat(c, c);
  out.s.assign(std::min(r, c), 0.0);
  std::vector<int> desc(c);
  std::iota(desc.begin(), desc.end(), 0);
  std::reverse(desc.begin(), desc.end());
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < c; ++i) out.v(i, j) = e.vectors(i, desc[j]);

  const CMat w = mul(m, out.v);
  out.u = CMat(r, r);
  const double scale = std::max(1.0, frob_norm(m));
  int filled = 0;
  for (int j = 0; j < std::min(r, c); ++j) {
    double nj = 0.0;
    for (int i = 0; i < r; ++i) nj += std::norm(w(i, j));
    nj = std::sqrt(nj);
    out.s[j] = nj;
    if (nj > 1e-13 * scale) {
      for (int i = 0; i < r; ++i) out.u(i, j) = w(i, j) / nj;
      filled = j + 1;
    }
  }
  // Complete the left factor to a unitary.
  for (int j = filled; j < r; ++j) {
    for (int cand = 0; cand < r + filled + 1; ++cand) {
      CMat col(r, 1);
      col(cand % r, 0) = 1.0;
      for (int k = 0; k < j; ++k) {
        cplx ip = 0.0;
        for (int i = 0; i < r; ++i) ip += std::conj(out.u(i, k)) * col(i, 0);
        for (int i = 0; i < r; ++i) col(i, 0) -= ip * out.u(i, k);
      }
      const double nn = frob_norm(col);
      if (nn > 1e-8) {
        for (int i = 0; i < r; ++i) out.u(i, j) = col(i, 0) / nn;
        break;
      }
    }
  }
  return out;
}

CMat polar_unitary(const CMat& m) {
  SvdResult s = svd(m);
  // u (r x r), v (c x c): return the r x c partial isometry u_{1:min} v^*.
  const int k = std::min(m.rows, m.cols);
  CMat uk(m.rows, k), vk(m.cols, k);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < k; ++j) uk(i, j) = s.u(i, j);
  for (int i = 0; i < m.cols; ++i)
    for (int j = 0; j < k; ++j) vk(i, j) = s.v(i, j);
  return mul(uk, adjoint(vk));
}

CMat solve_hermitian(const CMat& h, const CMat& rhs, double reg) {
  EigResult e = herm_eig(h);
  const int n = h.rows;
  const double floor_val = std::max(reg, 1e-14 * (std::abs(e.values.back()) + 1.0));
  // x = V f(D) V^* rhs with f = 1/max(lambda, floor)
  CMat tmp = mul(adjoint(e.vectors), rhs);
  for (int i = 0; i < n; ++i) {
    const double lam = std::abs(e.values[i]) < floor_val ? floor_val : e.values[i];
    for (int j = 0; j < tmp.cols; ++j) tmp(i, j) /= lam;
  }
  return mul(e.vectors, tmp);
}

}  // namespace gos::mat
