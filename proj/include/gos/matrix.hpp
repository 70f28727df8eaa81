#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gos::mat {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Small sizes only (<= a few hundred);
/// everything downstream assumes value semantics and no aliasing tricks.
struct CMat {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> a;

  CMat() = default;
  CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

  cplx& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  const cplx& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

  bool square() const { return rows == cols; }
  bool empty() const { return rows == 0 || cols == 0; }
};

CMat zeros(int r, int c);
CMat identity(int n);
CMat adjoint(const CMat& m);
CMat transpose(const CMat& m);
CMat conj(const CMat& m);
CMat add(const CMat& x, const CMat& y);
CMat sub(const CMat& x, const CMat& y);
CMat scale(const CMat& x, cplx s);
CMat mul(const CMat& x, const CMat& y);
CMat kron(const CMat& x, const CMat& y);
CMat direct_sum(const std::vector<CMat>& blocks);

/// Trace of the first or second tensor factor of an (n*k)x(n*k) matrix laid
/// out as kron(A, B) with A n x n and B k x k.
enum class TraceSide { first, second };
CMat partial_trace(const CMat& m, int n, int k, TraceSide side);

cplx trace(const CMat& m);
double frob_norm(const CMat& m);
double max_abs(const CMat& m);
bool all_finite(const CMat& m);

/// Hilbert-Schmidt pairing Re tr(x^* y); a real inner product on Hermitian
/// matrices and the pairing used for every SDP constraint in this repo.
double hs_inner(const CMat& x, const CMat& y);

double herm_deviation(const CMat& m);
bool is_hermitian(const CMat& m, double tol = 1e-12);
CMat hermitize(const CMat& m);  // (m + m^*)/2

struct EigResult {
  std::vector<double> values;  // ascending
  CMat vectors;                // unitary, columns are eigenvectors
  int sweeps = 0;
  double offdiag = 0.0;  // residual off-diagonal Frobenius norm at exit
};

/// Cyclic Jacobi eigensolver for Hermitian matrices. Deterministic sweep
/// order (row-major over the strict upper triangle). `guess` optionally
/// pre-rotates the input; passing the previous eigenbasis of a nearby matrix
/// makes the sweep count drop to 1-2.
EigResult herm_eig(const CMat& h, const CMat* guess = nullptr, int max_sweeps = 60);

struct NumericFailure : std::runtime_error {
  double residual;
  NumericFailure(const std::string& what, double res)
      : std::runtime_error(what), residual(res) {}
};

/// Largest singular value.
double operator_norm(const CMat& m);

/// Eigenvalue truncation at zero: H = pos - neg, both PSD, pos*neg = 0.
struct JordanSplit {
  CMat pos;
  CMat neg;
};
JordanSplit jordan_split(const CMat& h);
CMat psd_projection(const CMat& h);

double min_eig(const CMat& h);

/// SVD through the Jacobi eigensolver: m = U diag(s) V^*, s descending.
struct SvdResult {
  CMat u;
  CMat v;
  std::vector<double> s;
};
SvdResult svd(const CMat& m);

/// Unitary polar factor (U V^* from the SVD); zero singular directions get a
/// deterministic completion.
CMat polar_unitary(const CMat& m);

CMat solve_hermitian(const CMat& h, const CMat& rhs, double reg = 0.0);

}  // namespace gos::mat
