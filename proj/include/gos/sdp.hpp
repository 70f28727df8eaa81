#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gos/matrix.hpp"

namespace gos::sdp {

using mat::CMat;
using mat::cplx;

/// One Hermitian coefficient entry at (r,c), r <= c; the (c,r) entry is the
/// implied conjugate. Diagonal entries must have zero imaginary part.
struct CEntry {
  int r = 0;
  int c = 0;
  cplx v;
};

struct BlockTerm {
  int block = 0;
  std::vector<CEntry> entries;
};

/// <A_i, X> = b_i with A_i Hermitian per block and the real pairing
/// Re tr(A^* X). All problems in this repo are equality-constrained over a
/// tuple of PSD blocks.
struct Constraint {
  std::vector<BlockTerm> terms;
  double rhs = 0.0;
};

struct SDPProblem {
  std::vector<int> block_dims;
  std::vector<BlockTerm> objective;  // <C, X>, minimized unless maximize set
  std::vector<Constraint> constraints;
  bool maximize = false;

  int add_block(int dim) {
    block_dims.push_back(dim);
    return static_cast<int>(block_dims.size()) - 1;
  }
  void add_constraint(Constraint c) { constraints.push_back(std::move(c)); }

  // Helpers for the two pairing conventions used when pinning entries:
  //   diagonal (r==c):  <A, X> contributes v.re * X_rr
  //   off-diagonal:     entries {(r,c,1)} give 2*Re X_rc,
  //                     entries {(r,c,i)} give 2*Im X_rc.
  void pin_real(int block, int r, int c, double target);
  void pin_imag(int block, int r, int c, double target);
  void pin_entry(int block, int r, int c, cplx target);
};

enum class SolveStatus { optimal, infeasible, max_iter };

struct SDPSolution {
  std::vector<CMat> X;       // primal blocks, PSD up to tolerance
  std::vector<double> y;     // dual multipliers
  std::vector<CMat> S;       // dual slack blocks
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;           // relative primal-dual gap
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  SolveStatus status = SolveStatus::max_iter;
  int iterations = 0;
  std::vector<double> infeasibility_ray;  // Farkas witness when infeasible
  std::string message;
};

struct SolveOptions {
  double tol = 1e-7;
  int max_iter = 50000;
  double mu0 = 1.0;
  int adapt_every = 50;
  double adapt_ratio = 8.0;
  double adapt_factor = 1.5;
  // Infeasibility is declared when the dual iterates drift along a verified
  // improving ray; `infeas_growth` is the configuration knob for the drift
  // ratio test.
  double infeas_growth = 1e4;
  int infeas_window = 400;
  int check_every = 10;
  std::function<void(int iter, double pobj, double dobj, double pres, double dres,
                     bool dual_feasible)>
      callback;
};

/// Operator-splitting solve: alternating projections onto the PSD cone and
/// the affine constraint set with dual updates. Deterministic: identical
/// inputs produce identical iterate sequences.
SDPSolution solve(const SDPProblem& p, const SolveOptions& opts = {});

/// Feasibility variant (zero objective). Returns a feasible point or an
/// infeasibility certificate.
SDPSolution feasibility(const SDPProblem& p, double tol = 1e-7, int max_iter = 50000);

/// Recompute residuals of a claimed solution from scratch (used by the
/// re-verification tests).
struct Residuals {
  double constraint = 0.0;
  double min_eig = 0.0;
  double objective = 0.0;
};
Residuals verify_solution(const SDPProblem& p, const std::vector<CMat>& X);

/// Checks a Farkas ray: valid when <b,y> > 0 and the reassembled A*(y) is
/// negative semidefinite up to tol. Infeasibility certificates are re-checked
/// through this before being reported.
bool check_infeasibility_ray(const SDPProblem& p, const std::vector<double>& ray,
                             double tol = 1e-7);

}  // namespace gos::sdp
