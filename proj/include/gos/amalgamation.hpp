#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gos/cb_metrics.hpp"
#include "gos/certify.hpp"
#include "gos/opsys.hpp"

namespace gos::amalg {

using mat::CMat;
using mat::cplx;
using osys::SystemMap;
using osys::SystemPtr;

/// How the unital-complete-isometry claims on i and j get certified:
/// `structural` derives a rigorous bound from the Choi spectra of the ucp
/// legs (cheap, used inside builds), `sdp` recomputes both directional cb
/// norms from scratch.
enum class CertifyMode { structural, sdp };

struct AmalgamOptions {
  double tol = 1e-7;
  CertifyMode certify = CertifyMode::structural;
};

struct AmalgamResult {
  SystemPtr target;     // full system on the block-diagonal target algebra
  SystemMap i;          // F0 (full source algebra) -> target
  SystemMap j;          // F1 (codomain system of f) -> target
  SystemMap j_full;     // same construction on the full codomain algebra
  SystemMap phi_ext;    // ucp extension approximating f
  SystemMap psi_ext;    // ucp extension approximating f^{-1}
  double delta = 0.0;   // max(cb(f), cb(f^{-1})) - 1, recomputed
  double dist_forward = 0.0;
  double dist_backward = 0.0;
  double defect = 0.0;  // ||j o f - i|E||_cb, recomputed
  bool in_hypothesis = true;
  Certificate defect_certificate;
  Certificate isometry_certificate_i;
  Certificate isometry_certificate_j;
};

/// Near-amalgamation of matricial systems over E: i(x) = diag(x, phi(x)),
/// j(y) = diag(psi(y), y) into M_{n+k}, defect certified against
/// 100 dim(E) sqrt(delta).
AmalgamResult amalgamate_matricial(const SystemPtr& E, const SystemMap& f,
                                   const AmalgamOptions& opts = {});

/// Block variant: everything happens coordinatewise in infinity-sums of M_n,
/// the target is the coordinate pairing of the two block ambients.
AmalgamResult amalgamate_block(const SystemPtr& E, const SystemMap& f,
                               const AmalgamOptions& opts = {});

/// Joint embedding over the scalars (E = C 1): corner embeddings glued by
/// normalized-trace states, defect exactly zero.
AmalgamResult joint_embed(const SystemPtr& A, const SystemPtr& B,
                          const AmalgamOptions& opts = {});

struct PerturbationMap {
  SystemMap f;
  SystemMap f_inv;
  double delta_hat = 0.0;         // max_i ||a_i - b_i||
  double auerbach = 0.0;          // certified upper N over both tuples
  double correction_bound = 0.0;  // sum_i ||a_i'|| ||b_i - a_i||
  cb::CbNormResult cb_f;
  cb::CbNormResult cb_f_inv;
  Certificate certificate;        // cb norms <= 1 + k N delta_hat
};

/// Small-perturbation argument: the unital map with a_i -> b_i between
/// span({1} u a) and span({1} u b), with certified cb bounds 1 + k N delta.
/// Requires (1, a) and (1, b) to be linear bases of their spans; rejects when
/// the correction bound reaches 1.
PerturbationMap small_perturbation_map(const osys::AmbientAlgebra& ambient,
                                       const std::vector<CMat>& a,
                                       const std::vector<CMat>& b,
                                       double tol = 1e-7, uint64_t seed = 7);

struct FraisseUpper {
  double upper = 0.0;
  int best_trial = -1;
  std::optional<AmalgamResult> witness;
  std::vector<double> trial_values;
  std::vector<std::string> trial_log;
};

/// Upper bound on the amalgamation metric between equal-length tuples:
/// realize budget-many randomized correspondences, embed through the matricial
/// amalgam, measure max_i ||i(a_i) - j(b_i)|| in the target. Never below the
/// true infimum.
FraisseUpper fraisse_distance_upper(const osys::AmbientAlgebra& amb_a,
                                    const std::vector<CMat>& a,
                                    const osys::AmbientAlgebra& amb_b,
                                    const std::vector<CMat>& b, int budget,
                                    uint64_t seed = 11, double tol = 1e-7);

/// Finite distance table of an approximate isometry; +inf entries are
/// "no constraint".
struct DistTable {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;  // row-major

  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  static DistTable graph_of(const std::vector<int>& image, int cols);
};

/// (psi phi)(a,d) = min_b phi(a,b) + psi(b,d).
DistTable compose_approximate_isometry(const DistTable& phi, const DistTable& psi);

struct ChainStage {
  int matrix_dim = 0;           // n_k
  SystemPtr stage_system;       // full system on M_{n_k}
  SystemMap tracker;            // i_k : E_k -> M_{n_k}
  std::optional<SystemMap> connective;  // phi_{k-1} : M_{n_{k-1}} -> M_{n_k}
  std::vector<Certificate> certificates;
};

struct EmbeddingChain {
  std::vector<ChainStage> stages;
  bool all_passed() const {
    for (const auto& s : stages)
      for (const auto& c : s.certificates)
        if (!c.passed) return false;
    return true;
  }
};

/// Inductive-limit surrogate: stages M_{n_k} with connectives diag(z, alpha(z))
/// and trackers i_k, budgets 2^{-k} for the compatibility defects and
/// (50 dim E_k)^{-2} 2^{-2k} for the inverse norms.
EmbeddingChain nuclear_chain(const std::vector<SystemPtr>& systems, double tol = 1e-7);

}  // namespace gos::amalg
