#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gos/certify.hpp"
#include "gos/matrix.hpp"
#include "gos/rng.hpp"

namespace gos::osys {

using mat::CMat;
using mat::cplx;

/// Block matrix algebra: a single entry n means M_n, k equal entries n mean
/// the infinity-sum of k copies of M_n. Elements are block-diagonal matrices
/// of total dimension sum(block_dims).
struct AmbientAlgebra {
  std::vector<int> block_dims;

  AmbientAlgebra() = default;
  explicit AmbientAlgebra(std::vector<int> dims) : block_dims(std::move(dims)) {}
  static AmbientAlgebra full(int n) { return AmbientAlgebra({n}); }
  static AmbientAlgebra inf_sum(int copies, int n) {
    return AmbientAlgebra(std::vector<int>(copies, n));
  }

  int total_dim() const {
    int t = 0;
    for (int d : block_dims) t += d;
    return t;
  }
  bool operator==(const AmbientAlgebra& o) const { return block_dims == o.block_dims; }

  CMat identity_matrix() const { return mat::identity(total_dim()); }
  bool contains(const CMat& m, double tol = 1e-10) const;
  /// Zero out entries off the block-diagonal support.
  CMat project(const CMat& m) const;
  CMat block(const CMat& m, int index) const;
  CMat embed_block(const CMat& b, int index) const;
};

/// Concrete operator system: the span of a Hermitian basis inside a block
/// matrix algebra, basis[0] = identity. The remaining basis elements are
/// trace-orthonormal and trace-orthogonal to the identity, which makes
/// coordinates a pair of inner products.
struct OperatorSystem {
  AmbientAlgebra ambient;
  std::vector<CMat> basis;
  std::vector<std::string> log;  // dropped/absorbed generators, etc.

  int dim() const { return static_cast<int>(basis.size()); }
  int ambient_dim() const { return ambient.total_dim(); }

  CMat element(const std::vector<cplx>& coords) const;
  CMat element_real(const std::vector<double>& coords) const;
  /// Coordinates of an ambient matrix lying in the span (residual checked).
  std::vector<cplx> coords_of(const CMat& x, double tol = 1e-8) const;
  bool contains(const CMat& x, double tol = 1e-8) const;

  void validate() const;  // throws on broken invariants
};

using SystemPtr = std::shared_ptr<const OperatorSystem>;

SystemPtr make_system(OperatorSystem sys);

/// span({1} u A u A*) with a deterministic modified Gram-Schmidt basis.
SystemPtr system_span(const AmbientAlgebra& ambient, const std::vector<CMat>& generators,
                      double dedup_tol = 1e-9);

/// The full matrix algebra M_n (or a block algebra) as an operator system.
SystemPtr full_system(const AmbientAlgebra& ambient);
SystemPtr trivial_system(const AmbientAlgebra& ambient);  // C * identity

bool same_system(const OperatorSystem& a, const OperatorSystem& b, double tol = 1e-9);

/// Linear map between systems, stored on the Hermitian bases. Self-adjoint
/// maps have real coefficient matrices; complex coefficients encode the
/// non-self-adjoint maps needed for the imaginary-part estimates.
struct SystemMap {
  SystemPtr domain;
  SystemPtr codomain;
  CMat coeffs;  // codomain.dim x domain.dim
  bool unital = false;

  CMat apply(const CMat& x, double tol = 1e-8) const;  // ambient in, ambient out
  CMat image_of_basis(int m) const;
  bool self_adjoint(double tol = 1e-10) const;
  void refresh_unital(double tol = 1e-10);
};

SystemMap identity_map(const SystemPtr& sys);
SystemMap inclusion_map(const SystemPtr& sub, const SystemPtr& super, double tol = 1e-8);
SystemMap compose(const SystemMap& g, const SystemMap& f);
SystemMap restrict_map(const SystemMap& f, const SystemPtr& sub, double tol = 1e-8);
SystemMap subtract(const SystemMap& f, const SystemMap& g);
SystemMap add_maps(const SystemMap& f, const SystemMap& g);
SystemMap scale_map(const SystemMap& f, cplx s);

/// Span of the images of the domain basis, as a system (unit first). Fails
/// if the map is not unital within tol.
SystemPtr image_system(const SystemMap& f, double tol = 1e-8);

/// Same map with the codomain shrunk to its image system.
SystemMap corestrict(const SystemMap& f, double tol = 1e-8);

/// Inverse of an injective map, as a map from image_system(f) back onto the
/// domain. Throws on rank deficiency.
SystemMap inverse_map(const SystemMap& f, double cond_cap = 1e8);

/// Build the map determined by unit -> unit, a_i -> b_i on span({1} u a u a*).
/// Returns nothing when the correspondence is not a well-defined linear map.
std::optional<SystemMap> map_from_tuples(const SystemPtr& dom_span,
                                         const std::vector<CMat>& a,
                                         const SystemPtr& cod,
                                         const std::vector<CMat>& b,
                                         double tol = 1e-8);

/// Matricial norm of an element given by coordinates; level r reads coords
/// as an r x r grid of coordinate vectors assembled in M_r(X).
double element_norm(const OperatorSystem& sys, const std::vector<cplx>& coords);
double element_norm_level(const OperatorSystem& sys, int level,
                          const std::vector<std::vector<cplx>>& grid);
CMat assemble_level(const OperatorSystem& sys, int level,
                    const std::vector<std::vector<cplx>>& grid);

/// Norm through the order-unit picture: bisection on t in [[tI, x],[x*, tI]] >= 0.
double norm_via_positivity(const OperatorSystem& sys, const std::vector<cplx>& coords,
                           double tol = 1e-8);

/// Dual basis data: functionals a_i' with a_i'(a_j) = delta_ij represented by
/// trace-pairing matrices, with certified dual-norm brackets.
struct DualBasis {
  std::vector<CMat> representers;       // tr(W_i^* x) = coord_i(x) on the system
  std::vector<double> norm_lower;       // sampled + ascended
  std::vector<double> norm_upper;       // minimal trace-norm extension (SDP)
  std::vector<double> basis_norms;      // operator norms of the basis elements
};
DualBasis dual_basis(const OperatorSystem& sys, int samples = 2000, uint64_t seed = 7,
                     double cond_cap = 1e8);

/// Exact norm of the functional with prescribed values on the system basis
/// (minimal trace-norm ambient representer, one small SDP).
double functional_norm_exact(const OperatorSystem& sys, const std::vector<cplx>& targets,
                             double tol = 1e-9);

struct AuerbachConstant {
  double lower = 0.0;
  double upper = 0.0;
};
AuerbachConstant auerbach_constant(const OperatorSystem& sys, int samples = 2000,
                                   uint64_t seed = 7);

/// Sampled check of the matricial norm axioms (scalar compressions and the
/// direct-sum max identity). `norm_fn` is injectable so corrupted norm tables
/// can be exercised as a negative control.
using LevelNormFn = double (*)(const OperatorSystem&, int,
                               const std::vector<std::vector<cplx>>&);
Certificate ruan_check(const OperatorSystem& sys, int samples, uint64_t seed,
                       LevelNormFn norm_fn = nullptr);

}  // namespace gos::osys
