#pragma once

#include <cstdint>
#include <string>

namespace gos {

/// Machine-checkable claim attached to every constructed object: a named
/// bound, the value actually measured, and enough provenance (seed, input
/// digest) to regenerate the artifact.
struct Certificate {
  std::string claim_id;
  double claimed_bound = 0.0;
  double computed_value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string inputs_digest;  // fnv1a-64 of the canonical serialized inputs
  uint64_t seed = 0;
  std::string timestamp;  // empty in reproducible builds

  static Certificate make(std::string claim, double bound, double value, double tol,
                          uint64_t seed = 0, std::string digest = "") {
    Certificate c;
    c.claim_id = std::move(claim);
    c.claimed_bound = bound;
    c.computed_value = value;
    c.tolerance = tol;
    c.passed = value <= bound + tol;
    c.seed = seed;
    c.inputs_digest = std::move(digest);
    return c;
  }
};

}  // namespace gos
