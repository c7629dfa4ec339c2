#pragma once

// Necessary rank-maximality under top-k preferences.

#include "necmatch/core.hpp"

#include <optional>
#include <vector>

namespace necmatch {

/// Agents S, objects T and forbidden pairs F within S x T.
struct SigOptQuery {
  std::vector<AgentId> agents;
  std::vector<ObjectId> objects;
  std::vector<Pair> forbidden;

  /// (N, O, {}) for an n-instance.
  static SigOptQuery whole(std::size_t n);
  /// (N \ {a}, O \ {o}, {}).
  static SigOptQuery without(std::size_t n, AgentId a, ObjectId o);
  /// (N, O, {(a, o)}).
  static SigOptQuery forbidding(std::size_t n, AgentId a, ObjectId o);
};

struct SigOptResult {
  Signature signature;
  Matching witness;
};

/// Best signature any matching in M(S, T, F) reaches under any completion of
/// P, with a matching that attains it.
SigOptResult sig_opt(const TopKProfile& p, const SigOptQuery& q);

bool check_nrm(const TopKProfile& p, const Matching& m);

std::optional<Matching> exists_nrm(const TopKProfile& p);

/// Rank-maximal under every completion, by enumeration. Refuses n > 6 or
/// more than 10^6 completions.
bool brute_force_nrm_check(const TopKProfile& p, const Matching& m);

} // namespace necmatch
