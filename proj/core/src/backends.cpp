#include "citegen/backends.hpp"

#include <algorithm>
#include <cmath>

#include "citegen/errors.hpp"

namespace citegen {

std::vector<ScoredCandidate> renormalize(std::vector<ScoredCandidate> scores) {
  if (scores.empty()) throw UsageError("cannot renormalize an empty candidate set");
  double max_lp = scores.front().logprob;
  for (const auto& s : scores) max_lp = std::max(max_lp, s.logprob);
  double sum = 0.0;
  for (const auto& s : scores) sum += std::exp(s.logprob - max_lp);
  double log_z = max_lp + std::log(sum);
  for (auto& s : scores) s.logprob -= log_z;
  return scores;
}

TokenId pick_argmax(const std::vector<ScoredCandidate>& scores) {
  if (scores.empty()) throw UsageError("cannot take argmax of an empty candidate set");
  const ScoredCandidate* best = &scores.front();
  for (const auto& s : scores) {
    if (s.logprob > best->logprob ||
        (s.logprob == best->logprob && s.token_id < best->token_id)) {
      best = &s;
    }
  }
  return best->token_id;
}

}  // namespace citegen
