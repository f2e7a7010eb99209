#include "embeval/offsets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace embeval {

using linalg::Vec;

namespace {

Vec unit_offset(std::span<const float> start, std::span<const float> end) {
  Vec diff(start.size());
  for (std::size_t i = 0; i < start.size(); ++i) {
    diff[i] = static_cast<double>(end[i]) - static_cast<double>(start[i]);
  }
  return linalg::unit(std::span<const double>(diff));
}

void require_usable(const ResolvedRelation& resolved) {
  if (!resolved.usable()) {
    throw std::invalid_argument(
        "relation \"" + resolved.name + "\" has " +
        std::to_string(resolved.size()) + " resolved pairs; metrics need >= " +
        std::to_string(kMinUsablePairs));
  }
}

}  // namespace

OffsetSet build_offsets(const ResolvedRelation& resolved) {
  require_usable(resolved);
  OffsetSet set;
  set.kind = OffsetKind::True;
  set.offsets.reserve(resolved.size());
  set.sources.reserve(resolved.size());
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    set.offsets.push_back(unit_offset(resolved.start_vec(i), resolved.end_vec(i)));
    set.sources.push_back({resolved.pairs[i].start, resolved.pairs[i].end});
  }
  return set;
}

SimilaritySample pairwise_sims(const OffsetSet& offsets) {
  const std::size_t n = offsets.size();
  if (n < 2) {
    throw std::invalid_argument("pairwise similarities need >= 2 offsets, have " +
                                std::to_string(n));
  }
  SimilaritySample sample;
  sample.values.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sample.values.push_back(linalg::clamp_cosine(
          linalg::dot(std::span<const double>(offsets.offsets[i]),
                      std::span<const double>(offsets.offsets[j]))));
    }
  }
  return sample;
}

double ocs(const OffsetSet& offsets) {
  if (offsets.size() < kMinUsablePairs) {
    throw std::invalid_argument("OCS needs >= " + std::to_string(kMinUsablePairs) +
                                " offsets, have " + std::to_string(offsets.size()));
  }
  const SimilaritySample sims = pairwise_sims(offsets);
  const double sum = std::accumulate(sims.values.begin(), sims.values.end(), 0.0);
  return sum / static_cast<double>(sims.values.size());
}

linalg::Vec mean_direction(const OffsetSet& offsets) {
  if (offsets.size() == 0) {
    throw std::invalid_argument("mean direction of an empty offset set");
  }
  Vec sum(offsets.offsets.front().size(), 0.0);
  for (const Vec& o : offsets.offsets) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += o[i];
  }
  if (linalg::norm(std::span<const double>(sum)) < 1e-12) {
    throw std::invalid_argument("degenerate mean direction: offsets cancel exactly");
  }
  return linalg::unit(std::span<const double>(sum));
}

double msm(const OffsetSet& offsets) {
  const std::size_t n = offsets.size();
  if (n == 0) throw std::invalid_argument("MSM of an empty offset set");
  Vec mean(offsets.offsets.front().size(), 0.0);
  for (const Vec& o : offsets.offsets) {
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += o[i];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  return linalg::norm(std::span<const double>(mean));
}

namespace {

// Uniform permutation accepted iff `ok(perm)`; nullopt after max_tries.
template <class Ok>
std::optional<std::vector<std::size_t>> rejection_permutation(Rng& rng, std::size_t n,
                                                              int max_tries, Ok&& ok) {
  for (int t = 0; t < max_tries; ++t) {
    std::vector<std::size_t> perm = rng.permutation(n);
    if (ok(perm)) return perm;
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::size_t> sample_derangement(Rng& rng, std::size_t n, int max_tries) {
  if (n < 2) {
    throw std::invalid_argument("no derangement exists for n = " + std::to_string(n));
  }
  auto perm = rejection_permutation(rng, n, max_tries, [](const auto& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == i) return false;
    }
    return true;
  });
  if (!perm) {
    throw std::runtime_error("no fixed-point-free permutation found in " +
                             std::to_string(max_tries) + " tries");
  }
  return *perm;
}

OffsetSet shuffle_offsets(const ResolvedRelation& resolved, Rng& rng,
                          const PcsConfig& cfg) {
  require_usable(resolved);
  const std::size_t n = resolved.size();

  // avoid true pairs at the end-word string level, so duplicate end words
  // cannot smuggle a true pair back in
  auto no_true_pair = [&](const std::vector<std::size_t>& p) {
    for (std::size_t i = 0; i < n; ++i) {
      if (resolved.pairs[p[i]].end == resolved.pairs[i].end) return false;
    }
    return true;
  };

  OffsetSet set;
  set.kind = OffsetKind::Shuffled;
  auto perm = rejection_permutation(rng, n, cfg.max_rejection_tries, no_true_pair);
  if (!perm) {
    set.constraint_downgraded = true;
    perm = rejection_permutation(rng, n, cfg.max_rejection_tries,
                                 [](const std::vector<std::size_t>& p) {
                                   for (std::size_t i = 0; i < p.size(); ++i) {
                                     if (p[i] == i) return false;
                                   }
                                   return true;
                                 });
    if (!perm) {
      throw std::runtime_error("relation \"" + resolved.name +
                               "\": no admissible shuffle permutation found in " +
                               std::to_string(cfg.max_rejection_tries) + " tries");
    }
  }

  set.offsets.reserve(n);
  set.sources.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto start = resolved.start_vec(i);
    const auto end = resolved.end_vec((*perm)[i]);
    if (resolved.pairs[i].start_row == resolved.pairs[(*perm)[i]].end_row ||
        std::equal(start.begin(), start.end(), end.begin())) {
      ++set.dropped_degenerate;
      continue;
    }
    set.offsets.push_back(unit_offset(start, end));
    set.sources.push_back({resolved.pairs[i].start, resolved.pairs[(*perm)[i]].end});
  }
  return set;
}

double auc(const SimilaritySample& true_sims, const SimilaritySample& shuffled_sims) {
  if (true_sims.values.empty() || shuffled_sims.values.empty()) {
    throw std::invalid_argument("AUC of an empty similarity sample");
  }
  std::vector<double> t = true_sims.values;
  std::vector<double> s = shuffled_sims.values;
  std::sort(t.begin(), t.end());
  std::sort(s.begin(), s.end());
  double wins = 0.0;
  for (double v : t) {
    const auto lo = std::lower_bound(s.begin(), s.end(), v);
    const auto hi = std::upper_bound(lo, s.end(), v);
    wins += static_cast<double>(lo - s.begin());          // strictly below v
    wins += 0.5 * static_cast<double>(hi - lo);           // ties
  }
  return wins / (static_cast<double>(t.size()) * static_cast<double>(s.size()));
}

double pcs(const ResolvedRelation& resolved, const PcsConfig& cfg) {
  require_usable(resolved);
  if (cfg.n_shuffles < 1) {
    throw std::invalid_argument("PCS needs n_shuffles >= 1");
  }
  const SimilaritySample true_sims = pairwise_sims(build_offsets(resolved));
  double sum = 0.0;
  int downgraded = 0;
  for (int k = 0; k < cfg.n_shuffles; ++k) {
    Rng rng(derive_seed(cfg.seed, resolved.name, static_cast<std::uint64_t>(k)));
    const OffsetSet shuffled = shuffle_offsets(resolved, rng, cfg);
    if (shuffled.constraint_downgraded) ++downgraded;
    sum += auc(true_sims, pairwise_sims(shuffled));
  }
  if (downgraded > 0) {
    std::fprintf(stderr,
                 "warning: relation \"%s\": %d/%d shuffles fell back to the "
                 "fixed-point-free constraint\n",
                 resolved.name.c_str(), downgraded, cfg.n_shuffles);
  }
  return sum / static_cast<double>(cfg.n_shuffles);
}

}  // namespace embeval
