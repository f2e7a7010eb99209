#include "embeval/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "embeval/rng.hpp"

namespace embeval {

std::string_view to_string(SynthModel model) {
  switch (model) {
    case SynthModel::ParallelOffset: return "parallel";
    case SynthModel::Clustered: return "clustered";
    case SynthModel::Random: return "random";
  }
  return "?";
}

SynthModel synth_model_from_string(std::string_view name) {
  if (name == "parallel") return SynthModel::ParallelOffset;
  if (name == "clustered") return SynthModel::Clustered;
  if (name == "random") return SynthModel::Random;
  throw std::invalid_argument("unknown synthetic model \"" + std::string(name) +
                              "\" (expected parallel|clustered|random)");
}

namespace {

std::vector<double> gaussian_vec(Rng& rng, int dim, double sigma) {
  std::vector<double> v(dim);
  for (double& x : v) x = sigma * rng.gaussian();
  return v;
}

std::vector<double> unit_sphere(Rng& rng, int dim) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> v = gaussian_vec(rng, dim, 1.0);
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (n2 > 1e-24) {
      const double inv = 1.0 / std::sqrt(n2);
      for (double& x : v) x *= inv;
      return v;
    }
  }
  throw std::runtime_error("failed to sample a unit vector");
}

std::vector<float> to_f32(const std::vector<double>& v) {
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

std::string numbered(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04d", prefix, i);
  return buf;
}

bool collapsed(const std::vector<float>& a, const std::vector<float>& b) {
  return std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

SynthResult generate(const SynthSpec& spec) {
  if (spec.n_pairs < 3) throw std::invalid_argument("synth: n_pairs must be >= 3");
  if (spec.dim < 2) throw std::invalid_argument("synth: dim must be >= 2");
  if (spec.noise < 0 || spec.spread < 0 || spec.separation < 0) {
    throw std::invalid_argument("synth: sigma parameters must be >= 0");
  }

  Rng rng(derive_seed(spec.seed, "synth", static_cast<std::uint64_t>(spec.model)));
  const int n_distractors =
      spec.distractors < 0 ? 10 * spec.n_pairs : spec.distractors;

  std::vector<double> direction;   // ParallelOffset common direction
  std::vector<double> center;      // Clustered: starts at -center, ends at +center
  if (spec.model == SynthModel::ParallelOffset) {
    direction = unit_sphere(rng, spec.dim);
  } else if (spec.model == SynthModel::Clustered) {
    center = unit_sphere(rng, spec.dim);
    for (double& x : center) x *= spec.separation;
  }

  SynthResult result{EmbeddingTable(static_cast<std::size_t>(spec.dim), false),
                     Relation{}, 0};
  result.relation.name = std::string("synth-") + std::string(to_string(spec.model));
  result.table.reserve(2 * spec.n_pairs + n_distractors);

  for (int i = 0; i < spec.n_pairs; ++i) {
    std::vector<float> start_row;
    std::vector<float> end_row;
    const int max_resample = 100;
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt >= max_resample) {
        throw std::runtime_error("synth: pair " + std::to_string(i) +
                                 " keeps collapsing to identical vectors");
      }
      std::vector<double> start, end;
      switch (spec.model) {
        case SynthModel::ParallelOffset: {
          start = unit_sphere(rng, spec.dim);
          end = start;
          const std::vector<double> eps = gaussian_vec(rng, spec.dim, spec.noise);
          for (int k = 0; k < spec.dim; ++k) {
            end[k] += spec.scale * direction[k] + eps[k];
          }
          break;
        }
        case SynthModel::Clustered: {
          start = gaussian_vec(rng, spec.dim, spec.spread);
          end = gaussian_vec(rng, spec.dim, spec.spread);
          for (int k = 0; k < spec.dim; ++k) {
            start[k] -= center[k];
            end[k] += center[k];
          }
          break;
        }
        case SynthModel::Random: {
          start = unit_sphere(rng, spec.dim);
          end = unit_sphere(rng, spec.dim);
          break;
        }
      }
      start_row = to_f32(start);
      end_row = to_f32(end);
      if (!collapsed(start_row, end_row)) break;
      ++result.resampled;
    }
    const std::string start_word = numbered("s", i);
    const std::string end_word = numbered("e", i);
    result.table.push_row(start_word, start_row);
    result.table.push_row(end_word, end_row);
    result.relation.pairs.push_back({start_word, end_word});
  }

  for (int i = 0; i < n_distractors; ++i) {
    result.table.push_row(numbered("w", i), to_f32(unit_sphere(rng, spec.dim)));
  }
  return result;
}

}  // namespace embeval
