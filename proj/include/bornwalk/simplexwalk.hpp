#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "bornwalk/simplex_point.hpp"

namespace bornwalk {

/// Symmetric transfer of min(a_i, a_j, h) between a uniformly chosen pair of
/// positive coordinates.
struct PairTransfer {
  double h = 0.1;  // in (0, 0.5]
};

/// Draw D ~ Dirichlet(gamma * a) on the active face (mean a) and move along
/// u = D - a. With probability beta the move is to the boundary: forward to
/// the face at a + t_f u or backward to the face at a - t_b u. Otherwise it
/// is local: forward onto D or backward by min(1, t_b). The forward
/// probability is s_b/(s_f+s_b), so the expected displacement is zero.
/// Coordinates that limit a face-reaching move are zeroed exactly.
struct DirichletMix {
  double gamma = 4.0;  // > 0
  double beta = 0.5;   // in (0, 1]
};

using WalkKernel = std::variant<PairTransfer, DirichletMix>;

/// Throws ConfigInvalid when kernel parameters are out of range.
void validate(const WalkKernel& kernel);

/// "pair:0.1" or "dirichlet:4,0.5".
WalkKernel parse_kernel(const std::string& text);
std::string to_string(const WalkKernel& kernel);

using Rng = std::mt19937_64;

/// Engine for a walk seed. The seed is spread over the engine state with
/// std::seed_seq so nearby seeds give unrelated streams.
Rng make_rng(std::uint64_t seed);

/// Seed of walk `index` in an ensemble: splitmix64 of the master seed
/// advanced by (index + 1) golden-ratio increments. Depends only on
/// (master_seed, index), so any partition of walks over threads agrees.
std::uint64_t derive_walk_seed(std::uint64_t master_seed, std::uint64_t index);

/// One kernel step. Zero coordinates stay exactly zero; when a single
/// positive coordinate remains it is set to exactly 1. Throws NoActivePair
/// if fewer than two coordinates are positive.
SimplexPoint step(const SimplexPoint& a, const WalkKernel& kernel, Rng& rng);

/// In-place step on raw coordinates; same contract as step().
void step_inplace(std::vector<double>& a, const WalkKernel& kernel, Rng& rng);

struct WalkRun {
  std::uint64_t seed = 0;
  SimplexPoint start{{1.0}};
  std::uint64_t steps_taken = 0;
  std::optional<std::size_t> absorbed_at;  // 1-based vertex
  SimplexPoint final_point{{1.0}};
  /// (step number, point) samples: the start, every thin-th step, and the
  /// final point. Empty when thinning is disabled.
  std::vector<std::pair<std::uint64_t, SimplexPoint>> path;
};

inline constexpr std::uint64_t kDefaultMaxSteps = 1'000'000;

/// Steps until absorption or max_steps. thin = 0 records no path.
WalkRun run_walk(const SimplexPoint& start, const WalkKernel& kernel, std::uint64_t seed,
                 std::uint64_t max_steps = kDefaultMaxSteps, std::uint64_t thin = 0);

struct EnsembleOptions {
  std::uint64_t count = 1000;
  std::uint64_t master_seed = 0;
  std::uint64_t max_steps = kDefaultMaxSteps;
  unsigned threads = 1;  // 0 = hardware concurrency
  /// Fail with TooManyUnabsorbed above this unabsorbed fraction.
  double max_unabsorbed_fraction = 0.01;
};

struct EnsembleResult {
  SimplexPoint start{{1.0}};
  std::uint64_t count = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> counts;  // per vertex
  std::vector<double> freq;           // counts / absorbed
  std::uint64_t unabsorbed = 0;
  std::uint64_t total_steps = 0;
  std::optional<double> chi2;
  std::optional<double> p_value;
  std::string chi2_skipped;  // reason when the test is undefined
};

EnsembleResult ensemble(const SimplexPoint& start, const WalkKernel& kernel,
                        const EnsembleOptions& options);

}  // namespace bornwalk
