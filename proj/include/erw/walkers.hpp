#pragma once
// Forward simulators for the multi-dimensional elephant random walk and the
// randomized play-the-winner urn.
//
// Draw order per ERW step (directions stream): one uniform_below(n) picking
// a past step through the direction counts, one uniform01 for keep/switch,
// and when switching with 2d - 1 > 1 alternatives one uniform_below(2d - 1).
// The step size is drawn afterwards from the step-size stream. The first
// step is a single uniform_below(2d), or one uniform01 when a biased first
// step is configured.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "erw/model.hpp"
#include "erw/rng.hpp"

namespace erw {

/// Signed direction index: 2k is +e_k, 2k + 1 is -e_k.
inline std::size_t axis_of(std::size_t dir) { return dir >> 1; }
inline int sign_of(std::size_t dir) { return (dir & 1) ? -1 : 1; }

struct WalkState {
  std::size_t d = 1;
  std::uint64_t n = 0;
  std::vector<std::uint64_t> counts;  // 2d entries, sum = n
  std::vector<std::int64_t> S;
  std::vector<double> T;
  std::vector<double> T_cumsum;
  Engine dir_rng;
  Engine step_rng;

  WalkState(std::size_t dim, Engine directions, Engine steps);
  /// Streams derived from (seed, replicate).
  static WalkState seeded(std::size_t dim, std::uint64_t seed,
                          std::uint64_t replicate);
};

struct StepOutcome {
  std::size_t direction;
  double z;
};

/// Direction of step n + 1 given the counts after n steps. Pure apart from
/// the engine, so a frozen history can be resampled repeatedly.
std::size_t sample_direction(std::span<const std::uint64_t> counts,
                             std::uint64_t n, double p, Engine& e,
                             std::optional<double> first_plus = std::nullopt);

/// Advances the walk by one step with memory parameter p_next.
StepOutcome erw_step(WalkState& state, double p_next,
                     const StepSizeModel& steps,
                     std::optional<double> first_plus = std::nullopt);

/// Checkpointed trajectory. Vector fields are flattened checkpoint-major:
/// value k of checkpoint j sits at j * d + k.
struct WalkPath {
  std::size_t d = 1;
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::int64_t> S;
  std::vector<double> T;
  std::vector<double> C;
  std::vector<std::int64_t> W;   // RPW only
  std::vector<std::int64_t> NA;  // RPW only
};

WalkPath simulate_walk(const WalkConfig& config, std::uint64_t replicate);

/// Reference walker that stores the whole step history. The past step is
/// the r-th entry in (direction, time) order for the same r the counts
/// walker draws, so both consume identical draws.
WalkPath simulate_walk_history(const WalkConfig& config,
                               std::uint64_t replicate);

/// Replicate-major batch: value k of checkpoint j of replicate r sits at
/// (r * checkpoints + j) * d + k.
struct WalkBatch {
  std::size_t d = 1;
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t replicates = 0;
  bool has_W = false;
  std::vector<std::int64_t> S;
  std::vector<double> T;
  std::vector<double> C;
  std::vector<std::int64_t> W;
  std::vector<std::int64_t> NA;

  std::size_t at(std::uint64_t rep, std::size_t cp, std::size_t k = 0) const {
    return (static_cast<std::size_t>(rep) * checkpoints.size() + cp) * d + k;
  }
  std::size_t at_scalar(std::uint64_t rep, std::size_t cp) const {
    return static_cast<std::size_t>(rep) * checkpoints.size() + cp;
  }
};

WalkBatch simulate_batch(const WalkConfig& config, unsigned workers);

struct RpwConfig {
  double pA = 0.5;
  double pB = 0.5;
  std::uint64_t W0 = 0;
  std::uint64_t B0 = 0;
  double p0 = 1.0;
  std::uint64_t horizon = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicates = 1;
  std::vector<std::uint64_t> checkpoints;

  double qA() const { return 1.0 - pA; }
  double qB() const { return 1.0 - pB; }
  std::uint64_t alpha0() const { return W0 + B0; }
  double v() const { return qB() / (qA() + qB()); }
  double rho() const { return pA + pB - 1.0; }

  void validate() const;
};

/// Urn path: W counts white balls including W0; NA counts draws assigned
/// to treatment A. Draw order per step (urn stream): uniform_below(W + B)
/// picks the ball (uniform01 < p0 on an empty urn), then uniform01 decides
/// the response.
WalkPath simulate_rpw(const RpwConfig& config, std::uint64_t replicate);

WalkBatch simulate_rpw_batch(const RpwConfig& config, unsigned workers);

struct BiasedErw {
  std::vector<std::int64_t> S;
  /// False when W0, B0, p0 are not (0, 0, 1), where the equality in law
  /// with the elephant walk does not hold.
  bool valid;
};

BiasedErw rpw_as_biased_erw(std::span<const std::int64_t> W,
                            std::span<const std::uint64_t> times,
                            const RpwConfig& config);

}  // namespace erw
