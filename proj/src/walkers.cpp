#include "erw/walkers.hpp"

#include <algorithm>
#include <sstream>

#include "erw/parallel.hpp"

namespace erw {

namespace {

// Branch-free scan over the cumulative counts: the result is the number of
// prefix sums not exceeding r, i.e. the direction owning the r-th past step.
inline std::size_t pick_past(const std::uint64_t* counts, std::size_t m,
                             std::uint64_t n, Engine& e) {
  const std::uint64_t r = uniform_below(e, n);
  std::size_t dir = 0;
  std::uint64_t acc = 0;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    acc += counts[j];
    dir += static_cast<std::size_t>(r >= acc);
  }
  return dir;
}

inline std::size_t switch_target(std::size_t dir, std::size_t m, Engine& e) {
  if (m == 2) return dir ^ 1u;
  const auto j = static_cast<std::size_t>(uniform_below(e, m - 1));
  return j < dir ? j : j + 1;
}

inline std::size_t first_direction(std::size_t m, Engine& e,
                                   const std::optional<double>& first_plus) {
  if (first_plus) return uniform01(e) < *first_plus ? 0 : 1;
  return static_cast<std::size_t>(uniform_below(e, m));
}

inline std::size_t direction_core(const std::uint64_t* counts, std::size_t m,
                                  std::uint64_t n, double p, Engine& e,
                                  const std::optional<double>& first_plus) {
  if (n == 0) return first_direction(m, e, first_plus);
  const std::size_t dir = pick_past(counts, m, n, e);
  const bool keep = uniform01(e) < p;
  if (m == 2) return dir ^ static_cast<std::size_t>(!keep);
  return keep ? dir : switch_target(dir, m, e);
}

inline void apply_step(WalkState& s, std::size_t dir, double z) {
  ++s.counts[dir];
  const std::size_t k = axis_of(dir);
  const int sg = sign_of(dir);
  s.S[k] += sg;
  s.T[k] += sg * z;
  for (std::size_t i = 0; i < s.d; ++i) s.T_cumsum[i] += s.T[i];
  ++s.n;
}

void record(WalkPath& path, const WalkState& s) {
  const double inv = 1.0 / static_cast<double>(s.n);
  for (std::size_t k = 0; k < s.d; ++k) {
    path.S.push_back(s.S[k]);
    path.T.push_back(s.T[k]);
    path.C.push_back(s.T_cumsum[k] * inv);
  }
}

void validate_checkpoints(const std::vector<std::uint64_t>& cps,
                          std::uint64_t horizon) {
  if (cps.empty()) throw ModelError("checkpoints must be nonempty");
  if (cps.front() == 0) throw ModelError("checkpoints must be positive times");
  for (std::size_t i = 1; i < cps.size(); ++i)
    if (cps[i] <= cps[i - 1])
      throw ModelError("checkpoints must be strictly increasing");
  if (cps.back() > horizon)
    throw ModelError("last checkpoint exceeds the horizon");
}

}  // namespace

WalkState::WalkState(std::size_t dim, Engine directions, Engine steps)
    : d(dim),
      counts(2 * dim, 0),
      S(dim, 0),
      T(dim, 0.0),
      T_cumsum(dim, 0.0),
      dir_rng(std::move(directions)),
      step_rng(std::move(steps)) {
  if (dim == 0) throw ModelError("dimension d must be >= 1");
}

WalkState WalkState::seeded(std::size_t dim, std::uint64_t seed,
                            std::uint64_t replicate) {
  return WalkState(dim, make_stream(seed, replicate, Substream::directions),
                   make_stream(seed, replicate, Substream::step_sizes));
}

std::size_t sample_direction(std::span<const std::uint64_t> counts,
                             std::uint64_t n, double p, Engine& e,
                             std::optional<double> first_plus) {
  return direction_core(counts.data(), counts.size(), n, p, e, first_plus);
}

StepOutcome erw_step(WalkState& state, double p_next,
                     const StepSizeModel& steps,
                     std::optional<double> first_plus) {
  const std::size_t dir =
      direction_core(state.counts.data(), state.counts.size(), state.n,
                     p_next, state.dir_rng, first_plus);
  const double z = steps.sample(state.step_rng);
  apply_step(state, dir, z);
  return {dir, z};
}

namespace {

// Register-resident kernel for small fixed dimensions. Consumes exactly the
// same draws as erw_step.
template <std::size_t D>
void run_fixed(WalkState& s, const WalkConfig& config, WalkPath& path) {
  constexpr std::size_t M = 2 * D;
  std::uint64_t counts[M];
  std::int64_t S[D];
  double T[D], Tc[D];
  for (std::size_t j = 0; j < M; ++j) counts[j] = s.counts[j];
  for (std::size_t k = 0; k < D; ++k) {
    S[k] = s.S[k];
    T[k] = s.T[k];
    Tc[k] = s.T_cumsum[k];
  }
  const bool const_p = config.schedule.is_constant();
  const double p = config.schedule.limit();
  const bool const_z = config.steps.is_constant();
  const double zc = config.steps.mean();
  const auto& cps = config.checkpoints;
  const std::uint64_t last = cps.back();
  std::size_t next_cp = 0;
  Engine de = s.dir_rng;
  Engine se = s.step_rng;
  std::uint64_t n = s.n;
  std::uint64_t next_time = cps[next_cp];

  while (n < last) {
    std::size_t dir;
    if (n == 0) {
      dir = first_direction(M, de, config.first_step_plus);
    } else {
      const double pn = const_p ? p : config.schedule.p_at(n + 1);
      dir = pick_past(counts, M, n, de);
      const bool keep = uniform01(de) < pn;
      if constexpr (M == 2) {
        dir ^= static_cast<std::size_t>(!keep);
      } else {
        if (!keep) dir = switch_target(dir, M, de);
      }
    }
    const double z = const_z ? zc : config.steps.sample(se);
    ++counts[dir];
    const std::size_t k = axis_of(dir);
    const double sg = 1.0 - 2.0 * static_cast<double>(dir & 1u);
    S[k] += 1 - 2 * static_cast<std::int64_t>(dir & 1u);
    T[k] += sg * z;
    for (std::size_t i = 0; i < D; ++i) Tc[i] += T[i];
    ++n;
    if (n == next_time) {
      const double inv = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < D; ++i) {
        path.S.push_back(S[i]);
        path.T.push_back(T[i]);
        path.C.push_back(Tc[i] * inv);
      }
      ++next_cp;
      next_time = next_cp < cps.size() ? cps[next_cp] : 0;
    }
  }
  for (std::size_t j = 0; j < M; ++j) s.counts[j] = counts[j];
  for (std::size_t i = 0; i < D; ++i) {
    s.S[i] = S[i];
    s.T[i] = T[i];
    s.T_cumsum[i] = Tc[i];
  }
  s.n = n;
  s.dir_rng = de;
  s.step_rng = se;
}

void run_generic(WalkState& s, const WalkConfig& config, WalkPath& path) {
  std::size_t next_cp = 0;
  while (s.n < config.checkpoints.back()) {
    erw_step(s, config.schedule.p_at(s.n + 1), config.steps,
             config.first_step_plus);
    if (s.n == config.checkpoints[next_cp]) {
      record(path, s);
      ++next_cp;
    }
  }
}

}  // namespace

WalkPath simulate_walk(const WalkConfig& config, std::uint64_t replicate) {
  config.validate();
  WalkState s = WalkState::seeded(config.d, config.seed, replicate);
  WalkPath path;
  path.d = config.d;
  path.checkpoints = config.checkpoints;
  path.S.reserve(config.checkpoints.size() * config.d);
  path.T.reserve(config.checkpoints.size() * config.d);
  path.C.reserve(config.checkpoints.size() * config.d);
  switch (config.d) {
    case 1:
      run_fixed<1>(s, config, path);
      break;
    case 2:
      run_fixed<2>(s, config, path);
      break;
    case 3:
      run_fixed<3>(s, config, path);
      break;
    case 4:
      run_fixed<4>(s, config, path);
      break;
    default:
      run_generic(s, config, path);
  }
  return path;
}

WalkPath simulate_walk_history(const WalkConfig& config,
                               std::uint64_t replicate) {
  config.validate();
  const std::size_t m = 2 * config.d;
  Engine dir_rng = make_stream(config.seed, replicate, Substream::directions);
  Engine step_rng = make_stream(config.seed, replicate, Substream::step_sizes);
  std::vector<std::size_t> history;                 // direction at time i+1
  std::vector<std::vector<std::uint64_t>> by_dir(m);  // times per direction
  WalkState s(config.d, Engine{}, Engine{});
  WalkPath path;
  path.d = config.d;
  path.checkpoints = config.checkpoints;
  std::size_t next_cp = 0;

  for (std::uint64_t n = 0; n < config.checkpoints.back(); ++n) {
    std::size_t dir;
    if (n == 0) {
      dir = first_direction(m, dir_rng, config.first_step_plus);
    } else {
      std::uint64_t r = uniform_below(dir_rng, n);
      std::size_t j = 0;
      while (r >= by_dir[j].size()) {
        r -= by_dir[j].size();
        ++j;
      }
      const std::uint64_t beta = by_dir[j][r];
      const std::size_t copied = history[beta - 1];
      dir = uniform01(dir_rng) < config.schedule.p_at(n + 1)
                ? copied
                : switch_target(copied, m, dir_rng);
    }
    const double z = config.steps.sample(step_rng);
    history.push_back(dir);
    by_dir[dir].push_back(n + 1);
    apply_step(s, dir, z);
    if (s.n == config.checkpoints[next_cp]) {
      record(path, s);
      ++next_cp;
    }
  }
  return path;
}

WalkBatch simulate_batch(const WalkConfig& config, unsigned workers) {
  config.validate();
  WalkBatch b;
  b.d = config.d;
  b.checkpoints = config.checkpoints;
  b.replicates = config.replicates;
  const std::size_t per = config.checkpoints.size() * config.d;
  b.S.resize(per * config.replicates);
  b.T.resize(per * config.replicates);
  b.C.resize(per * config.replicates);
  parallel_chunks(config.replicates, workers,
                  [&](std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t r = begin; r < end; ++r) {
                      const WalkPath p = simulate_walk(config, r);
                      std::copy(p.S.begin(), p.S.end(), b.S.begin() + r * per);
                      std::copy(p.T.begin(), p.T.end(), b.T.begin() + r * per);
                      std::copy(p.C.begin(), p.C.end(), b.C.begin() + r * per);
                    }
                  });
  return b;
}

void RpwConfig::validate() const {
  auto prob = [](double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
      std::ostringstream os;
      os << what << " = " << x << " is outside [0, 1]";
      throw ModelError(os.str());
    }
  };
  prob(pA, "pA");
  prob(pB, "pB");
  prob(p0, "p0");
  if (horizon == 0) throw ModelError("horizon must be >= 1");
  if (replicates == 0) throw ModelError("replicates must be >= 1");
  validate_checkpoints(checkpoints, horizon);
}

WalkPath simulate_rpw(const RpwConfig& config, std::uint64_t replicate) {
  config.validate();
  Engine e = make_stream(config.seed, replicate, Substream::urn);
  std::uint64_t white = config.W0;
  std::uint64_t black = config.B0;
  std::int64_t na = 0;
  WalkPath path;
  path.d = 0;
  path.checkpoints = config.checkpoints;
  path.W.reserve(config.checkpoints.size());
  path.NA.reserve(config.checkpoints.size());
  std::size_t next_cp = 0;
  for (std::uint64_t n = 0; n < config.checkpoints.back(); ++n) {
    const std::uint64_t total = white + black;
    const bool draw_white = total == 0 ? uniform01(e) < config.p0
                                       : uniform_below(e, total) < white;
    if (draw_white) {
      ++na;
      if (uniform01(e) < config.pA) ++white; else ++black;
    } else {
      if (uniform01(e) < config.pB) ++black; else ++white;
    }
    if (n + 1 == config.checkpoints[next_cp]) {
      path.W.push_back(static_cast<std::int64_t>(white));
      path.NA.push_back(na);
      ++next_cp;
    }
  }
  return path;
}

WalkBatch simulate_rpw_batch(const RpwConfig& config, unsigned workers) {
  config.validate();
  WalkBatch b;
  b.d = 0;
  b.checkpoints = config.checkpoints;
  b.replicates = config.replicates;
  b.has_W = true;
  const std::size_t per = config.checkpoints.size();
  b.W.resize(per * config.replicates);
  b.NA.resize(per * config.replicates);
  parallel_chunks(config.replicates, workers,
                  [&](std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t r = begin; r < end; ++r) {
                      const WalkPath p = simulate_rpw(config, r);
                      std::copy(p.W.begin(), p.W.end(), b.W.begin() + r * per);
                      std::copy(p.NA.begin(), p.NA.end(),
                                b.NA.begin() + r * per);
                    }
                  });
  return b;
}

BiasedErw rpw_as_biased_erw(std::span<const std::int64_t> W,
                            std::span<const std::uint64_t> times,
                            const RpwConfig& config) {
  if (W.size() != times.size())
    throw ModelError("W series and times differ in length");
  BiasedErw out;
  out.valid = config.W0 == 0 && config.B0 == 0 && config.p0 == 1.0;
  out.S.reserve(W.size());
  for (std::size_t i = 0; i < W.size(); ++i)
    out.S.push_back(2 * W[i] - static_cast<std::int64_t>(times[i]));
  return out;
}

}  // namespace erw
