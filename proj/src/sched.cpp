#include "aircomp/sched.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "aircomp/rng.hpp"

namespace aircomp {

namespace {

std::vector<double> channel_moduli(const ChannelSet& channels) {
  std::vector<double> norms(static_cast<std::size_t>(channels.k_total()));
  for (int k = 0; k < channels.k_total(); ++k) {
    norms[static_cast<std::size_t>(k)] = channels.gains.col(k).norm();
  }
  return norms;
}

std::vector<int> indices_by_modulus_desc(const ChannelSet& channels) {
  const std::vector<double> norms = channel_moduli(channels);
  std::vector<int> order(norms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return norms[static_cast<std::size_t>(a)] > norms[static_cast<std::size_t>(b)];
  });
  return order;
}

/// Grow a subset from `seed_user` by repeatedly adding
/// argmax_i min_{t in subset} |h_t^H h_i|; ties to the lower index.
/// Returns the subset and its running value (the bottleneck of the final
/// addition; +inf when s == 1 and no addition happened).
std::pair<Schedule, double> grow_maximin(const ChannelSet& channels,
                                         int seed_user, int s) {
  const int k_total = channels.k_total();
  Schedule subset;
  subset.users.reserve(static_cast<std::size_t>(s));
  subset.users.push_back(seed_user);

  std::vector<bool> selected(static_cast<std::size_t>(k_total), false);
  selected[static_cast<std::size_t>(seed_user)] = true;

  // Running min inner-product magnitude to the selected set, per candidate.
  std::vector<double> min_inner(static_cast<std::size_t>(k_total),
                                std::numeric_limits<double>::infinity());
  double value = std::numeric_limits<double>::infinity();

  int last_added = seed_user;
  while (subset.size() < s) {
    for (int i = 0; i < k_total; ++i) {
      if (selected[static_cast<std::size_t>(i)]) continue;
      const double inner =
          std::abs(channels.gains.col(last_added).dot(channels.gains.col(i)));
      min_inner[static_cast<std::size_t>(i)] =
          std::min(min_inner[static_cast<std::size_t>(i)], inner);
    }
    int best = -1;
    double best_val = -1.0;
    for (int i = 0; i < k_total; ++i) {
      if (selected[static_cast<std::size_t>(i)]) continue;
      if (min_inner[static_cast<std::size_t>(i)] > best_val) {
        best_val = min_inner[static_cast<std::size_t>(i)];
        best = i;
      }
    }
    subset.users.push_back(best);
    selected[static_cast<std::size_t>(best)] = true;
    last_added = best;
    value = best_val;
  }
  return {std::move(subset), value};
}

CVector random_unit_beam(int n_r, SplitMix64& rng) {
  CVector m(n_r);
  for (int i = 0; i < n_r; ++i) {
    m(i) = rng.standard_complex_gaussian();
  }
  const double norm = m.norm();
  if (norm == 0.0) {
    m.setZero();
    m(0) = Complex(1.0, 0.0);
    return m;
  }
  return m / norm;
}

}  // namespace

std::string to_string(MethodId method) {
  switch (method) {
    case MethodId::Iterative: return "iterative";
    case MethodId::Policy: return "policy";
    case MethodId::PolicyGreedy: return "policy_greedy";
    case MethodId::Subgradient: return "subgradient";
    case MethodId::IterReweighted: return "iter_reweighted";
    case MethodId::RandomBeamforming: return "random_beamforming";
    case MethodId::RandomSelection: return "random_selection";
    case MethodId::Oracle: return "oracle";
  }
  return "unknown";
}

MethodId method_from_string(const std::string& name) {
  for (MethodId m : all_methods()) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method name: " + name);
}

const std::vector<MethodId>& all_methods() {
  static const std::vector<MethodId> methods = {
      MethodId::Iterative,         MethodId::Policy,
      MethodId::PolicyGreedy,      MethodId::Subgradient,
      MethodId::IterReweighted,    MethodId::RandomBeamforming,
      MethodId::RandomSelection,   MethodId::Oracle};
  return methods;
}

Schedule select_top_projections(const ChannelSet& channels, const BeamVector& m,
                                int s) {
  if (s < 0 || s > channels.k_total()) {
    throw ConfigError("select_top_projections: s outside [0, k_total]");
  }
  std::vector<double> projections(static_cast<std::size_t>(channels.k_total()));
  for (int k = 0; k < channels.k_total(); ++k) {
    projections[static_cast<std::size_t>(k)] =
        std::abs(m.coeffs.dot(channels.gains.col(k)));
  }
  std::vector<int> order(projections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return projections[static_cast<std::size_t>(a)] >
           projections[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(s));
  return Schedule{std::move(order)};
}

std::pair<Schedule, BeamResult> iterative_schedule(const ChannelSet& channels,
                                                   const IterativeConfig& config,
                                                   const BeamConfig& beam_config,
                                                   const PolicyConfig& policy) {
  const int s = policy.subset_size;
  const int k_total = channels.k_total();
  if (s < 1 || s > k_total) {
    throw ConfigError("iterative_schedule: subset size outside [1, k_total]");
  }
  if (config.max_outer_iters < 1) {
    throw ConfigError("iterative_schedule: max_outer_iters must be >= 1");
  }

  // Random initial subset.
  SplitMix64 rng(config.init_seed);
  std::vector<int> pool(static_cast<std::size_t>(k_total));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < s; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   rng.bounded(static_cast<std::uint64_t>(k_total - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  Schedule current{std::vector<int>(pool.begin(), pool.begin() + s)};

  std::set<std::vector<int>> visited;
  visited.insert(current.sorted());

  Schedule best_schedule;
  BeamResult best_result;
  bool have_best = false;

  for (int outer = 0; outer < config.max_outer_iters; ++outer) {
    BeamResult result = solve_beam_steering(channels, current, beam_config);
    if (!have_best || result.objective > best_result.objective) {
      best_schedule = current;
      best_result = result;
      have_best = true;
    }
    Schedule next = select_top_projections(channels, result.m, s);
    if (same_user_set(next, current)) break;          // fixed point
    if (!visited.insert(next.sorted()).second) break; // cycle
    current = std::move(next);
  }
  return {std::move(best_schedule), std::move(best_result)};
}

Schedule policy_schedule(const ChannelSet& channels, int s) {
  if (s < 1 || s > channels.k_total()) {
    throw ConfigError("policy_schedule: s outside [1, k_total]");
  }
  const std::vector<int> order = indices_by_modulus_desc(channels);
  return grow_maximin(channels, order.front(), s).first;
}

Schedule policy_greedy_schedule(const ChannelSet& channels,
                                const PolicyConfig& policy) {
  const int s = policy.subset_size;
  if (policy.greedy_g < 1) {
    throw ConfigError("policy_greedy_schedule: greedy_g must be >= 1");
  }
  if (s < 1 || s > channels.k_total()) {
    throw ConfigError("policy_greedy_schedule: s outside [1, k_total]");
  }
  const std::vector<int> order = indices_by_modulus_desc(channels);
  const int g = std::min<int>(policy.greedy_g, channels.k_total());

  Schedule best;
  double best_val = -1.0;
  for (int c = 0; c < g; ++c) {
    auto [candidate, val] = grow_maximin(channels, order[static_cast<std::size_t>(c)], s);
    if (val > best_val) {
      best_val = val;
      best = std::move(candidate);
    }
  }
  return best;
}

Schedule policy_greedy_schedule_ranked(const ChannelSet& channels,
                                       const PolicyConfig& policy,
                                       const BeamConfig& beam_config) {
  const int s = policy.subset_size;
  if (policy.greedy_g < 1 || s < 1 || s > channels.k_total()) {
    throw ConfigError("policy_greedy_schedule_ranked: invalid config");
  }
  const std::vector<int> order = indices_by_modulus_desc(channels);
  const int g = std::min<int>(policy.greedy_g, channels.k_total());

  Schedule best;
  double best_obj = -1.0;
  for (int c = 0; c < g; ++c) {
    auto [candidate, val] = grow_maximin(channels, order[static_cast<std::size_t>(c)], s);
    (void)val;
    const BeamResult result = solve_beam_steering(channels, candidate, beam_config);
    if (result.objective > best_obj) {
      best_obj = result.objective;
      best = std::move(candidate);
    }
  }
  return best;
}

std::pair<Schedule, BeamResult> random_selection(const ChannelSet& channels,
                                                 int s, RngSeed seed,
                                                 const BeamConfig& beam_config) {
  const int k_total = channels.k_total();
  if (s < 1 || s > k_total) {
    throw ConfigError("random_selection: s outside [1, k_total]");
  }
  SplitMix64 rng(seed);
  std::vector<int> pool(static_cast<std::size_t>(k_total));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < s; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   rng.bounded(static_cast<std::uint64_t>(k_total - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  Schedule subset{std::vector<int>(pool.begin(), pool.begin() + s)};
  BeamResult result = solve_beam_steering(channels, subset, beam_config);
  return {std::move(subset), std::move(result)};
}

std::pair<Schedule, BeamVector> random_beamforming(const ChannelSet& channels,
                                                   int s, RngSeed seed) {
  SplitMix64 rng(seed);
  const BeamVector m = canonicalize_beam(random_unit_beam(channels.n_r(), rng));
  Schedule subset = select_top_projections(channels, m, s);
  return {std::move(subset), m};
}

std::pair<Schedule, BeamVector> subgradient_schedule(
    const ChannelSet& channels, int s, const SubgradientConfig& config) {
  const int k_total = channels.k_total();
  if (s < 1 || s > k_total) {
    throw ConfigError("subgradient_schedule: s outside [1, k_total]");
  }
  SplitMix64 rng(config.init_seed);
  CVector m = random_unit_beam(channels.n_r(), rng);

  Schedule subset = select_top_projections(channels, BeamVector{m}, s);
  std::vector<double> exponents(static_cast<std::size_t>(s));
  for (int t = 1; t <= config.iters; ++t) {
    // Ascent on the soft-min -(1/beta) ln sum_k exp(-beta P |m^H h_k|^2);
    // weights are the softmax of the negated scaled projections, computed in
    // log-sum-exp form so saturated exponents stay finite.
    double max_exp = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < s; ++i) {
      const auto col = channels.gains.col(subset.users[static_cast<std::size_t>(i)]);
      const double p2 = std::norm(m.dot(col));
      exponents[static_cast<std::size_t>(i)] = -config.beta * config.power * p2;
      max_exp = std::max(max_exp, exponents[static_cast<std::size_t>(i)]);
    }
    double denom = 0.0;
    for (double e : exponents) denom += std::exp(e - max_exp);

    CVector gradient = CVector::Zero(channels.n_r());
    for (int i = 0; i < s; ++i) {
      const auto col = channels.gains.col(subset.users[static_cast<std::size_t>(i)]);
      const double w =
          std::exp(exponents[static_cast<std::size_t>(i)] - max_exp) / denom;
      gradient.noalias() += (w * config.power) * (col * col.dot(m));
    }
    m += (config.step0 / std::sqrt(static_cast<double>(t))) * gradient;
    const double norm = m.norm();
    if (norm > 0.0) m /= norm;

    if (t % config.reselect_every == 0) {
      subset = select_top_projections(channels, BeamVector{m}, s);
    }
  }
  subset = select_top_projections(channels, BeamVector{m}, s);
  return {std::move(subset), canonicalize_beam(m)};
}

std::pair<Schedule, BeamVector> iterative_reweighted_beam(
    const ChannelSet& channels, int s, const ReweightedConfig& config) {
  const int k_total = channels.k_total();
  if (s < 1 || s > k_total) {
    throw ConfigError("iterative_reweighted_beam: s outside [1, k_total]");
  }
  SplitMix64 rng(config.init_seed);
  CVector m = random_unit_beam(channels.n_r(), rng);

  bool converged = false;
  for (int t = 0; t < config.max_iters; ++t) {
    std::vector<double> weights(static_cast<std::size_t>(k_total));
    double total = 0.0;
    for (int k = 0; k < k_total; ++k) {
      const double p = std::abs(m.dot(channels.gains.col(k)));
      weights[static_cast<std::size_t>(k)] =
          std::pow(p, config.weight_exponent);
      total += weights[static_cast<std::size_t>(k)];
    }
    CVector next = CVector::Zero(channels.n_r());
    if (total <= 0.0) break;
    for (int k = 0; k < k_total; ++k) {
      const auto col = channels.gains.col(k);
      next.noalias() +=
          (weights[static_cast<std::size_t>(k)] / total) * (col * col.dot(m));
    }
    const double norm = next.norm();
    if (norm == 0.0) break;
    next /= norm;
    const double angle =
        std::acos(std::clamp(std::abs(next.dot(m)), 0.0, 1.0));
    m = next;
    if (angle < config.angle_tol) {
      converged = true;
      break;
    }
  }
  if (!converged && config.strict) {
    throw IterLimitError("iterative_reweighted_beam: no convergence within cap");
  }
  Schedule subset = select_top_projections(channels, BeamVector{m}, s);
  return {std::move(subset), canonicalize_beam(m)};
}

std::pair<Schedule, BeamResult> brute_force_oracle(const ChannelSet& channels,
                                                   int s,
                                                   const BeamConfig& beam_config,
                                                   long long limit) {
  const int k_total = channels.k_total();
  if (s < 1 || s > k_total) {
    throw ConfigError("brute_force_oracle: s outside [1, k_total]");
  }

  long long count = 1;
  for (int i = 1; i <= s; ++i) {
    count = count * (k_total - s + i) / i;
    if (count > limit) {
      throw CombinatorialLimitError("brute_force_oracle: C(k_total, s) exceeds limit " +
                                    std::to_string(limit));
    }
  }

  std::vector<int> combo(static_cast<std::size_t>(s));
  std::iota(combo.begin(), combo.end(), 0);

  Schedule best_schedule;
  BeamResult best_result;
  bool have_best = false;
  for (;;) {
    Schedule subset{combo};
    BeamResult result = solve_beam_steering(channels, subset, beam_config);
    if (!have_best || result.objective > best_result.objective) {
      best_schedule = std::move(subset);
      best_result = std::move(result);
      have_best = true;
    }

    // Next lexicographic combination.
    int i = s - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == k_total - s + i) --i;
    if (i < 0) break;
    ++combo[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < s; ++j) {
      combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return {std::move(best_schedule), std::move(best_result)};
}

namespace {

MethodOutcome outcome_from_beam_result(const ChannelSet& channels,
                                       Schedule schedule, BeamResult result,
                                       const BeamConfig& beam_config) {
  MethodOutcome out;
  out.mse_over_sigma2 = 1.0 / result.objective;
  out.objective = result.objective;
  out.beam = std::move(result.m);
  out.solver_backed = true;
  out.rank1_ratio = result.rank1_ratio;
  out.surrogate_monotone = result.surrogate_monotone;
  out.schedule = std::move(schedule);
  (void)channels;
  (void)beam_config;
  return out;
}

MethodOutcome outcome_from_fixed_beam(const ChannelSet& channels,
                                      Schedule schedule, BeamVector m,
                                      const BeamConfig& beam_config) {
  MethodOutcome out;
  const MseReport report =
      mse_report(channels, schedule, m, beam_config.power, 1.0);
  out.objective = report.objective;
  out.mse_over_sigma2 = report.mse_over_sigma2;
  out.beam = std::move(m);
  out.schedule = std::move(schedule);
  return out;
}

}  // namespace

MethodOutcome run_method(const ChannelSet& channels, MethodId method, int s,
                         int g, const BeamConfig& beam_config, RngSeed seed,
                         long long oracle_limit) {
  switch (method) {
    case MethodId::Iterative: {
      auto [schedule, result] = iterative_schedule(
          channels, IterativeConfig{20, seed}, beam_config,
          PolicyConfig{g, s, false});
      return outcome_from_beam_result(channels, std::move(schedule),
                                      std::move(result), beam_config);
    }
    case MethodId::Policy: {
      Schedule schedule = policy_schedule(channels, s);
      BeamResult result = solve_beam_steering(channels, schedule, beam_config);
      return outcome_from_beam_result(channels, std::move(schedule),
                                      std::move(result), beam_config);
    }
    case MethodId::PolicyGreedy: {
      Schedule schedule =
          policy_greedy_schedule(channels, PolicyConfig{g, s, false});
      BeamResult result = solve_beam_steering(channels, schedule, beam_config);
      return outcome_from_beam_result(channels, std::move(schedule),
                                      std::move(result), beam_config);
    }
    case MethodId::Subgradient: {
      SubgradientConfig config;
      config.power = beam_config.power;
      config.init_seed = seed;
      auto [schedule, m] = subgradient_schedule(channels, s, config);
      return outcome_from_fixed_beam(channels, std::move(schedule),
                                     std::move(m), beam_config);
    }
    case MethodId::IterReweighted: {
      ReweightedConfig config;
      config.init_seed = seed;
      auto [schedule, m] = iterative_reweighted_beam(channels, s, config);
      return outcome_from_fixed_beam(channels, std::move(schedule),
                                     std::move(m), beam_config);
    }
    case MethodId::RandomBeamforming: {
      auto [schedule, m] = random_beamforming(channels, s, seed);
      return outcome_from_fixed_beam(channels, std::move(schedule),
                                     std::move(m), beam_config);
    }
    case MethodId::RandomSelection: {
      auto [schedule, result] = random_selection(channels, s, seed, beam_config);
      return outcome_from_beam_result(channels, std::move(schedule),
                                      std::move(result), beam_config);
    }
    case MethodId::Oracle: {
      auto [schedule, result] =
          brute_force_oracle(channels, s, beam_config, oracle_limit);
      return outcome_from_beam_result(channels, std::move(schedule),
                                      std::move(result), beam_config);
    }
  }
  throw ConfigError("run_method: unknown method");
}

Schedule schedule_only(const ChannelSet& channels, MethodId method, int s,
                       int g, const BeamConfig& beam_config, RngSeed seed) {
  switch (method) {
    case MethodId::Policy:
      return policy_schedule(channels, s);
    case MethodId::PolicyGreedy:
      return policy_greedy_schedule(channels, PolicyConfig{g, s, false});
    case MethodId::RandomSelection: {
      SplitMix64 rng(seed);
      const int k_total = channels.k_total();
      std::vector<int> pool(static_cast<std::size_t>(k_total));
      std::iota(pool.begin(), pool.end(), 0);
      for (int i = 0; i < s; ++i) {
        const auto j = static_cast<std::size_t>(i) +
                       rng.bounded(static_cast<std::uint64_t>(k_total - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
      }
      return Schedule{std::vector<int>(pool.begin(), pool.begin() + s)};
    }
    case MethodId::RandomBeamforming:
      return random_beamforming(channels, s, seed).first;
    case MethodId::Subgradient: {
      SubgradientConfig config;
      config.power = beam_config.power;
      config.init_seed = seed;
      return subgradient_schedule(channels, s, config).first;
    }
    case MethodId::IterReweighted: {
      ReweightedConfig config;
      config.init_seed = seed;
      return iterative_reweighted_beam(channels, s, config).first;
    }
    case MethodId::Iterative:
    case MethodId::Oracle:
      return run_method(channels, method, s, g, beam_config, seed).schedule;
  }
  throw ConfigError("schedule_only: unknown method");
}

}  // namespace aircomp
