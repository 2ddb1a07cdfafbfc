#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aircomp/beam.hpp"
#include "aircomp/channel.hpp"
#include "aircomp/types.hpp"

namespace aircomp {

enum class MethodId {
  Iterative,
  Policy,
  PolicyGreedy,
  Subgradient,
  IterReweighted,
  RandomBeamforming,
  RandomSelection,
  Oracle,
};

/// Fixed wire names: iterative, policy, policy_greedy, subgradient,
/// iter_reweighted, random_beamforming, random_selection, oracle.
std::string to_string(MethodId method);
MethodId method_from_string(const std::string& name);
const std::vector<MethodId>& all_methods();

struct PolicyConfig {
  int greedy_g = 5;
  int subset_size = 10;
  /// When set, the greedy policy re-ranks its G finalists by the true beam
  /// objective instead of the min-inner-product proxy (costs G beam solves).
  bool rank_by_objective = false;
};

struct IterativeConfig {
  int max_outer_iters = 20;
  RngSeed init_seed;
};

struct SubgradientConfig {
  double beta = 20.0;        // soft-min sharpness
  double power = 1.0;        // P in the surrogate
  int iters = 500;
  double step0 = 0.05;       // step at t=1; decays as step0/sqrt(t)
  int reselect_every = 50;   // refresh the top-s subset this often
  RngSeed init_seed;
};

struct ReweightedConfig {
  int max_iters = 200;
  double angle_tol = 1e-6;
  double weight_exponent = 2.0;  // w_k proportional to |m^H h_k|^exponent
  bool strict = false;           // throw IterLimitError instead of returning at the cap
  RngSeed init_seed;
};

/// The s indices with largest |m^H h_k|, descending, ties to the lower index.
Schedule select_top_projections(const ChannelSet& channels, const BeamVector& m,
                                int s);

/// Alternate beam steering and top-projection selection from a random initial
/// subset until the subset converges, a cycle is detected, or the outer cap
/// is hit; returns the best-objective subset seen with its beam.
std::pair<Schedule, BeamResult> iterative_schedule(const ChannelSet& channels,
                                                   const IterativeConfig& config,
                                                   const BeamConfig& beam_config,
                                                   const PolicyConfig& policy);

/// Deterministic channel-based policy: seed with the max-modulus user, then
/// repeatedly add the user maximizing the minimum inner-product magnitude to
/// the selected set.
Schedule policy_schedule(const ChannelSet& channels, int s);

/// Greedy policy: grow one candidate subset from each of the top-G modulus
/// users and keep the candidate with the largest running min-inner-product
/// value. G=1 reproduces policy_schedule exactly.
Schedule policy_greedy_schedule(const ChannelSet& channels,
                                const PolicyConfig& policy);

/// Objective-ranked variant behind PolicyConfig::rank_by_objective.
Schedule policy_greedy_schedule_ranked(const ChannelSet& channels,
                                       const PolicyConfig& policy,
                                       const BeamConfig& beam_config);

/// Uniform random s-subset followed by the DC beam design.
std::pair<Schedule, BeamResult> random_selection(const ChannelSet& channels,
                                                 int s, RngSeed seed,
                                                 const BeamConfig& beam_config);

/// Beam sampled uniformly on the complex unit sphere; subset = top-s
/// projections under it.
std::pair<Schedule, BeamVector> random_beamforming(const ChannelSet& channels,
                                                   int s, RngSeed seed);

/// Projected gradient ascent on the soft-min of the projections over the
/// current subset, re-selecting the subset periodically.
std::pair<Schedule, BeamVector> subgradient_schedule(const ChannelSet& channels,
                                                     int s,
                                                     const SubgradientConfig& config);

/// Reweighted power iteration m <- normalize(sum_k w_k h_k h_k^H m) with
/// weights from current projection strength; subset = top-s at convergence.
std::pair<Schedule, BeamVector> iterative_reweighted_beam(
    const ChannelSet& channels, int s, const ReweightedConfig& config);

/// Enumerates every s-subset (up to `limit` of them), solves the beam design
/// for each, and returns the max-objective pair; ties break to the
/// lexicographically smallest subset. Throws CombinatorialLimitError when
/// C(k_total, s) > limit.
std::pair<Schedule, BeamResult> brute_force_oracle(const ChannelSet& channels,
                                                   int s,
                                                   const BeamConfig& beam_config,
                                                   long long limit = 10000);

/// Uniform outcome of running one scheduling method on one channel
/// realization, as consumed by the experiment runner and the FL loop.
struct MethodOutcome {
  Schedule schedule;
  BeamVector beam;
  double objective = 0.0;        // P * min_k |m^H h_k|^2 over the schedule
  double mse_over_sigma2 = 0.0;  // 1 / objective
  bool solver_backed = false;    // beam came from the DC solver
  double rank1_ratio = 0.0;      // solver runs only
  bool surrogate_monotone = true;
};

MethodOutcome run_method(const ChannelSet& channels, MethodId method, int s,
                         int g, const BeamConfig& beam_config, RngSeed seed,
                         long long oracle_limit = 10000);

/// Schedule without measuring mse (skips the beam solve where the method
/// allows it); falls back to run_method for iterative and oracle.
Schedule schedule_only(const ChannelSet& channels, MethodId method, int s,
                       int g, const BeamConfig& beam_config, RngSeed seed);

}  // namespace aircomp
