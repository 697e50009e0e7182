#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "relay/allocator.hpp"
#include "relay/network.hpp"

namespace relay {

struct GaParams {
    int n_origin = 5;     // first-generation size
    int n_parent = 5;     // survivors per generation
    int n_offspring = 50; // pool size per generation, parents included
    int n_crossover_points = 2;
    double p_mutation = 0.05;  // per-gene
    int stop_period = 0;       // generations of stagnation before stopping; 0 -> default for n_d
    int repair_retry_cap = 8;
    uint64_t seed = 0;
};

// max(1, round(200/n_d - 4)); degenerates to 1 for large networks.
int default_stop_period(int n_d);

void validate_ga_params(const GaParams& p);

// Per-node categorical distribution over mutation targets, proportional to
// the link capacity at the reference slots. Row i covers targets j != i
// (other nodes and the sink) and sums to 1; an all-zero row falls back to
// uniform.
struct MutationGuide {
    Mat mu;  // n_d x (n_d+1)
};

MutationGuide compute_mutation_guide(const LinkCoefficients& coef, const SlotAllocation& parent_slots);

// Segment-copy crossover at explicit cut positions (1-based, ascending; a
// cut at d switches source after gene d). Deterministic core of crossover().
Topology crossover_at(const Topology& a, const Topology& b, std::span<const int> cuts);

// Draws a chain of cut points d1 = U(1,n), dk = U(d(k-1),n) and alternates
// segment sources starting from `a`. May return an invalid topology; repair
// happens downstream.
Topology crossover(const Topology& a, const Topology& b, int n_points, std::mt19937_64& rng);

// Each gene independently mutates with probability p_m, resampling its
// parent from the guide row. May return an invalid topology.
Topology mutate(const Topology& topo, const MutationGuide& guide, double p_m, std::mt19937_64& rng);

// Returns the input unchanged when valid; otherwise resamples the genes on
// cycles from the guide up to retry_cap times, then re-parents remaining
// cycle members to the sink. Output always valid.
Topology repair_or_reject(const Topology& topo, const MutationGuide& guide, std::mt19937_64& rng,
                          int retry_cap = 8);

struct ScoredSlots {
    double r_min = 0.0;
    SlotAllocation slots;
};

// Memo of tolerant scores per chromosome, scoped to one frame (fixed
// coefficients). Not thread-safe; scoring runs sequentially.
class ScoreCache {
  public:
    const ScoredSlots& lookup_or_insert(const Topology& topo, const std::function<ScoredSlots()>& compute);
    size_t size() const { return map_.size(); }
    long hits() const { return hits_; }
    long misses() const { return misses_; }

  private:
    std::map<std::vector<int>, ScoredSlots> map_;
    long hits_ = 0;
    long misses_ = 0;
};

struct EpsilonSet {
    double epsilon1 = 1e-6;        // final-answer precision
    double epsilon1_prime = 1e-3;  // scoring precision
    double epsilon2 = 1e-7;        // slot floor
};

struct GaProgress {
    int generation = 0;
    double best_r_min = 0.0;
    long evals = 0;
};
using GaProgressFn = std::function<void(const GaProgress&)>;

struct GaResult {
    Topology topology;
    SlotAllocation slots;  // full-precision allocation of the returned topology
    double r_min = 0.0;    // at epsilon1
    int generations = 0;
    long evals = 0;  // allocator computations (cache misses + final re-score)
};

// Guided-mutation GA over parent-vector chromosomes. First generation is
// direct-connect + seed topologies + guide-sampled random trees; each
// generation copies the parents verbatim (elitism) and fills the pool with
// repair(mutate(crossover(..))) offspring scored at epsilon1_prime with
// warm-start slots inherited from the first crossover parent. Stops when the
// best score has not improved for stop_period generations; the returned
// topology is re-scored at full epsilon1. Deterministic for fixed inputs.
GaResult gmga_run(const LinkCoefficients& coef, const GaParams& params, double frame_s,
                  const EpsilonSet& eps, const std::vector<Topology>& seed_topologies,
                  const GaProgressFn& progress = {}, ScoreCache* cache = nullptr);

}  // namespace relay
