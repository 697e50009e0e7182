#include "relay/gmga.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relay {

namespace {

int categorical_draw(std::span<const double> weights, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double acc = 0.0;
    int last = 0;
    for (int j = 0; j < static_cast<int>(weights.size()); ++j) {
        if (weights[j] <= 0.0) continue;
        last = j;
        acc += weights[j];
        if (u < acc) return j;
    }
    return last;  // guard against rounding at u ~ 1
}

int guide_draw_row(const MutationGuide& guide, int row, std::mt19937_64& rng) {
    const int cols = guide.mu.cols;
    return categorical_draw(std::span<const double>(&guide.mu.data[static_cast<size_t>(row) * cols],
                                                    static_cast<size_t>(cols)),
                            rng);
}

// Nodes lying on a parent-pointer cycle (tails hanging off a cycle are not
// included; breaking the cycle frees them too).
std::vector<int> cycle_members(const Topology& topo) {
    const int n = topo.n_d();
    std::vector<int> state(n, 0);  // 0 unknown, 1 on current walk, 2 resolved
    std::vector<int> cycle;
    for (int start = 0; start < n; ++start) {
        if (state[start] != 0) continue;
        std::vector<int> path;
        int at = start;
        while (at != n && state[at] == 0) {
            state[at] = 1;
            path.push_back(at);
            at = topo.parent[at];
        }
        if (at != n && state[at] == 1) {
            // Walked back into the current path: everything from `at` on is a cycle.
            auto it = std::find(path.begin(), path.end(), at);
            cycle.insert(cycle.end(), it, path.end());
        }
        for (int v : path) state[v] = 2;
    }
    std::sort(cycle.begin(), cycle.end());
    return cycle;
}

struct Candidate {
    Topology topo;
    double r_min = 0.0;
    SlotAllocation slots;
};

}  // namespace

int default_stop_period(int n_d) {
    const long v = std::lround(200.0 / n_d - 4.0);
    return static_cast<int>(std::max(1L, v));
}

void validate_ga_params(const GaParams& p) {
    if (!(p.n_parent >= 1 && p.n_parent <= p.n_origin && p.n_origin <= p.n_offspring))
        throw std::invalid_argument("ga params: need 1 <= n_parent <= n_origin <= n_offspring");
    if (!(p.p_mutation > 0.0 && p.p_mutation < 1.0))
        throw std::invalid_argument("ga params: p_mutation must be in (0,1)");
    if (p.n_crossover_points < 1) throw std::invalid_argument("ga params: n_crossover_points >= 1");
    if (p.stop_period < 0 || p.repair_retry_cap < 0) throw std::invalid_argument("ga params: negative count");
}

MutationGuide compute_mutation_guide(const LinkCoefficients& coef, const SlotAllocation& parent_slots) {
    const int n = coef.n_d();
    if (parent_slots.n_d() != n) throw std::invalid_argument("mutation_guide: slot size mismatch");
    MutationGuide guide;
    guide.mu = Mat(n, n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const double t = parent_slots.t[i];
        double row_sum = 0.0;
        for (int j = 0; j <= n; ++j) {
            if (j == i) continue;
            const double cap = slot_capacity(coef.snr_seconds(i, j), t);
            guide.mu(i, j) = cap;
            row_sum += cap;
        }
        if (row_sum > 0.0) {
            for (int j = 0; j <= n; ++j) guide.mu(i, j) /= row_sum;
        } else {
            // Node with zero capacity to every target: uniform fallback.
            for (int j = 0; j <= n; ++j) guide.mu(i, j) = (j == i) ? 0.0 : 1.0 / n;
        }
        guide.mu(i, i) = 0.0;
    }
    return guide;
}

Topology crossover_at(const Topology& a, const Topology& b, std::span<const int> cuts) {
    const int n = a.n_d();
    if (b.n_d() != n) throw std::invalid_argument("crossover: parent length mismatch");
    Topology child = a;
    bool from_a = true;
    int seg_start = 0;  // 0-based start of the current segment
    for (int cut : cuts) {
        if (!from_a) {
            for (int g = seg_start; g < cut && g < n; ++g) child.parent[g] = b.parent[g];
        }
        seg_start = cut;
        from_a = !from_a;
    }
    if (!from_a) {
        for (int g = seg_start; g < n; ++g) child.parent[g] = b.parent[g];
    }
    return child;
}

Topology crossover(const Topology& a, const Topology& b, int n_points, std::mt19937_64& rng) {
    const int n = a.n_d();
    std::vector<int> cuts(static_cast<size_t>(n_points));
    int lo = 1;
    for (int& c : cuts) {
        std::uniform_int_distribution<int> pick(lo, n);
        c = pick(rng);
        lo = c;
    }
    return crossover_at(a, b, cuts);
}

Topology mutate(const Topology& topo, const MutationGuide& guide, double p_m, std::mt19937_64& rng) {
    const int n = topo.n_d();
    if (guide.mu.rows != n) throw std::invalid_argument("mutate: guide size mismatch");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Topology out = topo;
    for (int g = 0; g < n; ++g) {
        if (unit(rng) < p_m) out.parent[g] = guide_draw_row(guide, g, rng);
    }
    return out;
}

Topology repair_or_reject(const Topology& topo, const MutationGuide& guide, std::mt19937_64& rng,
                          int retry_cap) {
    const int n = topo.n_d();
    Topology out = topo;
    // Clamp stray genes first so cycle analysis is meaningful.
    for (int g = 0; g < n; ++g) {
        if (out.parent[g] < 0 || out.parent[g] > n || out.parent[g] == g) out.parent[g] = n;
    }
    for (int attempt = 0; attempt < retry_cap; ++attempt) {
        if (validate_topology(out, n)) return out;
        for (int g : cycle_members(out)) out.parent[g] = guide_draw_row(guide, g, rng);
    }
    if (!validate_topology(out, n)) {
        for (int g : cycle_members(out)) out.parent[g] = n;
    }
    return out;
}

const ScoredSlots& ScoreCache::lookup_or_insert(const Topology& topo,
                                                const std::function<ScoredSlots()>& compute) {
    auto it = map_.find(topo.parent);
    if (it != map_.end()) {
        ++hits_;
        return it->second;
    }
    ++misses_;
    return map_.emplace(topo.parent, compute()).first->second;
}

GaResult gmga_run(const LinkCoefficients& coef, const GaParams& params, double frame_s,
                  const EpsilonSet& eps, const std::vector<Topology>& seed_topologies,
                  const GaProgressFn& progress, ScoreCache* cache) {
    validate_ga_params(params);
    const int n = coef.n_d();
    if (n < 1) throw std::invalid_argument("gmga: empty network");

    IbParams ib;
    ib.epsilon1 = eps.epsilon1;
    ib.epsilon2 = eps.epsilon2;

    const SlotAllocation uniform = uniform_slots(frame_s, n);
    Topology direct{std::vector<int>(n, n)};

    long evals = 0;
    ScoreCache local_cache;
    ScoreCache& memo = cache ? *cache : local_cache;
    const auto score = [&](const Topology& topo, const SlotAllocation& warm) -> const ScoredSlots& {
        return memo.lookup_or_insert(topo, [&]() {
            ++evals;
            const IbResult r = ib_evaluate_tolerant(topo, coef, warm, ib, eps.epsilon1_prime);
            return ScoredSlots{r.r_min, r.slots};
        });
    };

    if (n == 1) {
        const IbResult fin = ib_allocate(direct, coef, uniform, ib);
        return GaResult{direct, fin.slots, fin.r_min, 0, 1};
    }

    std::mt19937_64 rng(params.seed);
    const int stop_period = params.stop_period > 0 ? params.stop_period : default_stop_period(n);

    // First generation: direct connect, inherited seeds, then guide-sampled
    // random trees up to n_origin.
    std::vector<Candidate> pool;
    pool.reserve(static_cast<size_t>(params.n_offspring));
    pool.push_back({direct, 0.0, {}});
    for (const Topology& s : seed_topologies) {
        if (static_cast<int>(pool.size()) >= params.n_origin) break;
        if (!validate_topology(s, n)) throw std::invalid_argument("gmga: invalid seed topology");
        pool.push_back({s, 0.0, {}});
    }
    const MutationGuide seed_guide = compute_mutation_guide(coef, uniform);
    while (static_cast<int>(pool.size()) < params.n_origin) {
        Topology t{std::vector<int>(n, n)};
        for (int g = 0; g < n; ++g) t.parent[g] = guide_draw_row(seed_guide, g, rng);
        pool.push_back({repair_or_reject(t, seed_guide, rng, params.repair_retry_cap), 0.0, {}});
    }
    for (Candidate& c : pool) {
        const ScoredSlots& s = score(c.topo, uniform);
        c.r_min = s.r_min;
        c.slots = s.slots;
    }

    const auto select = [&](std::vector<Candidate>& v) {
        std::stable_sort(v.begin(), v.end(),
                         [](const Candidate& a, const Candidate& b) { return a.r_min > b.r_min; });
        if (static_cast<int>(v.size()) > params.n_parent) v.resize(static_cast<size_t>(params.n_parent));
    };
    select(pool);
    std::vector<Candidate> parents = pool;

    double best = parents.front().r_min;
    int generations = 0;
    int stall = 0;
    if (progress) progress({generations, best, evals});

    std::uniform_int_distribution<int> pick_parent(0, params.n_parent - 1);
    while (stall < stop_period) {
        ++generations;
        const MutationGuide guide = compute_mutation_guide(coef, parents.front().slots);
        std::vector<Candidate> offspring = parents;  // elitism: parents survive verbatim
        offspring.reserve(static_cast<size_t>(params.n_offspring));
        while (static_cast<int>(offspring.size()) < params.n_offspring) {
            const int r1 = pick_parent(rng);
            const int r2 = pick_parent(rng);
            Topology child = crossover(parents[r1].topo, parents[r2].topo, params.n_crossover_points, rng);
            child = mutate(child, guide, params.p_mutation, rng);
            child = repair_or_reject(child, guide, rng, params.repair_retry_cap);
            const ScoredSlots& s = score(child, parents[r1].slots);
            offspring.push_back({std::move(child), s.r_min, s.slots});
        }
        select(offspring);
        parents = std::move(offspring);
        const double gen_best = parents.front().r_min;
        if (gen_best < best)
            throw std::logic_error("gmga: best score decreased despite elitism");
        if (gen_best > best) {
            best = gen_best;
            stall = 0;
        } else {
            ++stall;
        }
        if (progress) progress({generations, best, evals});
    }

    const Candidate& winner = parents.front();
    const IbResult fin = ib_allocate(winner.topo, coef, winner.slots, ib);
    ++evals;
    return GaResult{winner.topo, fin.slots, fin.r_min, generations, evals};
}

}  // namespace relay
