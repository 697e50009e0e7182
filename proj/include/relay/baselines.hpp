#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "relay/allocator.hpp"
#include "relay/network.hpp"

namespace relay {

enum class SchemeId { Direct, Mst, Greedy, Exhaustive, Gmga };

std::string to_string(SchemeId id);
std::optional<SchemeId> parse_scheme(std::string_view name);

// Star: every node uplinks straight to the sink.
Topology direct_topology(int n_d);

// Link cost used by the MST scheme: 1 / slot_capacity; +infinity for a
// zero-capacity link.
double mst_link_cost(double snr_seconds, double slot_s);

// Prim-style arborescence grown from the sink under uniform slots. Ties
// break by joining-node index, then by how early the attachment point
// entered the tree (the sink is first). Nodes with no finite-cost link into
// the tree attach directly to the sink.
Topology mst_topology(const LinkCoefficients& coef, const SlotAllocation& slots_uniform);

// Starts from direct connect and visits the nodes once in a seeded random
// order, re-parenting each to the target with the best end-to-end rate
// min(own link rate, bottleneck of the target's current path); re-parentings
// that would create a cycle are skipped.
Topology greedy_topology(const LinkCoefficients& coef, const SlotAllocation& slots_uniform,
                         std::mt19937_64& rng);

// Enumerates valid parent vectors in lexicographic order with incremental
// cycle pruning.
void for_each_valid_topology(int n_d, const std::function<void(const Topology&)>& fn);

struct ExhaustiveResult {
    Topology topology;
    double r_min = 0.0;
    long long trees_scored = 0;
};

// Scores every valid topology with a full-precision allocation from uniform
// slots and returns the best; ties go to the lexicographically smallest
// parent vector. Deterministic for any thread count. Refuses n_d > cap.
ExhaustiveResult exhaustive_topology(const LinkCoefficients& coef, double frame_s, const IbParams& params,
                                     int cap = 8, int threads = 1);

}  // namespace relay
