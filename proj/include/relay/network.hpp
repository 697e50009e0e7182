#pragma once

#include <vector>

#include "relay/geometry.hpp"
#include "relay/matrix.hpp"

namespace relay {

// One snapshot of the physical network: node/beacon placement, fading gains
// and radio constants. Immutable once built; all operations below are pure.
struct NetworkInstance {
    std::vector<Point2> node_positions;  // meters, length n_d
    std::vector<Point2> pb_positions;    // meters, length n_b
    Point2 sink_position;                // deployment circle center
    double radius_m = 0.0;

    // |h|^2 fading gains. channel_node_node is n_d x (n_d+1); column n_d is
    // the node->sink link. channel_pb_node is n_b x n_d.
    Mat channel_node_node;
    Mat channel_pb_node;

    double frame_s = 0.0;          // TDMA frame length T
    double pb_power_w = 0.0;       // beacon transmit power
    double path_loss_alpha = 0.0;  // d^-alpha law, distances in meters
    double noise_w = 0.0;          // receiver noise power
    double eh_efficiency = 0.0;    // harvested fraction, in (0,1]

    int n_d() const { return static_cast<int>(node_positions.size()); }
    int n_b() const { return static_cast<int>(pb_positions.size()); }
    int sink() const { return n_d(); }
};

// Throws std::invalid_argument when an instance violates its invariants
// (positions outside the circle, negative gains, non-positive constants).
void validate_instance(const NetworkInstance& inst);

// Per-link SNR numerators derived from one instance. snr_seconds(k,n) has
// units of seconds: the SNR of node k transmitting to n over a slot of t
// seconds is snr_seconds(k,n)/t. Column n_d is the link to the sink; the
// diagonal is unused and stored as 0.
struct LinkCoefficients {
    std::vector<double> harvested_energy;  // joules, per node
    Mat snr_seconds;                       // n_d x (n_d+1)

    int n_d() const { return snr_seconds.rows; }
    int sink() const { return snr_seconds.rows; }
};

// Uplink assignment: parent[k] in [0, n_d], where n_d denotes the sink.
// Valid when no node is its own parent and every parent chain reaches the
// sink within n_d hops.
struct Topology {
    std::vector<int> parent;

    int n_d() const { return static_cast<int>(parent.size()); }
};

// Per-node transmit slots in seconds. Valid when every slot >= epsilon2 and
// the slots sum to the frame length within 1e-12*T.
struct SlotAllocation {
    std::vector<double> t;

    int n_d() const { return static_cast<int>(t.size()); }
};

// Thermal noise floor -174 dBm/Hz plus noise figure and bandwidth, converted
// to watts.
double noise_power_watts(double noise_figure_db, double bandwidth_hz);
double noise_power_dbm(double noise_figure_db, double bandwidth_hz);

// E_k = eh_efficiency * T * sum over beacons of P_b * |h|^2 * d^-alpha.
// Rejects instances with a beacon coincident with a node.
std::vector<double> compute_harvested_energy(const NetworkInstance& inst);

// snr_seconds(k,n) = E_k * |h_{k,n}|^2 * d_{k,n}^-alpha / N.
// Rejects instances with coincident node/sink positions.
LinkCoefficients compute_link_coefficients(const NetworkInstance& inst, const std::vector<double>& energy);
LinkCoefficients compute_link_coefficients(const NetworkInstance& inst);

// t * log2(1 + a/t) for a slot of t seconds and SNR numerator a; the bits/Hz
// a node can push over one link within its slot. a >= 0, t > 0.
double slot_capacity(double snr_seconds, double slot_s);

// Net own-data budget per node: own uplink capacity minus the capacity spent
// relaying children. May be negative for overloaded relays; callers must see
// the true value. Throws std::domain_error when a slot is <= 0.
std::vector<double> rate_budget(const Topology& topo, const SlotAllocation& slots, const LinkCoefficients& coef);

// Pointer-chasing validity check: every chain reaches the sink in <= n_d
// hops and no node is its own parent.
bool validate_topology(const Topology& topo, int n_d);

// Children lists indexed by node; index n_d holds the sink's children.
std::vector<std::vector<int>> children_of(const Topology& topo);

SlotAllocation uniform_slots(double frame_s, int n_d);
bool slots_valid(const SlotAllocation& slots, double frame_s, double epsilon2);

}  // namespace relay
