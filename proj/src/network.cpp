#include "relay/network.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "relay/numeric.hpp"

namespace relay {

namespace {

constexpr double kInvLn2 = 1.4426950408889634074;  // 1/ln(2)

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void validate_instance(const NetworkInstance& inst) {
    const int n = inst.n_d();
    const int b = inst.n_b();
    require(n >= 1, "instance: need at least one node");
    require(inst.frame_s > 0.0, "instance: frame_s must be > 0");
    require(inst.pb_power_w > 0.0, "instance: pb_power_w must be > 0");
    require(inst.noise_w > 0.0, "instance: noise_w must be > 0");
    require(inst.eh_efficiency > 0.0 && inst.eh_efficiency <= 1.0, "instance: eh_efficiency must be in (0,1]");
    require(inst.radius_m > 0.0, "instance: radius_m must be > 0");
    const double slack = inst.radius_m * (1.0 + 1e-9);
    for (const Point2& p : inst.node_positions)
        require(distance(p, inst.sink_position) <= slack, "instance: node outside deployment circle");
    for (const Point2& p : inst.pb_positions)
        require(distance(p, inst.sink_position) <= slack, "instance: beacon outside deployment circle");
    require(inst.channel_node_node.rows == n && inst.channel_node_node.cols == n + 1,
            "instance: channel_node_node must be n_d x (n_d+1)");
    require(inst.channel_pb_node.rows == b && inst.channel_pb_node.cols == n,
            "instance: channel_pb_node must be n_b x n_d");
    for (double g : inst.channel_node_node.data) require(g >= 0.0, "instance: negative channel gain");
    for (double g : inst.channel_pb_node.data) require(g >= 0.0, "instance: negative channel gain");
}

double noise_power_dbm(double noise_figure_db, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("noise_power: bandwidth must be > 0");
    return -174.0 + noise_figure_db + 10.0 * std::log10(bandwidth_hz);
}

double noise_power_watts(double noise_figure_db, double bandwidth_hz) {
    const double dbm = noise_power_dbm(noise_figure_db, bandwidth_hz);
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

std::vector<double> compute_harvested_energy(const NetworkInstance& inst) {
    const int n = inst.n_d();
    std::vector<double> energy(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double received = 0.0;
        for (int p = 0; p < inst.n_b(); ++p) {
            const double d = distance(inst.pb_positions[p], inst.node_positions[k]);
            if (d <= 0.0) throw std::invalid_argument("harvested_energy: beacon coincides with node");
            received += inst.pb_power_w * inst.channel_pb_node(p, k) * std::pow(d, -inst.path_loss_alpha);
        }
        energy[k] = inst.eh_efficiency * inst.frame_s * received;
    }
    return energy;
}

LinkCoefficients compute_link_coefficients(const NetworkInstance& inst, const std::vector<double>& energy) {
    const int n = inst.n_d();
    if (static_cast<int>(energy.size()) != n)
        throw std::invalid_argument("link_coefficients: energy size mismatch");
    LinkCoefficients coef;
    coef.harvested_energy = energy;
    coef.snr_seconds = Mat(n, n + 1, 0.0);
    for (int k = 0; k < n; ++k) {
        for (int m = 0; m <= n; ++m) {
            if (m == k) continue;  // self link unused
            const Point2 target = (m == n) ? inst.sink_position : inst.node_positions[m];
            const double d = distance(inst.node_positions[k], target);
            if (d <= 0.0) throw std::invalid_argument("link_coefficients: coincident positions");
            coef.snr_seconds(k, m) =
                energy[k] * inst.channel_node_node(k, m) * std::pow(d, -inst.path_loss_alpha) / inst.noise_w;
        }
    }
    return coef;
}

LinkCoefficients compute_link_coefficients(const NetworkInstance& inst) {
    return compute_link_coefficients(inst, compute_harvested_energy(inst));
}

double slot_capacity(double snr_seconds, double slot_s) {
    if (!(slot_s > 0.0)) throw std::domain_error("slot_capacity: slot must be > 0");
    if (snr_seconds <= 0.0) return 0.0;
    return slot_s * std::log1p(snr_seconds / slot_s) * kInvLn2;
}

std::vector<double> rate_budget(const Topology& topo, const SlotAllocation& slots, const LinkCoefficients& coef) {
    const int n = coef.n_d();
    if (topo.n_d() != n || slots.n_d() != n) throw std::invalid_argument("rate_budget: size mismatch");
    std::vector<double> own(n);
    for (int k = 0; k < n; ++k) own[k] = slot_capacity(coef.snr_seconds(k, topo.parent[k]), slots.t[k]);
    std::vector<double> child_sum(n, 0.0);
    for (int k = 0; k < n; ++k) {
        const int p = topo.parent[k];
        if (p < n) child_sum[p] += own[k];
    }
    std::vector<double> rate(n);
    for (int k = 0; k < n; ++k) rate[k] = own[k] - child_sum[k];
    return rate;
}

bool validate_topology(const Topology& topo, int n_d) {
    if (topo.n_d() != n_d) return false;
    for (int k = 0; k < n_d; ++k) {
        const int p = topo.parent[k];
        if (p < 0 || p > n_d || p == k) return false;
    }
    for (int k = 0; k < n_d; ++k) {
        int at = k;
        int hops = 0;
        while (at != n_d) {
            at = topo.parent[at];
            if (++hops > n_d) return false;
        }
    }
    return true;
}

std::vector<std::vector<int>> children_of(const Topology& topo) {
    const int n = topo.n_d();
    std::vector<std::vector<int>> kids(n + 1);
    for (int k = 0; k < n; ++k) kids[topo.parent[k]].push_back(k);
    return kids;
}

SlotAllocation uniform_slots(double frame_s, int n_d) {
    if (n_d < 1 || !(frame_s > 0.0)) throw std::invalid_argument("uniform_slots: bad arguments");
    return SlotAllocation{std::vector<double>(n_d, frame_s / n_d)};
}

bool slots_valid(const SlotAllocation& slots, double frame_s, double epsilon2) {
    if (slots.t.empty()) return false;
    for (double v : slots.t)
        if (!(v >= epsilon2) || !std::isfinite(v)) return false;
    const double sum = stable_sum(std::span<const double>(slots.t));
    return std::abs(sum - frame_s) <= 1e-12 * frame_s;
}

}  // namespace relay
