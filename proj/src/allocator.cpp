#include "relay/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relay/numeric.hpp"

namespace relay {

namespace {

constexpr int kTickBits = 53;
constexpr long long kTotalTicks = 1LL << kTickBits;

struct BalanceState {
    const LinkCoefficients* coef = nullptr;
    const Topology* topo = nullptr;
    std::vector<std::vector<int>> children;
    double tick_s = 0.0;  // seconds per tick, exact power-of-two fraction of the frame

    std::vector<long long> ticks;
    std::vector<double> slot_s;     // ticks * tick_s
    std::vector<double> own;        // slot_capacity over the uplink
    std::vector<double> child_sum;  // capacity consumed relaying children
    std::vector<double> rate;       // own - child_sum

    void refresh_node(int k) {
        slot_s[k] = static_cast<double>(ticks[k]) * tick_s;
        own[k] = slot_capacity(coef->snr_seconds(k, topo->parent[k]), slot_s[k]);
    }
    void refresh_child_sum(int k) {
        double s = 0.0;
        for (int c : children[k]) s += own[c];
        child_sum[k] = s;
    }
    // Recompute everything affected by a slot change at node k. Values are
    // pure functions of `ticks`, so applying a transfer and transferring back
    // restores the state bit-exactly.
    void touch(int k) {
        refresh_node(k);
        const int p = topo->parent[k];
        if (p < static_cast<int>(child_sum.size())) refresh_child_sum(p);
    }
    void recompute_rates() {
        const int n = static_cast<int>(ticks.size());
        for (int k = 0; k < n; ++k) rate[k] = own[k] - child_sum[k];
    }
};

struct Extremes {
    int max_idx = 0;
    int min_idx = 0;
    double gap = 0.0;
};

// Lowest index wins ties on both ends.
Extremes scan_extremes(const std::vector<double>& rate) {
    Extremes e;
    for (int k = 1; k < static_cast<int>(rate.size()); ++k) {
        if (rate[k] > rate[e.max_idx]) e.max_idx = k;
        if (rate[k] < rate[e.min_idx]) e.min_idx = k;
    }
    e.gap = rate[e.max_idx] - rate[e.min_idx];
    return e;
}

// Highest-rate node that still has ticks to give; -1 when none.
int pick_donor(const std::vector<double>& rate, const std::vector<long long>& ticks, long long floor_ticks) {
    int best = -1;
    for (int k = 0; k < static_cast<int>(rate.size()); ++k) {
        if (ticks[k] <= floor_ticks) continue;
        if (best < 0 || rate[k] > rate[best]) best = k;
    }
    return best;
}

}  // namespace

IbResult ib_allocate(const Topology& topo, const LinkCoefficients& coef, const SlotAllocation& init,
                     const IbParams& params, const IbObserver& observer) {
    const int n = coef.n_d();
    if (!validate_topology(topo, n)) throw std::invalid_argument("ib_allocate: invalid topology");
    if (init.n_d() != n) throw std::invalid_argument("ib_allocate: init size mismatch");
    const double total = stable_sum(std::span<const double>(init.t));
    if (!(total > 0.0) || !std::isfinite(total)) throw std::invalid_argument("ib_allocate: bad slot total");
    if (!(params.epsilon1 > 0.0)) throw std::invalid_argument("ib_allocate: epsilon1 must be > 0");
    if (!(params.epsilon2 > 0.0) || !(params.epsilon2 < total / n))
        throw std::invalid_argument("ib_allocate: epsilon2 out of range");
    for (double v : init.t)
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("ib_allocate: non-positive init slot");

    BalanceState st;
    st.coef = &coef;
    st.topo = &topo;
    st.children = children_of(topo);
    st.tick_s = std::ldexp(total, -kTickBits);

    const long long floor_ticks = static_cast<long long>(std::ceil(params.epsilon2 / st.tick_s)) + 1;

    // Quantize the initial slots onto the tick lattice, clamp to the floor and
    // settle the remainder on the largest slot so the total is exact.
    st.ticks.resize(n);
    long long acc = 0;
    for (int k = 0; k < n; ++k) {
        long long v = std::llround(std::ldexp(init.t[k] / total, kTickBits));
        v = std::max(v, floor_ticks);
        st.ticks[k] = v;
        acc += v;
    }
    {
        int biggest = 0;
        for (int k = 1; k < n; ++k)
            if (st.ticks[k] > st.ticks[biggest]) biggest = k;
        st.ticks[biggest] += kTotalTicks - acc;
        if (st.ticks[biggest] < floor_ticks)
            throw std::invalid_argument("ib_allocate: init slots incompatible with epsilon2 floor");
    }

    st.slot_s.resize(n);
    st.own.resize(n);
    st.child_sum.assign(n, 0.0);
    st.rate.resize(n);
    for (int k = 0; k < n; ++k) st.refresh_node(k);
    for (int k = 0; k < n; ++k) st.refresh_child_sum(k);
    st.recompute_rates();

    long long delta = (params.delta0 > 0.0)
                          ? std::llround(std::ldexp(params.delta0 / total, kTickBits))
                          : kTotalTicks / (2LL * n);
    delta = std::max(delta, 1LL);

    Extremes ext = scan_extremes(st.rate);
    long iters = 0;
    const auto notify = [&](bool accepted, long long used_delta) {
        if (observer)
            observer(IbStep{iters, accepted, ext.gap, used_delta,
                            std::span<const long long>(st.ticks)});
    };

    while (ext.gap > params.epsilon1 && iters < params.max_iters && delta > 0) {
        const int receiver = ext.min_idx;
        const int donor = pick_donor(st.rate, st.ticks, floor_ticks);
        if (donor < 0 || donor == receiver) {
            ++iters;
            delta >>= 1;
            notify(false, 0);
            continue;
        }
        const long long step = std::min(delta, st.ticks[donor] - floor_ticks);
        st.ticks[donor] -= step;
        st.ticks[receiver] += step;
        st.touch(donor);
        st.touch(receiver);
        st.recompute_rates();
        const Extremes after = scan_extremes(st.rate);
        ++iters;
        if (after.gap < ext.gap) {
            ext = after;
            notify(true, step);
        } else {
            st.ticks[donor] += step;
            st.ticks[receiver] -= step;
            st.touch(donor);
            st.touch(receiver);
            st.recompute_rates();
            delta >>= 1;
            notify(false, step);
        }
    }

    IbResult res;
    res.slots.t = st.slot_s;
    res.iters = iters;
    // Report from the public rate function so r_min/gap match what callers
    // would recompute.
    const std::vector<double> rates = rate_budget(topo, res.slots, coef);
    res.r_min = *std::min_element(rates.begin(), rates.end());
    res.gap = *std::max_element(rates.begin(), rates.end()) - res.r_min;
    res.converged = ext.gap <= params.epsilon1;
    return res;
}

IbResult ib_evaluate_tolerant(const Topology& topo, const LinkCoefficients& coef, const SlotAllocation& init,
                              const IbParams& params, double epsilon1_prime) {
    IbParams loose = params;
    loose.epsilon1 = epsilon1_prime;
    return ib_allocate(topo, coef, init, loose);
}

}  // namespace relay
