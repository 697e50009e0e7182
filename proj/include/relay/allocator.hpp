#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "relay/network.hpp"

namespace relay {

struct IbParams {
    double epsilon1 = 1e-6;   // bits/Hz, convergence threshold on max R - min R
    double epsilon2 = 1e-7;   // seconds, minimum allocatable slot
    double delta0 = 0.0;      // seconds, initial transfer step; 0 -> T/(2*n_d)
    long max_iters = 100000;  // safety cap on transfer attempts
};

// Emitted after every transfer attempt; tests use it to assert per-step slot
// conservation, the slot floor and gap monotonicity. `ticks` is the internal
// integer slot state (frame = 2^53 ticks), valid only during the callback.
struct IbStep {
    long iter = 0;
    bool accepted = false;
    double gap = 0.0;              // tracked gap after the attempt
    long long delta_ticks = 0;     // step size used
    std::span<const long long> ticks;
};
using IbObserver = std::function<void(const IbStep&)>;

struct IbResult {
    SlotAllocation slots;
    double r_min = 0.0;
    double gap = 0.0;  // final max R - min R
    long iters = 0;
    bool converged = false;  // true iff gap <= epsilon1
};

// Max-min fair slot allocation for a fixed topology: repeatedly move a step
// of time from the highest-budget node to the lowest, accepting only steps
// that strictly shrink the max-min gap and halving the step otherwise.
// The slot total is conserved exactly (integer transfers) and no slot drops
// below epsilon2. Non-convergence within max_iters or after the step
// underflows is flagged, never silently reported as converged.
IbResult ib_allocate(const Topology& topo, const LinkCoefficients& coef, const SlotAllocation& init,
                     const IbParams& params, const IbObserver& observer = {});

// Same loop with the looser threshold epsilon1_prime; used for GA scoring
// where candidates only need to be comparable, not precise.
IbResult ib_evaluate_tolerant(const Topology& topo, const LinkCoefficients& coef, const SlotAllocation& init,
                              const IbParams& params, double epsilon1_prime);

}  // namespace relay
