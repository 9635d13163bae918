#pragma once

#include <vector>

#include "edgereg/errors.hpp"

namespace edgereg {

/// Adam hyperparameters plus a step-decay schedule:
/// lr(t) = lr0 * decay_factor^floor((t-1)/decay_every).
struct OptimizerConfig {
    double lr0 = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    double decay_factor = 0.1;
    int decay_every = 100;

    void validate() const {
        if (lr0 <= 0.0) throw data_error("OptimizerConfig: lr0 must be positive");
        if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0)
            throw data_error("OptimizerConfig: betas must lie in (0,1)");
        if (eps_adam <= 0.0) throw data_error("OptimizerConfig: eps_adam must be positive");
        if (decay_factor <= 0.0 || decay_factor > 1.0)
            throw data_error("OptimizerConfig: decay_factor must lie in (0,1]");
        if (decay_every <= 0) throw data_error("OptimizerConfig: decay_every must be positive");
    }
};

/// First/second-moment accumulators and the step counter.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;

    explicit AdamState(size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// Learning rate at step t (1-based).
double lr_at(long t, const OptimizerConfig& cfg);

/// One bias-corrected Adam update, in place. Throws divergence_error on a
/// non-finite gradient.
void adam_step(AdamState& state, std::vector<double>& params, const std::vector<double>& grad,
               const OptimizerConfig& cfg);

} // namespace edgereg
