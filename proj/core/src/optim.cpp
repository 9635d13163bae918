#include "edgereg/optim.hpp"

#include <cmath>

namespace edgereg {

double lr_at(long t, const OptimizerConfig& cfg) {
    if (t < 1) throw data_error("lr_at: t must be >= 1");
    const long k = (t - 1) / cfg.decay_every;
    return cfg.lr0 * std::pow(cfg.decay_factor, static_cast<double>(k));
}

void adam_step(AdamState& state, std::vector<double>& params, const std::vector<double>& grad,
               const OptimizerConfig& cfg) {
    cfg.validate();
    if (params.size() != grad.size() || state.m.size() != params.size() ||
        state.v.size() != params.size())
        throw data_error("adam_step: parameter/gradient/state length mismatch");
    for (double g : grad)
        if (!std::isfinite(g))
            throw divergence_error("adam_step: non-finite gradient", static_cast<int>(state.t));

    state.t += 1;
    const double lr = lr_at(state.t, cfg);
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps_adam);
    }
}

} // namespace edgereg
