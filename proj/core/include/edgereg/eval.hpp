#pragma once

#include <map>
#include <set>
#include <string>

#include "edgereg/image.hpp"
#include "edgereg/registration.hpp"
#include "edgereg/synth.hpp"

namespace edgereg {

/// Registration accuracy and regularity metrics for one run.
struct EvalReport {
    std::map<int32_t, double> dice_per_label;
    double dice_mean = 0.0;
    double fold_ratio = 0.0;    // fraction of pixels with J < 0
    double grad_jac_mean = 0.0; // mean |grad J|
    double runtime_ms = 0.0;
    std::string config_json = "{}"; // config echo

    bool operator==(const EvalReport&) const = default;
};

/// Per-label overlap 2|A and B| / (|A| + |B|). Labels absent from both maps
/// are omitted from the result.
std::map<int32_t, double> dice(const LabelMap2D& a, const LabelMap2D& b,
                               const std::set<int32_t>& labels);

/// (fold_ratio, grad_jac_mean) of a displacement field.
std::pair<double, double> jacobian_stats(const VectorField2D& u);

/// Warps moving_seg by the displacement (nearest neighbor), scores Dice over
/// the non-background labels present in either map, and attaches Jacobian
/// statistics.
EvalReport evaluate_labels(const LabelMap2D& fixed_seg, const LabelMap2D& moving_seg,
                           const VectorField2D& displacement);

EvalReport evaluate_registration(const PhantomPair& pair, const RegistrationResult& result,
                                 const RegistrationConfig& cfg);

std::string eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(const std::string& json_text);

} // namespace edgereg
