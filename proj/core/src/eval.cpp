#include "edgereg/eval.hpp"

#include <cmath>

#include <json.hpp>

#include "edgereg/edge_map.hpp"
#include "edgereg/transform.hpp"

namespace edgereg {

std::map<int32_t, double> dice(const LabelMap2D& a, const LabelMap2D& b,
                               const std::set<int32_t>& labels) {
    if (!a.same_shape(b)) throw data_error("dice: label map shapes differ");
    std::map<int32_t, double> scores;
    for (int32_t lab : labels) {
        size_t n_a = 0, n_b = 0, n_both = 0;
        for (size_t i = 0; i < a.size(); ++i) {
            const bool in_a = a.labels[i] == lab;
            const bool in_b = b.labels[i] == lab;
            n_a += in_a;
            n_b += in_b;
            n_both += in_a && in_b;
        }
        if (n_a + n_b == 0) continue; // absent from both maps: omitted, not 0
        scores[lab] = 2.0 * static_cast<double>(n_both) / static_cast<double>(n_a + n_b);
    }
    return scores;
}

std::pair<double, double> jacobian_stats(const VectorField2D& u) {
    const Image2D jac = jacobian_determinant(u);
    size_t folded = 0;
    for (double j : jac.data) folded += j < 0.0;
    const double fold_ratio = static_cast<double>(folded) / static_cast<double>(jac.size());

    const VectorField2D grad_j = gradient_central(jac);
    double mean = 0.0;
    for (size_t i = 0; i < jac.size(); ++i)
        mean += std::hypot(grad_j.comp[2 * i], grad_j.comp[2 * i + 1]);
    mean /= static_cast<double>(jac.size());
    return {fold_ratio, mean};
}

EvalReport evaluate_labels(const LabelMap2D& fixed_seg, const LabelMap2D& moving_seg,
                           const VectorField2D& displacement) {
    if (!fixed_seg.same_shape(moving_seg))
        throw data_error("evaluate_labels: segmentation shapes differ");
    const LabelMap2D warped = warp_labels_nn(moving_seg, displacement);

    std::set<int32_t> labels;
    for (int32_t l : fixed_seg.labels)
        if (l != 0) labels.insert(l);
    for (int32_t l : warped.labels)
        if (l != 0) labels.insert(l);

    EvalReport report;
    report.dice_per_label = dice(fixed_seg, warped, labels);
    double sum = 0.0;
    for (const auto& [lab, score] : report.dice_per_label) sum += score;
    report.dice_mean = report.dice_per_label.empty()
        ? 0.0
        : sum / static_cast<double>(report.dice_per_label.size());
    std::tie(report.fold_ratio, report.grad_jac_mean) = jacobian_stats(displacement);
    return report;
}

EvalReport evaluate_registration(const PhantomPair& pair, const RegistrationResult& result,
                                 const RegistrationConfig& cfg) {
    EvalReport report = evaluate_labels(pair.fixed_seg, pair.moving_seg, result.displacement);
    report.runtime_ms = result.runtime_ms;
    report.config_json = registration_config_to_json(cfg);
    return report;
}

std::string eval_report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json per_label = nlohmann::ordered_json::object();
    for (const auto& [lab, score] : report.dice_per_label)
        per_label[std::to_string(lab)] = score;
    j["dice_per_label"] = per_label;
    j["dice_mean"] = report.dice_mean;
    j["fold_ratio"] = report.fold_ratio;
    j["grad_jac_mean"] = report.grad_jac_mean;
    j["runtime_ms"] = report.runtime_ms;
    j["config"] = nlohmann::ordered_json::parse(report.config_json);
    return j.dump(2);
}

EvalReport eval_report_from_json(const std::string& json_text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("report JSON parse error: ") + e.what());
    }
    EvalReport report;
    try {
        for (const auto& [key, value] : j.at("dice_per_label").items())
            report.dice_per_label[std::stoi(key)] = value.get<double>();
        report.dice_mean = j.at("dice_mean").get<double>();
        report.fold_ratio = j.at("fold_ratio").get<double>();
        report.grad_jac_mean = j.at("grad_jac_mean").get<double>();
        report.runtime_ms = j.at("runtime_ms").get<double>();
        report.config_json = j.at("config").dump();
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("report JSON field error: ") + e.what());
    }
    return report;
}

} // namespace edgereg
