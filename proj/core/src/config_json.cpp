#include <json.hpp>

#include "edgereg/registration.hpp"

namespace edgereg {

std::string registration_config_to_json(const RegistrationConfig& cfg) {
    nlohmann::ordered_json j;
    j["lambda1"] = cfg.lambda1;
    j["lambda2"] = cfg.lambda2;
    j["lambda3"] = cfg.lambda3;
    j["im_sim"] = to_string(cfg.im_sim);
    j["ed_sim"] = to_string(cfg.ed_sim);
    j["model"] = to_string(cfg.model);
    j["spacing"] = cfg.spacing;
    j["squaring_steps"] = cfg.squaring_steps;
    j["levels"] = cfg.levels;
    j["iters_per_level"] = cfg.iters_per_level;
    j["lr0"] = cfg.optimizer.lr0;
    j["beta1"] = cfg.optimizer.beta1;
    j["beta2"] = cfg.optimizer.beta2;
    j["eps_adam"] = cfg.optimizer.eps_adam;
    j["decay_factor"] = cfg.optimizer.decay_factor;
    j["decay_every"] = cfg.optimizer.decay_every;
    j["window"] = cfg.window;
    j["lncc_eps"] = cfg.lncc_eps;
    j["bins"] = cfg.bins;
    j["sigma_ratio"] = cfg.sigma_ratio;
    j["eps_rel"] = cfg.eps_rel;
    j["sigma_pre"] = cfg.sigma_pre;
    j["edge_normalize"] = cfg.edge_normalize;
    j["seed"] = cfg.seed;
    return j.dump();
}

RegistrationConfig registration_config_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("config JSON parse error: ") + e.what());
    }
    RegistrationConfig cfg;
    try {
        if (j.contains("lambda1")) cfg.lambda1 = j["lambda1"].get<double>();
        if (j.contains("lambda2")) cfg.lambda2 = j["lambda2"].get<double>();
        if (j.contains("lambda3")) cfg.lambda3 = j["lambda3"].get<double>();
        if (j.contains("im_sim")) cfg.im_sim = image_loss_from_string(j["im_sim"].get<std::string>());
        if (j.contains("ed_sim")) cfg.ed_sim = edge_loss_from_string(j["ed_sim"].get<std::string>());
        if (j.contains("model"))
            cfg.model = transform_model_from_string(j["model"].get<std::string>());
        if (j.contains("spacing")) cfg.spacing = j["spacing"].get<int>();
        if (j.contains("squaring_steps")) cfg.squaring_steps = j["squaring_steps"].get<int>();
        if (j.contains("levels")) cfg.levels = j["levels"].get<int>();
        if (j.contains("iters_per_level")) cfg.iters_per_level = j["iters_per_level"].get<int>();
        if (j.contains("lr0")) cfg.optimizer.lr0 = j["lr0"].get<double>();
        if (j.contains("beta1")) cfg.optimizer.beta1 = j["beta1"].get<double>();
        if (j.contains("beta2")) cfg.optimizer.beta2 = j["beta2"].get<double>();
        if (j.contains("eps_adam")) cfg.optimizer.eps_adam = j["eps_adam"].get<double>();
        if (j.contains("decay_factor")) cfg.optimizer.decay_factor = j["decay_factor"].get<double>();
        if (j.contains("decay_every")) cfg.optimizer.decay_every = j["decay_every"].get<int>();
        if (j.contains("window")) cfg.window = j["window"].get<int>();
        if (j.contains("lncc_eps")) cfg.lncc_eps = j["lncc_eps"].get<double>();
        if (j.contains("bins")) cfg.bins = j["bins"].get<int>();
        if (j.contains("sigma_ratio")) cfg.sigma_ratio = j["sigma_ratio"].get<double>();
        if (j.contains("eps_rel")) cfg.eps_rel = j["eps_rel"].get<double>();
        if (j.contains("sigma_pre")) cfg.sigma_pre = j["sigma_pre"].get<double>();
        if (j.contains("edge_normalize")) cfg.edge_normalize = j["edge_normalize"].get<bool>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("config JSON type error: ") + e.what());
    }
    return cfg;
}

} // namespace edgereg
