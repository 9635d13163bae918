// Command-line entry point: edgemap, synth, register, eval and bench
// workflows over PGM images and EDR1 displacement fields.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgereg/bench.hpp"
#include "edgereg/edge_map.hpp"
#include "edgereg/eval.hpp"
#include "edgereg/io.hpp"
#include "edgereg/registration.hpp"
#include "edgereg/synth.hpp"

namespace fs = std::filesystem;
using namespace edgereg;

namespace {

int env_thread_cap() {
    const char* env = std::getenv("EDGEREG_THREADS");
    if (!env) return 0;
    const int v = std::atoi(env);
    if (v < 1) throw data_error("EDGEREG_THREADS must be a positive integer");
    return v;
}

int effective_jobs(int requested) {
    int jobs = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    const int cap = env_thread_cap();
    if (cap > 0) jobs = std::min(jobs, cap);
    return jobs;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            size_t used = 0;
            values.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw data_error(std::string(flag) + ": cannot parse \"" + tok + "\" as a number");
        }
    }
    if (values.empty()) throw data_error(std::string(flag) + ": empty list");
    return values;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw data_error(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw data_error(path.string() + ": write failed");
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error(path.string() + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// String-typed mirrors of the enum fields, bound to CLI11 options.
struct RegFlags {
    std::string im_sim;
    std::string ed_sim;
    std::string model;

    void load_from(const RegistrationConfig& cfg) {
        im_sim = to_string(cfg.im_sim);
        ed_sim = to_string(cfg.ed_sim);
        model = to_string(cfg.model);
    }
    void store_to(RegistrationConfig& cfg) const {
        cfg.im_sim = image_loss_from_string(im_sim);
        cfg.ed_sim = edge_loss_from_string(ed_sim);
        cfg.model = transform_model_from_string(model);
    }
};

void add_registration_flags(CLI::App* cmd, RegistrationConfig& cfg, RegFlags& flags,
                            bool include_seed = true) {
    flags.load_from(cfg);
    cmd->add_option("--lambda1", cfg.lambda1, "image similarity weight")->capture_default_str();
    cmd->add_option("--lambda2", cfg.lambda2, "edge similarity weight")->capture_default_str();
    cmd->add_option("--lambda3", cfg.lambda3, "velocity regularizer weight")->capture_default_str();
    cmd->add_option("--im-sim", flags.im_sim, "image similarity loss")
        ->check(CLI::IsMember({"lncc", "nmi", "ngf", "mse"}))
        ->capture_default_str();
    cmd->add_option("--ed-sim", flags.ed_sim, "edge similarity loss")
        ->check(CLI::IsMember({"lncc", "mse", "none"}))
        ->capture_default_str();
    cmd->add_option("--model", flags.model, "transform parameterization")
        ->check(CLI::IsMember({"svf-dense", "svf-bspline"}))
        ->capture_default_str();
    cmd->add_option("--spacing", cfg.spacing, "B-spline control spacing, px")->capture_default_str();
    cmd->add_option("--squaring-steps", cfg.squaring_steps, "scaling-and-squaring steps K")
        ->capture_default_str();
    cmd->add_option("--levels", cfg.levels, "pyramid levels")->capture_default_str();
    cmd->add_option("--iters-per-level", cfg.iters_per_level, "optimizer iterations per level")
        ->capture_default_str();
    cmd->add_option("--lr0", cfg.optimizer.lr0, "initial learning rate")->capture_default_str();
    cmd->add_option("--beta1", cfg.optimizer.beta1, "Adam beta1")->capture_default_str();
    cmd->add_option("--beta2", cfg.optimizer.beta2, "Adam beta2")->capture_default_str();
    cmd->add_option("--eps-adam", cfg.optimizer.eps_adam, "Adam epsilon")->capture_default_str();
    cmd->add_option("--decay-factor", cfg.optimizer.decay_factor, "learning rate decay factor")
        ->capture_default_str();
    cmd->add_option("--decay-every", cfg.optimizer.decay_every, "iterations between decays")
        ->capture_default_str();
    cmd->add_option("--window", cfg.window, "LNCC window, px (odd)")->capture_default_str();
    cmd->add_option("--lncc-eps", cfg.lncc_eps, "LNCC denominator epsilon")->capture_default_str();
    cmd->add_option("--bins", cfg.bins, "NMI histogram bins")->capture_default_str();
    cmd->add_option("--sigma-ratio", cfg.sigma_ratio, "NMI Parzen sigma in bin widths")
        ->capture_default_str();
    cmd->add_option("--eps-rel", cfg.eps_rel, "NGF epsilon relative to mean gradient")
        ->capture_default_str();
    cmd->add_option("--sigma-pre", cfg.sigma_pre, "edge map pre-smoothing sigma, px")
        ->capture_default_str();
    cmd->add_flag("--edge-normalize,!--no-edge-normalize", cfg.edge_normalize,
                  "rescale edge maps to [0,1]")
        ->capture_default_str();
    if (include_seed)
        cmd->add_option("--seed", cfg.seed, "seed echoed into reports")->capture_default_str();
}

nlohmann::ordered_json loss_terms_json(const LossTerms& t) {
    return nlohmann::ordered_json{{"l1", t.l1}, {"l2", t.l2}, {"l3", t.l3}, {"total", t.total}};
}

int run_edgemap(const std::string& input, const std::string& out, double sigma, bool normalize) {
    const Image2D img = load_pgm(input);
    const Image2D e = edge_map(img, sigma, normalize);
    save_pgm(e, out);
    return 0;
}

int run_synth(uint64_t seed, int size, double max_disp, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const PhantomPair pair = make_pair(seed, size, max_disp);
    save_pgm(pair.fixed, (out_dir / "fixed.pgm").string());
    save_pgm(pair.moving, (out_dir / "moving.pgm").string());
    save_label_pgm(pair.fixed_seg, (out_dir / "fixed_seg.pgm").string());
    save_label_pgm(pair.moving_seg, (out_dir / "moving_seg.pgm").string());
    write_field(pair.gt_displacement, (out_dir / "gt_disp.edr1").string());

    nlohmann::ordered_json manifest;
    manifest["seed"] = seed;
    manifest["size"] = size;
    manifest["max_disp"] = max_disp;
    manifest["files"] = {"fixed.pgm", "moving.pgm", "fixed_seg.pgm", "moving_seg.pgm",
                         "gt_disp.edr1"};
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return 0;
}

int run_register(const std::string& fixed_path, const std::string& moving_path,
                 const RegistrationConfig& cfg, const fs::path& out_dir) {
    const Image2D fixed = normalize_minmax(load_pgm(fixed_path));
    const Image2D moving = normalize_minmax(load_pgm(moving_path));
    const RegistrationResult result = register_pair(fixed, moving, cfg);

    fs::create_directories(out_dir);
    write_field(result.displacement, (out_dir / "disp.edr1").string());
    save_pgm(warp_image(moving, result.displacement), (out_dir / "warped.pgm").string());

    const auto [fold_ratio, grad_jac_mean] = jacobian_stats(result.displacement);
    nlohmann::ordered_json report;
    report["config"] = nlohmann::ordered_json::parse(registration_config_to_json(cfg));
    report["runtime_ms"] = result.runtime_ms;
    report["iterations"] = result.loss_history.size();
    report["loss_initial"] = loss_terms_json(result.loss_history.front());
    report["loss_final"] = loss_terms_json(result.loss_history.back());
    report["fold_ratio"] = fold_ratio;
    report["grad_jac_mean"] = grad_jac_mean;
    nlohmann::ordered_json history = nlohmann::ordered_json::array();
    for (const LossTerms& t : result.loss_history) history.push_back(loss_terms_json(t));
    report["loss_history"] = history;
    write_text_file(out_dir / "report.json", report.dump(2) + "\n");
    return 0;
}

int run_eval(const std::string& fixed_seg_path, const std::string& moving_seg_path,
             const std::string& disp_path, const std::string& out_path) {
    const LabelMap2D fixed_seg = load_label_pgm(fixed_seg_path);
    const LabelMap2D moving_seg = load_label_pgm(moving_seg_path);
    VectorField2D disp(fixed_seg.width, fixed_seg.height);
    if (!disp_path.empty()) disp = read_field(disp_path);
    const EvalReport report = evaluate_labels(fixed_seg, moving_seg, disp);
    write_text_file(out_path, eval_report_to_json(report) + "\n");
    return 0;
}

int run_bench_cmd(BenchConfig cfg, const fs::path& out_dir) {
    cfg.jobs = effective_jobs(cfg.jobs);
    std::cerr << "bench: " << cfg.pairs << " pairs x " << cfg.image_losses.size()
              << " losses x " << cfg.sweep_lambda2.size() << " lambda2 x "
              << cfg.sweep_lambda3.size() << " lambda3, jobs=" << cfg.jobs << "\n";
    const BenchResult result = run_bench(cfg);
    fs::create_directories(out_dir);
    write_text_file(out_dir / "results.csv", result.csv);
    double total_ms = 0.0;
    for (const BenchRow& row : result.rows) total_ms += row.runtime_ms;
    std::cerr << "bench: " << result.rows.size() << " cells, total registration time "
              << static_cast<long>(total_ms) << " ms\n";
    return 0;
}

// The --config file provides defaults; explicitly passed flags override it.
// Applied before CLI11 binds the option defaults.
RegistrationConfig preload_config(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc)
            return registration_config_from_json(read_text_file(argv[i + 1]));
        if (arg.rfind("--config=", 0) == 0)
            return registration_config_from_json(read_text_file(arg.substr(9)));
    }
    return RegistrationConfig{};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"edgereg: diffeomorphic multi-modal 2D registration with an edge-map branch"};
    app.require_subcommand(1);

    int exit_code = 0;

    try {
        RegistrationConfig base_cfg = preload_config(argc, argv);
        std::string config_path; // consumed by preload_config; registered for --help

        // edgemap
        auto* cmd_edge = app.add_subcommand("edgemap", "compute a gradient-magnitude edge map");
        std::string edge_in, edge_out;
        double edge_sigma = 1.0;
        bool edge_norm = true;
        cmd_edge->add_option("--input", edge_in, "input PGM")->required();
        cmd_edge->add_option("--out", edge_out, "output PGM")->required();
        cmd_edge->add_option("--sigma", edge_sigma, "pre-smoothing sigma, px")->capture_default_str();
        cmd_edge->add_flag("--edge-normalize,!--no-edge-normalize", edge_norm,
                           "rescale to [0,1]")->capture_default_str();
        cmd_edge->callback([&] { exit_code = run_edgemap(edge_in, edge_out, edge_sigma, edge_norm); });

        // synth
        auto* cmd_synth = app.add_subcommand("synth", "generate a seeded multi-modal phantom pair");
        uint64_t synth_seed = 0;
        int synth_size = 192;
        double synth_disp = 8.0;
        std::string synth_out;
        cmd_synth->add_option("--seed", synth_seed, "phantom seed")->capture_default_str();
        cmd_synth->add_option("--size", synth_size, "image size, px")->capture_default_str();
        cmd_synth->add_option("--max-disp", synth_disp, "ground-truth max displacement, px")
            ->capture_default_str();
        cmd_synth->add_option("--out", synth_out, "output directory")->required();
        cmd_synth->callback([&] { exit_code = run_synth(synth_seed, synth_size, synth_disp, synth_out); });

        // register
        auto* cmd_reg = app.add_subcommand("register", "register a moving image onto a fixed image");
        std::string reg_fixed, reg_moving, reg_out;
        RegFlags reg_flags;
        cmd_reg->add_option("--fixed", reg_fixed, "fixed image PGM")->required();
        cmd_reg->add_option("--moving", reg_moving, "moving image PGM")->required();
        cmd_reg->add_option("--out", reg_out, "output directory")->required();
        cmd_reg->add_option("--config", config_path, "JSON config file (flags override)");
        add_registration_flags(cmd_reg, base_cfg, reg_flags);
        cmd_reg->callback([&] {
            reg_flags.store_to(base_cfg);
            exit_code = run_register(reg_fixed, reg_moving, base_cfg, reg_out);
        });

        // eval
        auto* cmd_eval = app.add_subcommand("eval", "score a displacement against segmentations");
        std::string eval_fseg, eval_mseg, eval_disp, eval_out;
        cmd_eval->add_option("--fixed-seg", eval_fseg, "fixed segmentation PGM")->required();
        cmd_eval->add_option("--moving-seg", eval_mseg, "moving segmentation PGM")->required();
        cmd_eval->add_option("--disp", eval_disp, "EDR1 displacement (identity when omitted)");
        cmd_eval->add_option("--out", eval_out, "output report JSON")->required();
        cmd_eval->callback([&] { exit_code = run_eval(eval_fseg, eval_mseg, eval_disp, eval_out); });

        // bench
        auto* cmd_bench = app.add_subcommand(
            "bench", "sweep edge weight and losses over seeded synthetic pairs");
        BenchConfig bench_cfg;
        RegFlags bench_flags;
        std::string bench_out, sweep_l2 = "0,0.5,1,2", sweep_l3 = "0.1", losses = "lncc,nmi,ngf";
        int bench_jobs = 0;
        cmd_bench->add_option("--pairs", bench_cfg.pairs, "number of phantom pairs")
            ->capture_default_str();
        cmd_bench->add_option("--seed", bench_cfg.seed, "base seed (pair p uses seed+p)")
            ->capture_default_str();
        cmd_bench->add_option("--size", bench_cfg.size, "phantom size, px")->capture_default_str();
        cmd_bench->add_option("--max-disp", bench_cfg.max_disp, "ground-truth max displacement, px")
            ->capture_default_str();
        cmd_bench->add_option("--sweep-lambda2", sweep_l2, "comma-separated lambda2 values")
            ->capture_default_str();
        cmd_bench->add_option("--sweep-lambda3", sweep_l3, "comma-separated lambda3 values")
            ->capture_default_str();
        cmd_bench->add_option("--losses", losses, "comma-separated image losses")
            ->capture_default_str();
        cmd_bench->add_option("--jobs", bench_jobs, "worker threads (0 = all cores)")
            ->capture_default_str();
        cmd_bench->add_option("--out", bench_out, "output directory")->required();
        cmd_bench->add_option("--config", config_path, "JSON config file (flags override)");
        add_registration_flags(cmd_bench, base_cfg, bench_flags, /*include_seed=*/false);
        cmd_bench->callback([&] {
            bench_flags.store_to(base_cfg);
            bench_cfg.base = base_cfg;
            bench_cfg.jobs = bench_jobs;
            bench_cfg.sweep_lambda2 = parse_double_list(sweep_l2, "--sweep-lambda2");
            bench_cfg.sweep_lambda3 = parse_double_list(sweep_l3, "--sweep-lambda3");
            bench_cfg.image_losses.clear();
            std::stringstream ss(losses);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) bench_cfg.image_losses.push_back(image_loss_from_string(tok));
            exit_code = run_bench_cmd(bench_cfg, bench_out);
        });

        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const divergence_error& e) {
        std::cerr << "error: " << e.what() << " (iteration " << e.iteration() << ")\n";
        return 3;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
