#include "edgereg/bench.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

#include "edgereg/synth.hpp"

namespace edgereg {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

std::string bench_csv_header() {
    return "pair,seed,im_sim,ed_sim,lambda1,lambda2,lambda3,dice_pre,dice_post,"
           "fold_ratio,grad_jac_mean";
}

std::string bench_csv_row(const BenchRow& row) {
    std::string s;
    s += std::to_string(row.pair);
    s += ',';
    s += std::to_string(row.seed);
    s += ',';
    s += to_string(row.im_sim);
    s += ',';
    s += row.lambda2 == 0.0 ? "none" : to_string(row.ed_sim);
    s += ',';
    s += fmt_double(1.0);
    s += ',';
    s += fmt_double(row.lambda2);
    s += ',';
    s += fmt_double(row.lambda3);
    s += ',';
    s += fmt_double(row.dice_pre);
    s += ',';
    s += fmt_double(row.dice_post);
    s += ',';
    s += fmt_double(row.fold_ratio);
    s += ',';
    s += fmt_double(row.grad_jac_mean);
    return s;
}

BenchResult run_bench(const BenchConfig& cfg) {
    if (cfg.pairs < 1) throw data_error("run_bench: pairs must be >= 1");
    if (cfg.image_losses.empty() || cfg.sweep_lambda2.empty() || cfg.sweep_lambda3.empty())
        throw data_error("run_bench: empty sweep");

    // Phantom pairs are generated up front and shared read-only by workers.
    std::vector<PhantomPair> pairs;
    std::vector<double> dice_pre(cfg.pairs);
    pairs.reserve(cfg.pairs);
    for (int p = 0; p < cfg.pairs; ++p) {
        pairs.push_back(make_pair(cfg.seed + static_cast<uint64_t>(p), cfg.size, cfg.max_disp));
        const VectorField2D identity(cfg.size, cfg.size);
        dice_pre[p] = evaluate_labels(pairs[p].fixed_seg, pairs[p].moving_seg, identity).dice_mean;
    }

    const size_t n_losses = cfg.image_losses.size();
    const size_t n_l2 = cfg.sweep_lambda2.size();
    const size_t n_l3 = cfg.sweep_lambda3.size();
    const size_t n_cells = static_cast<size_t>(cfg.pairs) * n_losses * n_l2 * n_l3;

    BenchResult result;
    result.rows.resize(n_cells);

    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (!failed.load()) {
            const size_t cell = next.fetch_add(1);
            if (cell >= n_cells) break;
            size_t rest = cell;
            const size_t i3 = rest % n_l3;
            rest /= n_l3;
            const size_t i2 = rest % n_l2;
            rest /= n_l2;
            const size_t il = rest % n_losses;
            const int p = static_cast<int>(rest / n_losses);

            RegistrationConfig reg = cfg.base;
            reg.im_sim = cfg.image_losses[il];
            reg.lambda2 = cfg.sweep_lambda2[i2];
            reg.lambda3 = cfg.sweep_lambda3[i3];
            reg.seed = pairs[p].seed;
            try {
                const RegistrationResult run = register_pair(pairs[p].fixed, pairs[p].moving, reg);
                const EvalReport report = evaluate_registration(pairs[p], run, reg);
                BenchRow& row = result.rows[cell];
                row.pair = p;
                row.seed = pairs[p].seed;
                row.im_sim = reg.im_sim;
                row.ed_sim = reg.ed_sim;
                row.lambda2 = reg.lambda2;
                row.lambda3 = reg.lambda3;
                row.dice_pre = dice_pre[p];
                row.dice_post = report.dice_mean;
                row.fold_ratio = report.fold_ratio;
                row.grad_jac_mean = report.grad_jac_mean;
                row.runtime_ms = run.runtime_ms;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                error_message = e.what();
                failed.store(true);
            }
        }
    };

    const size_t n_threads = std::min<size_t>(std::max(cfg.jobs, 1), n_cells);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failed.load()) throw data_error("run_bench: cell failed: " + error_message);

    result.csv = bench_csv_header();
    result.csv += '\n';
    for (const BenchRow& row : result.rows) {
        result.csv += bench_csv_row(row);
        result.csv += '\n';
    }
    return result;
}

} // namespace edgereg
