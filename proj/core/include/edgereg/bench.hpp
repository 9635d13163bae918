#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgereg/eval.hpp"
#include "edgereg/registration.hpp"

namespace edgereg {

/// Sweep grid for the synthetic benchmark: every (pair, image loss,
/// lambda2, lambda3) cell is registered and scored.
struct BenchConfig {
    uint64_t seed = 7;
    int pairs = 10;
    int size = 192;
    double max_disp = 8.0;
    std::vector<ImageLoss> image_losses = {ImageLoss::lncc, ImageLoss::nmi, ImageLoss::ngf};
    std::vector<double> sweep_lambda2 = {0.0, 0.5, 1.0, 2.0};
    std::vector<double> sweep_lambda3 = {0.1};
    RegistrationConfig base; // model, iterations, optimizer, loss parameters
    int jobs = 1;
};

struct BenchRow {
    int pair = 0;
    uint64_t seed = 0;
    ImageLoss im_sim = ImageLoss::lncc;
    EdgeLoss ed_sim = EdgeLoss::lncc;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double dice_pre = 0.0;
    double dice_post = 0.0;
    double fold_ratio = 0.0;
    double grad_jac_mean = 0.0;
    double runtime_ms = 0.0; // not part of the CSV (timings are not reproducible)
};

struct BenchResult {
    std::vector<BenchRow> rows; // fixed order: pair, loss, lambda2, lambda3
    std::string csv;
};

/// Runs the grid with up to cfg.jobs worker threads. Cells are independent
/// and written in grid order, so the CSV is identical for any job count.
BenchResult run_bench(const BenchConfig& cfg);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

} // namespace edgereg
