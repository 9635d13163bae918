#pragma once

#include <cstdint>

#include "edgereg/image.hpp"

namespace edgereg {

/// Seeded multi-modal phantom pair with ground truth. `moving` is the
/// modality-B rendering warped by `gt_displacement`; the segmentation is
/// carried along with nearest-neighbor sampling.
struct PhantomPair {
    Image2D fixed;
    Image2D moving;
    LabelMap2D fixed_seg;
    LabelMap2D moving_seg;
    VectorField2D gt_displacement;
    uint64_t seed = 0;
};

/// Five nested perturbed regions (background, outer ring, three interior
/// structures) rendered in two modalities with a non-monotone intensity
/// permutation between them. Returns (labels, modality A, modality B).
/// noise_sigma and with_bias exist so tests can switch off the corruption.
void make_phantom(uint64_t seed, int size, LabelMap2D& labels, Image2D& modality_a,
                  Image2D& modality_b, double noise_sigma = 0.02, bool with_bias = true);

/// Smoothed seeded white noise, rescaled so the max-norm displacement of
/// its exponential equals max_disp within 5%. smooth_sigma <= 0 selects
/// the default size/12.
VectorField2D random_smooth_svf(uint64_t seed, int size, double max_disp,
                                double smooth_sigma = 0.0);

/// Complete benchmark pair: fixed = modality A, moving = warped modality B.
PhantomPair make_pair(uint64_t seed, int size, double max_disp);

} // namespace edgereg
