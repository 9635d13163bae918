#pragma once

#include "edgereg/image.hpp"

namespace edgereg {

/// Scalar loss value plus its gradient with respect to the second
/// (moving/warped) image argument.
struct ImageLossResult {
    double value = 0.0;
    Image2D grad;
};

/// Scalar loss value plus its gradient with respect to a vector field.
struct FieldLossResult {
    double value = 0.0;
    VectorField2D grad;
};

/// Local normalized cross correlation over (window x window) neighborhoods
/// clipped at the borders; value = -mean_x cross^2/(varF*varM + eps).
/// Window sums are unnormalized.
ImageLossResult lncc(const Image2D& F, const Image2D& M, int window = 9, double eps = 1e-5);

/// Differentiable normalized mutual information via Gaussian Parzen soft
/// binning, value = -(H_F + H_M)/H_FM. Intensities must lie in [0,1].
/// Kernel sigma = sigma_ratio/bins in intensity units.
ImageLossResult nmi(const Image2D& F, const Image2D& M, int bins = 64, double sigma_ratio = 0.5);

/// Normalized gradient fields distance,
/// value = mean_x [1 - (gF.gM)^2 / ((|gF|^2+eF^2)(|gM|^2+eM^2))], with
/// eI = eps_rel * mean |gI| per image, floored at 1e-8.
ImageLossResult ngf(const Image2D& F, const Image2D& M, double eps_rel = 0.01);

/// Mean squared error; grad = 2(M-F)/N.
ImageLossResult mse(const Image2D& F, const Image2D& M);

/// Diffusion regularizer on a velocity field: mean over pixels, components
/// and both difference directions of squared forward differences.
FieldLossResult reg_diffusion(const VectorField2D& v);

} // namespace edgereg
