#pragma once

#include "edgereg/image.hpp"

namespace edgereg {

/// Per-pixel intensity gradient: central differences in the interior,
/// one-sided differences on the boundary rows/columns. Requires >= 2x2.
VectorField2D gradient_central(const Image2D& img);

/// Exact transpose of gradient_central, used to chain loss gradients
/// through gradient-based metrics.
Image2D gradient_central_adjoint(const VectorField2D& grad);

/// Separable Gaussian smoothing, kernel truncated at 3*sigma,
/// replicate-padded. Identity for sigma <= 0.
Image2D gaussian_smooth(const Image2D& img, double sigma);

/// Gradient-magnitude edge map: optional pre-smoothing, then
/// sqrt(Gx^2 + Gy^2), then (when normalize) rescaled by 1/max so the
/// result lies in [0,1].
Image2D edge_map(const Image2D& img, double sigma_pre, bool normalize = true);

} // namespace edgereg
