#pragma once

#include <algorithm>
#include <cmath>

#include "edgereg/image.hpp"

namespace edgereg {

/// Number of squarings K used by scaling-and-squaring. exp(v) is
/// approximated by halving v K times and composing the small
/// displacement with itself K times.
struct SquaringConfig {
    int steps = 6; // 0..12

    void validate() const {
        if (steps < 0 || steps > 12)
            throw data_error("SquaringConfig: steps must lie in [0,12]");
    }
};

/// Bilinear sample location with border clamping. Values interpolate with
/// the flat weight form w_ij = fx-part * fy-part, which reproduces grid
/// samples exactly at integer positions. Position derivatives use the cell
/// containing the point with ties broken toward the lower cell;
/// `dx_active`/`dy_active` are false where the clamp makes the derivative
/// vanish.
struct BilinearLocation {
    int x0, x1, y0, y1;
    double fx, fy;
    bool dx_active, dy_active;

    double w00() const { return (1.0 - fx) * (1.0 - fy); }
    double w10() const { return fx * (1.0 - fy); }
    double w01() const { return (1.0 - fx) * fy; }
    double w11() const { return fx * fy; }

    /// Cell for the x-derivative (lower cell at integer positions).
    void slope_cells_x(int& a, int& b) const {
        if (fx == 0.0 && x0 > 0) {
            a = x0 - 1;
            b = x0;
        } else {
            a = x0;
            b = x1;
        }
    }
    void slope_cells_y(int& a, int& b) const {
        if (fy == 0.0 && y0 > 0) {
            a = y0 - 1;
            b = y0;
        } else {
            a = y0;
            b = y1;
        }
    }
};

inline BilinearLocation locate_bilinear(double px, double py, int w, int h) {
    BilinearLocation loc;
    loc.dx_active = px >= 0.0 && px <= w - 1 && w > 1;
    loc.dy_active = py >= 0.0 && py <= h - 1 && h > 1;
    const double cx = std::min(std::max(px, 0.0), static_cast<double>(w - 1));
    const double cy = std::min(std::max(py, 0.0), static_cast<double>(h - 1));
    if (w > 1) {
        loc.x0 = std::min(static_cast<int>(cx), w - 2);
        loc.x1 = loc.x0 + 1;
    } else {
        loc.x0 = loc.x1 = 0;
    }
    if (h > 1) {
        loc.y0 = std::min(static_cast<int>(cy), h - 2);
        loc.y1 = loc.y0 + 1;
    } else {
        loc.y0 = loc.y1 = 0;
    }
    loc.fx = cx - loc.x0;
    loc.fy = cy - loc.y0;
    return loc;
}

/// Displacement of the composition phi_outer . phi_inner:
/// result(x) = u_outer(x + u_inner(x)) + u_inner(x).
VectorField2D compose(const VectorField2D& u_outer, const VectorField2D& u_inner);

/// Displacement u with x + u(x) = exp(v)(x), by scaling and squaring.
VectorField2D svf_exp(const VectorField2D& v, const SquaringConfig& cfg);

/// out(x) = img(x + u(x)) by bilinear interpolation, border-clamped.
Image2D warp_image(const Image2D& img, const VectorField2D& u);

/// Nearest-neighbor warp for label maps.
LabelMap2D warp_labels_nn(const LabelMap2D& labels, const VectorField2D& u);

/// dL/du for L = sum_x dL_dout(x) * img(x + u(x)):
/// (dL/du)(x) = dL_dout(x) * grad img at x + u(x) (bilinear derivative).
VectorField2D warp_adjoint(const Image2D& img, const VectorField2D& u, const Image2D& dL_dout);

/// Reverse-mode of svf_exp: replays the K squarings and back-propagates
/// through each self-composition.
VectorField2D svf_exp_adjoint(const VectorField2D& v, const SquaringConfig& cfg,
                              const VectorField2D& dL_du);

/// J(x) = det of d(x + u(x))/dx, central differences in the interior and
/// one-sided differences at the borders.
Image2D jacobian_determinant(const VectorField2D& u);

} // namespace edgereg
