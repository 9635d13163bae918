#pragma once

#include "edgereg/image.hpp"

namespace edgereg {

/// Cubic B-spline control-point lattice parameterizing a velocity field.
/// Storage row-major with (dx,dy) interleaved; storage index i maps to the
/// lattice position (i-1)*spacing in pixels, so the support of the cubic
/// kernels covers the whole image: cp_width = ceil(width/spacing) + 3.
struct BSplineGrid {
    int spacing = 8; // pixels, >= 2
    int cp_width = 0;
    int cp_height = 0;
    std::vector<double> control_points; // 2 * cp_width * cp_height

    size_t count() const { return static_cast<size_t>(cp_width) * cp_height; }
    double& cx(int i, int j) { return control_points[2 * (static_cast<size_t>(j) * cp_width + i)]; }
    double& cy(int i, int j) { return control_points[2 * (static_cast<size_t>(j) * cp_width + i) + 1]; }
    double cx(int i, int j) const { return control_points[2 * (static_cast<size_t>(j) * cp_width + i)]; }
    double cy(int i, int j) const { return control_points[2 * (static_cast<size_t>(j) * cp_width + i) + 1]; }
};

/// Zero-initialized grid covering a width x height image.
BSplineGrid make_bspline_grid(int width, int height, int spacing);

/// Cubic B-spline basis at fractional offset u in [0,1).
inline void bspline_weights(double u, double w[4]) {
    const double u2 = u * u, u3 = u2 * u;
    const double mu = 1.0 - u;
    w[0] = mu * mu * mu / 6.0;
    w[1] = (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0;
    w[2] = (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0;
    w[3] = u3 / 6.0;
}

/// Tensor-product expansion of the lattice to a dense per-pixel field.
VectorField2D bspline_to_dense(const BSplineGrid& grid, int width, int height);

/// Spline value at an arbitrary (clamped) image position.
void bspline_eval(const BSplineGrid& grid, double x, double y, double& out_x, double& out_y);

/// Exact transpose of bspline_to_dense: accumulates dL/d(control points)
/// from a dense field gradient.
BSplineGrid bspline_adjoint(const BSplineGrid& grid, const VectorField2D& dL_dv);

} // namespace edgereg
