#include "edgereg/bspline.hpp"

#include <cmath>

namespace edgereg {

namespace {

int cp_count(int extent, int spacing) {
    return static_cast<int>(std::ceil(static_cast<double>(extent) / spacing)) + 3;
}

void check_grid(const BSplineGrid& grid, int width, int height, const char* who) {
    if (grid.spacing < 2)
        throw data_error(std::string(who) + ": spacing must be >= 2");
    if (grid.cp_width != cp_count(width, grid.spacing) ||
        grid.cp_height != cp_count(height, grid.spacing))
        throw data_error(std::string(who) + ": grid does not cover the image extent");
    if (grid.control_points.size() != 2 * grid.count())
        throw data_error(std::string(who) + ": control point buffer size mismatch");
}

} // namespace

BSplineGrid make_bspline_grid(int width, int height, int spacing) {
    if (spacing < 2) throw data_error("make_bspline_grid: spacing must be >= 2");
    if (width < 1 || height < 1) throw data_error("make_bspline_grid: empty image");
    BSplineGrid grid;
    grid.spacing = spacing;
    grid.cp_width = cp_count(width, spacing);
    grid.cp_height = cp_count(height, spacing);
    grid.control_points.assign(2 * grid.count(), 0.0);
    return grid;
}

VectorField2D bspline_to_dense(const BSplineGrid& grid, int width, int height) {
    check_grid(grid, width, height, "bspline_to_dense");
    const double inv_s = 1.0 / grid.spacing;

    // Per-column and per-row basis weights are shared across the image.
    std::vector<int> ix(width);
    std::vector<double> wx(4 * static_cast<size_t>(width));
    for (int x = 0; x < width; ++x) {
        const double t = x * inv_s;
        ix[x] = static_cast<int>(std::floor(t));
        bspline_weights(t - ix[x], &wx[4 * static_cast<size_t>(x)]);
    }
    std::vector<int> iy(height);
    std::vector<double> wy(4 * static_cast<size_t>(height));
    for (int y = 0; y < height; ++y) {
        const double t = y * inv_s;
        iy[y] = static_cast<int>(std::floor(t));
        bspline_weights(t - iy[y], &wy[4 * static_cast<size_t>(y)]);
    }

    VectorField2D v(width, height);
    for (int y = 0; y < height; ++y) {
        const double* by = &wy[4 * static_cast<size_t>(y)];
        for (int x = 0; x < width; ++x) {
            const double* bx = &wx[4 * static_cast<size_t>(x)];
            double ax = 0.0, ay = 0.0;
            for (int l = 0; l < 4; ++l) {
                const size_t row = 2 * (static_cast<size_t>(iy[y] + l) * grid.cp_width + ix[x]);
                double rx = 0.0, ry = 0.0;
                for (int m = 0; m < 4; ++m) {
                    rx += bx[m] * grid.control_points[row + 2 * m];
                    ry += bx[m] * grid.control_points[row + 2 * m + 1];
                }
                ax += by[l] * rx;
                ay += by[l] * ry;
            }
            v.dx(x, y) = ax;
            v.dy(x, y) = ay;
        }
    }
    return v;
}

void bspline_eval(const BSplineGrid& grid, double x, double y, double& out_x, double& out_y) {
    const double tx = x / grid.spacing, ty = y / grid.spacing;
    int i0 = static_cast<int>(std::floor(tx));
    int j0 = static_cast<int>(std::floor(ty));
    i0 = std::min(std::max(i0, 0), grid.cp_width - 4);
    j0 = std::min(std::max(j0, 0), grid.cp_height - 4);
    double bx[4], by[4];
    bspline_weights(tx - i0, bx);
    bspline_weights(ty - j0, by);
    out_x = 0.0;
    out_y = 0.0;
    for (int l = 0; l < 4; ++l) {
        for (int m = 0; m < 4; ++m) {
            const double w = by[l] * bx[m];
            out_x += w * grid.cx(i0 + m, j0 + l);
            out_y += w * grid.cy(i0 + m, j0 + l);
        }
    }
}

BSplineGrid bspline_adjoint(const BSplineGrid& grid, const VectorField2D& dL_dv) {
    check_grid(grid, dL_dv.width, dL_dv.height, "bspline_adjoint");
    BSplineGrid out = make_bspline_grid(dL_dv.width, dL_dv.height, grid.spacing);
    const double inv_s = 1.0 / grid.spacing;
    for (int y = 0; y < dL_dv.height; ++y) {
        const double ty = y * inv_s;
        const int j0 = static_cast<int>(std::floor(ty));
        double by[4];
        bspline_weights(ty - j0, by);
        for (int x = 0; x < dL_dv.width; ++x) {
            const double tx = x * inv_s;
            const int i0 = static_cast<int>(std::floor(tx));
            double bx[4];
            bspline_weights(tx - i0, bx);
            const double gx = dL_dv.dx(x, y), gy = dL_dv.dy(x, y);
            for (int l = 0; l < 4; ++l) {
                const size_t row = 2 * (static_cast<size_t>(j0 + l) * out.cp_width + i0);
                for (int m = 0; m < 4; ++m) {
                    const double w = by[l] * bx[m];
                    out.control_points[row + 2 * m] += w * gx;
                    out.control_points[row + 2 * m + 1] += w * gy;
                }
            }
        }
    }
    return out;
}

} // namespace edgereg
