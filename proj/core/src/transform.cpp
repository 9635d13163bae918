#include "edgereg/transform.hpp"

#include <cmath>

namespace edgereg {

namespace {

inline double sample_image(const Image2D& img, const BilinearLocation& loc) {
    return loc.w00() * img.at(loc.x0, loc.y0) + loc.w10() * img.at(loc.x1, loc.y0) +
           loc.w01() * img.at(loc.x0, loc.y1) + loc.w11() * img.at(loc.x1, loc.y1);
}

inline void sample_field(const VectorField2D& f, const BilinearLocation& loc,
                         double& out_x, double& out_y) {
    const size_t i00 = 2 * (static_cast<size_t>(loc.y0) * f.width + loc.x0);
    const size_t i10 = 2 * (static_cast<size_t>(loc.y0) * f.width + loc.x1);
    const size_t i01 = 2 * (static_cast<size_t>(loc.y1) * f.width + loc.x0);
    const size_t i11 = 2 * (static_cast<size_t>(loc.y1) * f.width + loc.x1);
    const double w00 = loc.w00(), w10 = loc.w10(), w01 = loc.w01(), w11 = loc.w11();
    out_x = w00 * f.comp[i00] + w10 * f.comp[i10] + w01 * f.comp[i01] + w11 * f.comp[i11];
    out_y = w00 * f.comp[i00 + 1] + w10 * f.comp[i10 + 1] + w01 * f.comp[i01 + 1] +
            w11 * f.comp[i11 + 1];
}

} // namespace

VectorField2D compose(const VectorField2D& u_outer, const VectorField2D& u_inner) {
    if (!u_outer.same_shape(u_inner))
        throw data_error("compose: field shapes differ");
    const int w = u_outer.width, h = u_outer.height;
    VectorField2D out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double ix = u_inner.dx(x, y), iy = u_inner.dy(x, y);
            const BilinearLocation loc = locate_bilinear(x + ix, y + iy, w, h);
            double ox, oy;
            sample_field(u_outer, loc, ox, oy);
            out.dx(x, y) = ox + ix;
            out.dy(x, y) = oy + iy;
        }
    }
    return out;
}

VectorField2D svf_exp(const VectorField2D& v, const SquaringConfig& cfg) {
    cfg.validate();
    VectorField2D u = v;
    const double scale = std::ldexp(1.0, -cfg.steps); // 1 / 2^K
    for (double& c : u.comp) c *= scale;
    for (int k = 0; k < cfg.steps; ++k) u = compose(u, u);
    return u;
}

Image2D warp_image(const Image2D& img, const VectorField2D& u) {
    if (img.width != u.width || img.height != u.height)
        throw data_error("warp_image: image/field shapes differ");
    const int w = img.width, h = img.height;
    Image2D out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const BilinearLocation loc = locate_bilinear(x + u.dx(x, y), y + u.dy(x, y), w, h);
            out.at(x, y) = sample_image(img, loc);
        }
    }
    return out;
}

LabelMap2D warp_labels_nn(const LabelMap2D& labels, const VectorField2D& u) {
    if (labels.width != u.width || labels.height != u.height)
        throw data_error("warp_labels_nn: label/field shapes differ");
    const int w = labels.width, h = labels.height;
    LabelMap2D out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const long xs = std::min<long>(std::max<long>(std::lround(x + u.dx(x, y)), 0), w - 1);
            const long ys = std::min<long>(std::max<long>(std::lround(y + u.dy(x, y)), 0), h - 1);
            out.at(x, y) = labels.at(static_cast<int>(xs), static_cast<int>(ys));
        }
    }
    return out;
}

VectorField2D warp_adjoint(const Image2D& img, const VectorField2D& u, const Image2D& dL_dout) {
    if (img.width != u.width || img.height != u.height || !img.same_shape(dL_dout))
        throw data_error("warp_adjoint: shapes differ");
    const int w = img.width, h = img.height;
    VectorField2D grad(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double g = dL_dout.at(x, y);
            if (g == 0.0) continue;
            const BilinearLocation loc = locate_bilinear(x + u.dx(x, y), y + u.dy(x, y), w, h);
            if (loc.dx_active) {
                int a, b;
                loc.slope_cells_x(a, b);
                grad.dx(x, y) = g * ((1.0 - loc.fy) * (img.at(b, loc.y0) - img.at(a, loc.y0)) +
                                     loc.fy * (img.at(b, loc.y1) - img.at(a, loc.y1)));
            }
            if (loc.dy_active) {
                int a, b;
                loc.slope_cells_y(a, b);
                grad.dy(x, y) = g * ((1.0 - loc.fx) * (img.at(loc.x0, b) - img.at(loc.x0, a)) +
                                     loc.fx * (img.at(loc.x1, b) - img.at(loc.x1, a)));
            }
        }
    }
    return grad;
}

namespace {

// dL/du for out = compose(u, u) given dL/dout. Sampling of u at x + u(x)
// contributes three ways: the direct addition, the four-neighbor scatter of
// interpolation weights, and the position derivative through x + u(x).
VectorField2D compose_self_adjoint(const VectorField2D& u, const VectorField2D& g_out) {
    const int w = u.width, h = u.height;
    VectorField2D g(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = g_out.dx(x, y), gy = g_out.dy(x, y);
            const size_t i = 2 * (static_cast<size_t>(y) * w + x);
            g.comp[i] += gx;
            g.comp[i + 1] += gy;

            const BilinearLocation loc = locate_bilinear(x + u.dx(x, y), y + u.dy(x, y), w, h);
            const size_t i00 = 2 * (static_cast<size_t>(loc.y0) * w + loc.x0);
            const size_t i10 = 2 * (static_cast<size_t>(loc.y0) * w + loc.x1);
            const size_t i01 = 2 * (static_cast<size_t>(loc.y1) * w + loc.x0);
            const size_t i11 = 2 * (static_cast<size_t>(loc.y1) * w + loc.x1);
            const double w00 = loc.w00(), w10 = loc.w10(), w01 = loc.w01(), w11 = loc.w11();
            g.comp[i00] += w00 * gx;
            g.comp[i00 + 1] += w00 * gy;
            g.comp[i10] += w10 * gx;
            g.comp[i10 + 1] += w10 * gy;
            g.comp[i01] += w01 * gx;
            g.comp[i01 + 1] += w01 * gy;
            g.comp[i11] += w11 * gx;
            g.comp[i11 + 1] += w11 * gy;

            if (loc.dx_active) {
                int a, b;
                loc.slope_cells_x(a, b);
                const size_t ia0 = 2 * (static_cast<size_t>(loc.y0) * w + a);
                const size_t ib0 = 2 * (static_cast<size_t>(loc.y0) * w + b);
                const size_t ia1 = 2 * (static_cast<size_t>(loc.y1) * w + a);
                const size_t ib1 = 2 * (static_cast<size_t>(loc.y1) * w + b);
                const double dux_dpx = (1.0 - loc.fy) * (u.comp[ib0] - u.comp[ia0]) +
                                       loc.fy * (u.comp[ib1] - u.comp[ia1]);
                const double duy_dpx = (1.0 - loc.fy) * (u.comp[ib0 + 1] - u.comp[ia0 + 1]) +
                                       loc.fy * (u.comp[ib1 + 1] - u.comp[ia1 + 1]);
                g.comp[i] += gx * dux_dpx + gy * duy_dpx;
            }
            if (loc.dy_active) {
                int a, b;
                loc.slope_cells_y(a, b);
                const size_t i0a = 2 * (static_cast<size_t>(a) * w + loc.x0);
                const size_t i0b = 2 * (static_cast<size_t>(b) * w + loc.x0);
                const size_t i1a = 2 * (static_cast<size_t>(a) * w + loc.x1);
                const size_t i1b = 2 * (static_cast<size_t>(b) * w + loc.x1);
                const double dux_dpy = (1.0 - loc.fx) * (u.comp[i0b] - u.comp[i0a]) +
                                       loc.fx * (u.comp[i1b] - u.comp[i1a]);
                const double duy_dpy = (1.0 - loc.fx) * (u.comp[i0b + 1] - u.comp[i0a + 1]) +
                                       loc.fx * (u.comp[i1b + 1] - u.comp[i1a + 1]);
                g.comp[i + 1] += gx * dux_dpy + gy * duy_dpy;
            }
        }
    }
    return g;
}

} // namespace

VectorField2D svf_exp_adjoint(const VectorField2D& v, const SquaringConfig& cfg,
                              const VectorField2D& dL_du) {
    cfg.validate();
    if (!v.same_shape(dL_du))
        throw data_error("svf_exp_adjoint: shapes differ");

    // Replay the forward pass, keeping the input of every squaring.
    std::vector<VectorField2D> stages;
    stages.reserve(cfg.steps);
    VectorField2D u = v;
    const double scale = std::ldexp(1.0, -cfg.steps);
    for (double& c : u.comp) c *= scale;
    for (int k = 0; k < cfg.steps; ++k) {
        stages.push_back(u);
        u = compose(u, u);
    }

    VectorField2D g = dL_du;
    for (int k = cfg.steps - 1; k >= 0; --k) g = compose_self_adjoint(stages[k], g);
    for (double& c : g.comp) c *= scale;
    return g;
}

Image2D jacobian_determinant(const VectorField2D& u) {
    if (u.width < 2 || u.height < 2)
        throw data_error("jacobian_determinant: field must be at least 2x2");
    const int w = u.width, h = u.height;
    Image2D jac(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double dux_dx, duy_dx, dux_dy, duy_dy;
            if (x == 0) {
                dux_dx = u.dx(1, y) - u.dx(0, y);
                duy_dx = u.dy(1, y) - u.dy(0, y);
            } else if (x == w - 1) {
                dux_dx = u.dx(w - 1, y) - u.dx(w - 2, y);
                duy_dx = u.dy(w - 1, y) - u.dy(w - 2, y);
            } else {
                dux_dx = 0.5 * (u.dx(x + 1, y) - u.dx(x - 1, y));
                duy_dx = 0.5 * (u.dy(x + 1, y) - u.dy(x - 1, y));
            }
            if (y == 0) {
                dux_dy = u.dx(x, 1) - u.dx(x, 0);
                duy_dy = u.dy(x, 1) - u.dy(x, 0);
            } else if (y == h - 1) {
                dux_dy = u.dx(x, h - 1) - u.dx(x, h - 2);
                duy_dy = u.dy(x, h - 1) - u.dy(x, h - 2);
            } else {
                dux_dy = 0.5 * (u.dx(x, y + 1) - u.dx(x, y - 1));
                duy_dy = 0.5 * (u.dy(x, y + 1) - u.dy(x, y - 1));
            }
            jac.at(x, y) = (1.0 + dux_dx) * (1.0 + duy_dy) - dux_dy * duy_dx;
        }
    }
    return jac;
}

} // namespace edgereg
