#include "edgereg/edge_map.hpp"

#include <cmath>

namespace edgereg {

VectorField2D gradient_central(const Image2D& img) {
    if (img.width < 2 || img.height < 2)
        throw data_error("gradient_central: image must be at least 2x2");
    const int w = img.width, h = img.height;
    VectorField2D g(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx, gy;
            if (x == 0)
                gx = img.at(1, y) - img.at(0, y);
            else if (x == w - 1)
                gx = img.at(w - 1, y) - img.at(w - 2, y);
            else
                gx = 0.5 * (img.at(x + 1, y) - img.at(x - 1, y));
            if (y == 0)
                gy = img.at(x, 1) - img.at(x, 0);
            else if (y == h - 1)
                gy = img.at(x, h - 1) - img.at(x, h - 2);
            else
                gy = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
            g.dx(x, y) = gx;
            g.dy(x, y) = gy;
        }
    }
    return g;
}

Image2D gradient_central_adjoint(const VectorField2D& grad) {
    if (grad.width < 2 || grad.height < 2)
        throw data_error("gradient_central_adjoint: field must be at least 2x2");
    const int w = grad.width, h = grad.height;
    Image2D out(w, h, 0.0);
    // Scatter the forward stencil weights: out accumulates the transpose of
    // every gather performed by gradient_central.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = grad.dx(x, y);
            const double gy = grad.dy(x, y);
            if (x == 0) {
                out.at(1, y) += gx;
                out.at(0, y) -= gx;
            } else if (x == w - 1) {
                out.at(w - 1, y) += gx;
                out.at(w - 2, y) -= gx;
            } else {
                out.at(x + 1, y) += 0.5 * gx;
                out.at(x - 1, y) -= 0.5 * gx;
            }
            if (y == 0) {
                out.at(x, 1) += gy;
                out.at(x, 0) -= gy;
            } else if (y == h - 1) {
                out.at(x, h - 1) += gy;
                out.at(x, h - 2) -= gy;
            } else {
                out.at(x, y + 1) += 0.5 * gy;
                out.at(x, y - 1) -= 0.5 * gy;
            }
        }
    }
    return out;
}

Image2D gaussian_smooth(const Image2D& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    const int w = img.width, h = img.height;
    Image2D tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xs = std::min(std::max(x + i, 0), w - 1);
                acc += kernel[i + radius] * img.at(xs, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int ys = std::min(std::max(y + i, 0), h - 1);
                acc += kernel[i + radius] * tmp.at(x, ys);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

Image2D edge_map(const Image2D& img, double sigma_pre, bool normalize) {
    const Image2D smoothed = sigma_pre > 0.0 ? gaussian_smooth(img, sigma_pre) : img;
    const VectorField2D g = gradient_central(smoothed);
    Image2D e(img.width, img.height);
    double maxval = 0.0;
    for (size_t i = 0; i < e.size(); ++i) {
        const double gx = g.comp[2 * i], gy = g.comp[2 * i + 1];
        e.data[i] = std::sqrt(gx * gx + gy * gy);
        maxval = std::max(maxval, e.data[i]);
    }
    if (normalize && maxval > 0.0) {
        const double inv = 1.0 / maxval;
        for (double& v : e.data) v *= inv;
    }
    return e;
}

} // namespace edgereg
