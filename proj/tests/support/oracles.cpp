#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracles {

uint64_t TestRng::next() {
    // xorshift64*
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dULL;
}

double TestRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double TestRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double TestRng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
}

Image2D random_image(TestRng& rng, int w, int h) {
    Image2D img(w, h);
    for (double& v : img.data) v = rng.uniform();
    return img;
}

VectorField2D random_field(TestRng& rng, int w, int h, double amplitude) {
    VectorField2D f(w, h);
    for (double& c : f.comp) c = rng.uniform(-amplitude, amplitude);
    return f;
}

VectorField2D smooth_random_field(TestRng& rng, int w, int h, double max_component,
                                  int blur_passes) {
    VectorField2D f(w, h);
    for (double& c : f.comp) c = rng.gaussian();
    // Repeated 3x3 box blur (replicate-padded) per component.
    VectorField2D tmp(w, h);
    for (int pass = 0; pass < blur_passes; ++pass) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double ax = 0.0, ay = 0.0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int xs = std::clamp(x + dx, 0, w - 1);
                        const int ys = std::clamp(y + dy, 0, h - 1);
                        ax += f.dx(xs, ys);
                        ay += f.dy(xs, ys);
                    }
                }
                tmp.dx(x, y) = ax / 9.0;
                tmp.dy(x, y) = ay / 9.0;
            }
        }
        std::swap(f, tmp);
    }
    double maxc = 0.0;
    for (double c : f.comp) maxc = std::max(maxc, std::abs(c));
    if (maxc > 0.0)
        for (double& c : f.comp) c *= max_component / maxc;
    return f;
}

VectorField2D bandlimited_random_field(TestRng& rng, int w, int h, double max_component,
                                       double min_wavelength) {
    VectorField2D f(w, h);
    const double k_max = 2.0 * M_PI / min_wavelength;
    for (int comp = 0; comp < 2; ++comp) {
        for (int mode = 0; mode < 6; ++mode) {
            const double angle = rng.uniform(0.0, 2.0 * M_PI);
            const double k = k_max * rng.uniform(0.25, 1.0);
            const double kx = k * std::cos(angle), ky = k * std::sin(angle);
            const double phase = rng.uniform(0.0, 2.0 * M_PI);
            const double amp = rng.uniform(0.3, 1.0);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    f.comp[2 * (static_cast<size_t>(y) * w + x) + comp] +=
                        amp * std::cos(kx * x + ky * y + phase);
        }
    }
    double maxc = 0.0;
    for (double c : f.comp) maxc = std::max(maxc, std::abs(c));
    if (maxc > 0.0)
        for (double& c : f.comp) c *= max_component / maxc;
    return f;
}

double lncc_value(const Image2D& F, const Image2D& M, int window, double eps) {
    const int w = F.width, h = F.height, r = window / 2;
    double total = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int x_lo = std::max(x - r, 0), x_hi = std::min(x + r, w - 1);
            const int y_lo = std::max(y - r, 0), y_hi = std::min(y + r, h - 1);
            double sf = 0.0, sm = 0.0;
            int n = 0;
            for (int yy = y_lo; yy <= y_hi; ++yy)
                for (int xx = x_lo; xx <= x_hi; ++xx) {
                    sf += F.at(xx, yy);
                    sm += M.at(xx, yy);
                    ++n;
                }
            const double mu_f = sf / n, mu_m = sm / n;
            double cross = 0.0, var_f = 0.0, var_m = 0.0;
            for (int yy = y_lo; yy <= y_hi; ++yy)
                for (int xx = x_lo; xx <= x_hi; ++xx) {
                    const double df = F.at(xx, yy) - mu_f;
                    const double dm = M.at(xx, yy) - mu_m;
                    cross += df * dm;
                    var_f += df * df;
                    var_m += dm * dm;
                }
            total += cross * cross / (var_f * var_m + eps);
        }
    }
    return -total / (static_cast<double>(w) * h);
}

namespace {

// Central differences interior, one-sided at borders (independent copy of
// the definition).
void grad_at(const Image2D& img, int x, int y, double& gx, double& gy) {
    const int w = img.width, h = img.height;
    if (x == 0)
        gx = img.at(1, y) - img.at(0, y);
    else if (x == w - 1)
        gx = img.at(w - 1, y) - img.at(w - 2, y);
    else
        gx = (img.at(x + 1, y) - img.at(x - 1, y)) / 2.0;
    if (y == 0)
        gy = img.at(x, 1) - img.at(x, 0);
    else if (y == h - 1)
        gy = img.at(x, h - 1) - img.at(x, h - 2);
    else
        gy = (img.at(x, y + 1) - img.at(x, y - 1)) / 2.0;
}

} // namespace

double ngf_value(const Image2D& F, const Image2D& M, double eps_rel) {
    const int w = F.width, h = F.height;
    const double n = static_cast<double>(w) * h;
    double mean_f = 0.0, mean_m = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double fx, fy, mx, my;
            grad_at(F, x, y, fx, fy);
            grad_at(M, x, y, mx, my);
            mean_f += std::sqrt(fx * fx + fy * fy);
            mean_m += std::sqrt(mx * mx + my * my);
        }
    const double eps_f = std::max(eps_rel * mean_f / n, 1e-8);
    const double eps_m = std::max(eps_rel * mean_m / n, 1e-8);
    double total = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double fx, fy, mx, my;
            grad_at(F, x, y, fx, fy);
            grad_at(M, x, y, mx, my);
            const double dot = fx * mx + fy * my;
            const double den =
                (fx * fx + fy * fy + eps_f * eps_f) * (mx * mx + my * my + eps_m * eps_m);
            total += 1.0 - dot * dot / den;
        }
    return total / n;
}

double mse_value(const Image2D& F, const Image2D& M) {
    double total = 0.0;
    for (size_t i = 0; i < F.size(); ++i) {
        const double d = F.data[i] - M.data[i];
        total += d * d;
    }
    return total / static_cast<double>(F.size());
}

double nmi_hard_binned(const Image2D& F, const Image2D& M, int bins) {
    std::vector<double> joint(static_cast<size_t>(bins) * bins, 0.0);
    const double inv_n = 1.0 / static_cast<double>(F.size());
    for (size_t i = 0; i < F.size(); ++i) {
        const int k = std::min(static_cast<int>(F.data[i] * bins), bins - 1);
        const int l = std::min(static_cast<int>(M.data[i] * bins), bins - 1);
        joint[static_cast<size_t>(k) * bins + l] += inv_n;
    }
    std::vector<double> pf(bins, 0.0), pm(bins, 0.0);
    double h_joint = 0.0;
    for (int k = 0; k < bins; ++k)
        for (int l = 0; l < bins; ++l) {
            const double p = joint[static_cast<size_t>(k) * bins + l];
            pf[k] += p;
            pm[l] += p;
            if (p > 0.0) h_joint -= p * std::log(p);
        }
    double h_f = 0.0, h_m = 0.0;
    for (int k = 0; k < bins; ++k) {
        if (pf[k] > 0.0) h_f -= pf[k] * std::log(pf[k]);
        if (pm[k] > 0.0) h_m -= pm[k] * std::log(pm[k]);
    }
    return (h_f + h_m) / h_joint;
}

Image2D edge_map_bruteforce(const Image2D& img) {
    Image2D e(img.width, img.height);
    double maxval = 0.0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double gx, gy;
            grad_at(img, x, y, gx, gy);
            e.at(x, y) = std::sqrt(gx * gx + gy * gy);
            maxval = std::max(maxval, e.at(x, y));
        }
    if (maxval > 0.0)
        for (double& v : e.data) v /= maxval;
    return e;
}

Image2D jacobian_bruteforce(const VectorField2D& u) {
    const int w = u.width, h = u.height;
    // Components as images so the one-sided/central stencil above applies.
    Image2D ux(w, h), uy(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            ux.at(x, y) = u.dx(x, y);
            uy.at(x, y) = u.dy(x, y);
        }
    Image2D jac(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double uxx, uxy, uyx, uyy;
            grad_at(ux, x, y, uxx, uxy);
            grad_at(uy, x, y, uyx, uyy);
            jac.at(x, y) = (1.0 + uxx) * (1.0 + uyy) - uxy * uyx;
        }
    return jac;
}

double dice_label(const LabelMap2D& a, const LabelMap2D& b, int32_t label) {
    size_t n_a = 0, n_b = 0, n_both = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        n_a += a.labels[i] == label;
        n_b += b.labels[i] == label;
        n_both += a.labels[i] == label && b.labels[i] == label;
    }
    if (n_a + n_b == 0) return -1.0;
    return 2.0 * static_cast<double>(n_both) / static_cast<double>(n_a + n_b);
}

namespace {

void sample_bilinear_clamped(const VectorField2D& f, double px, double py, double& vx,
                             double& vy) {
    const int w = f.width, h = f.height;
    px = std::clamp(px, 0.0, static_cast<double>(w - 1));
    py = std::clamp(py, 0.0, static_cast<double>(h - 1));
    const int x0 = std::min(static_cast<int>(px), w - 2);
    const int y0 = std::min(static_cast<int>(py), h - 2);
    const double fx = px - x0, fy = py - y0;
    vx = (1 - fx) * (1 - fy) * f.dx(x0, y0) + fx * (1 - fy) * f.dx(x0 + 1, y0) +
         (1 - fx) * fy * f.dx(x0, y0 + 1) + fx * fy * f.dx(x0 + 1, y0 + 1);
    vy = (1 - fx) * (1 - fy) * f.dy(x0, y0) + fx * (1 - fy) * f.dy(x0 + 1, y0) +
         (1 - fx) * fy * f.dy(x0, y0 + 1) + fx * fy * f.dy(x0 + 1, y0 + 1);
}

} // namespace

VectorField2D euler_flow(const VectorField2D& v, int steps) {
    const int w = v.width, h = v.height;
    const double dt = 1.0 / steps;
    VectorField2D disp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double px = x, py = y;
            for (int s = 0; s < steps; ++s) {
                double vx, vy;
                sample_bilinear_clamped(v, px, py, vx, vy);
                px += dt * vx;
                py += dt * vy;
            }
            disp.dx(x, y) = px - x;
            disp.dy(x, y) = py - y;
        }
    }
    return disp;
}

std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> params, double step) {
    std::vector<double> grad(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + step;
        const double hi = f(params);
        params[i] = saved - step;
        const double lo = f(params);
        params[i] = saved;
        grad[i] = (hi - lo) / (2.0 * step);
    }
    return grad;
}

double max_rel_err(const std::vector<double>& a, const std::vector<double>& b, double floor) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double mag = std::max(std::abs(a[i]), std::abs(b[i]));
        if (mag <= floor) continue;
        worst = std::max(worst, std::abs(a[i] - b[i]) / mag);
    }
    return worst;
}

} // namespace oracles
