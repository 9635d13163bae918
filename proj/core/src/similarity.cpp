#include "edgereg/similarity.hpp"

#include <array>
#include <cmath>

#include "edgereg/edge_map.hpp"

namespace edgereg {

namespace {

void check_same_shape(const Image2D& F, const Image2D& M, const char* who) {
    if (!F.same_shape(M)) throw data_error(std::string(who) + ": image shapes differ");
}

// Sums of src over (2r+1)^2 windows clipped to the image, via separable
// prefix sums. dst may not alias src.
void box_sum(const std::vector<double>& src, int w, int h, int r, std::vector<double>& tmp,
             std::vector<double>& dst) {
    tmp.resize(src.size());
    dst.resize(src.size());
    std::vector<double> prefix(static_cast<size_t>(std::max(w, h)) + 1);
    for (int y = 0; y < h; ++y) {
        const double* row = &src[static_cast<size_t>(y) * w];
        prefix[0] = 0.0;
        for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + row[x];
        double* out = &tmp[static_cast<size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            const int lo = std::max(x - r, 0), hi = std::min(x + r, w - 1);
            out[x] = prefix[hi + 1] - prefix[lo];
        }
    }
    for (int x = 0; x < w; ++x) {
        prefix[0] = 0.0;
        for (int y = 0; y < h; ++y) prefix[y + 1] = prefix[y] + tmp[static_cast<size_t>(y) * w + x];
        for (int y = 0; y < h; ++y) {
            const int lo = std::max(y - r, 0), hi = std::min(y + r, h - 1);
            dst[static_cast<size_t>(y) * w + x] = prefix[hi + 1] - prefix[lo];
        }
    }
}

} // namespace

ImageLossResult lncc(const Image2D& F, const Image2D& M, int window, double eps) {
    check_same_shape(F, M, "lncc");
    if (window < 3 || window % 2 == 0)
        throw data_error("lncc: window must be odd and >= 3");
    const int w = F.width, h = F.height, r = window / 2;
    const size_t n_px = F.size();

    std::vector<double> tmp, sF, sM, sFF, sMM, sFM;
    std::vector<double> prod(n_px);
    box_sum(F.data, w, h, r, tmp, sF);
    box_sum(M.data, w, h, r, tmp, sM);
    for (size_t i = 0; i < n_px; ++i) prod[i] = F.data[i] * F.data[i];
    box_sum(prod, w, h, r, tmp, sFF);
    for (size_t i = 0; i < n_px; ++i) prod[i] = M.data[i] * M.data[i];
    box_sum(prod, w, h, r, tmp, sMM);
    for (size_t i = 0; i < n_px; ++i) prod[i] = F.data[i] * M.data[i];
    box_sum(prod, w, h, r, tmp, sFM);

    // Per-window coefficients of the gradient: d cc/d M(j) over windows x
    // containing j splits into A(x)(F(j)-muF(x)) + B(x)(M(j)-muM(x)), so four
    // more box sums recover the full gradient.
    std::vector<double> A(n_px), AmuF(n_px), B(n_px), BmuM(n_px);
    double value = 0.0;
    size_t i = 0;
    for (int y = 0; y < h; ++y) {
        const double ny = std::min(y + r, h - 1) - std::max(y - r, 0) + 1;
        for (int x = 0; x < w; ++x, ++i) {
            const double n = ny * (std::min(x + r, w - 1) - std::max(x - r, 0) + 1);
            const double muF = sF[i] / n, muM = sM[i] / n;
            const double c = sFM[i] - sF[i] * muM;
            const double a = sFF[i] - sF[i] * muF;
            const double b = sMM[i] - sM[i] * muM;
            const double den = a * b + eps;
            value -= c * c / den;
            const double av = 2.0 * c / den;
            const double bv = -2.0 * c * c * a / (den * den);
            A[i] = av;
            AmuF[i] = av * muF;
            B[i] = bv;
            BmuM[i] = bv * muM;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n_px);

    std::vector<double> sA, sAmuF, sB, sBmuM;
    box_sum(A, w, h, r, tmp, sA);
    box_sum(AmuF, w, h, r, tmp, sAmuF);
    box_sum(B, w, h, r, tmp, sB);
    box_sum(BmuM, w, h, r, tmp, sBmuM);

    ImageLossResult res;
    res.value = value * inv_n;
    res.grad = Image2D(w, h);
    for (size_t j = 0; j < n_px; ++j)
        res.grad.data[j] = -inv_n * (F.data[j] * sA[j] - sAmuF[j] + M.data[j] * sB[j] - sBmuM[j]);
    return res;
}

namespace {

// Gaussian Parzen weights for one intensity, restricted to the bins where
// the kernel is numerically nonzero (exponent cutoff 150, tail < 1e-65).
// Returns [k_lo, k_hi] plus unnormalized weights g and the coefficient
// dcoef with dg/di = g * dcoef.
struct ParzenWindow {
    int k_lo = 0, k_hi = -1;
    std::vector<double> g;     // up to 2*rad+1 entries
    std::vector<double> dcoef;
    double G = 0.0;  // sum of g
    double Gp = 0.0; // sum of g*dcoef
};

struct ParzenKernel {
    int bins;
    int rad;
    double sigma_b;            // kernel sigma in bin units
    double inv_two_sigma2;     // 1/(2 sigma_b^2)
    double inv_sigma2;         // 1/sigma_b^2
    std::vector<double> taper; // exp(-m^2/(2 sigma_b^2)), m = -rad..rad

    ParzenKernel(int bins_, double sigma_ratio) : bins(bins_) {
        sigma_b = sigma_ratio;
        inv_two_sigma2 = 1.0 / (2.0 * sigma_b * sigma_b);
        inv_sigma2 = 1.0 / (sigma_b * sigma_b);
        rad = std::min(bins - 1, static_cast<int>(std::ceil(sigma_b * std::sqrt(300.0))));
        taper.resize(2 * static_cast<size_t>(rad) + 1);
        for (int m = -rad; m <= rad; ++m)
            taper[m + rad] = std::exp(-(static_cast<double>(m) * m) * inv_two_sigma2);
    }

    // exp(-(z-k)^2/(2s^2)) factored as exp(-d^2/2s^2) * exp(d/s^2)^m * taper[m]
    // with d = z - kc and m = k - kc, to keep it to two exp calls per pixel.
    void eval(double intensity, ParzenWindow& win) const {
        if (win.g.size() < taper.size()) {
            win.g.resize(taper.size());
            win.dcoef.resize(taper.size());
        }
        const double z = intensity * bins - 0.5; // == k at the center of bin k
        const int kc = std::min(std::max(static_cast<int>(std::lround(z)), 0), bins - 1);
        const double d = z - kc;
        const double base = std::exp(-d * d * inv_two_sigma2);
        const double s = std::exp(d * inv_sigma2);
        win.k_lo = std::max(kc - rad, 0);
        win.k_hi = std::min(kc + rad, bins - 1);
        win.G = 0.0;
        win.Gp = 0.0;
        double run = base; // base * s^m at m = 0
        for (int k = kc; k <= win.k_hi; ++k) {
            const int m = k - kc;
            const double g = run * taper[m + rad];
            win.g[k - win.k_lo] = g;
            win.dcoef[k - win.k_lo] = (k - z) * bins * inv_sigma2;
            win.G += g;
            win.Gp += g * win.dcoef[k - win.k_lo];
            run *= s;
        }
        run = base / s;
        for (int k = kc - 1; k >= win.k_lo; --k) {
            const int m = k - kc;
            const double g = run * taper[m + rad];
            win.g[k - win.k_lo] = g;
            win.dcoef[k - win.k_lo] = (k - z) * bins * inv_sigma2;
            win.G += g;
            win.Gp += g * win.dcoef[k - win.k_lo];
            run /= s;
        }
    }
};

constexpr double kEntropyFloor = 1e-12;

double entropy_coef(double p) {
    // d/dp of -p*ln(max(p, floor))
    return -(std::log(std::max(p, kEntropyFloor)) + (p > kEntropyFloor ? 1.0 : 0.0));
}

} // namespace

ImageLossResult nmi(const Image2D& F, const Image2D& M, int bins, double sigma_ratio) {
    check_same_shape(F, M, "nmi");
    if (bins < 8) throw data_error("nmi: bins must be >= 8");
    if (sigma_ratio <= 0.0) throw data_error("nmi: sigma_ratio must be positive");
    for (size_t i = 0; i < F.size(); ++i)
        if (F.data[i] < 0.0 || F.data[i] > 1.0 || M.data[i] < 0.0 || M.data[i] > 1.0)
            throw data_error("nmi: intensities outside [0,1]");

    const size_t n_px = F.size();
    const double inv_n = 1.0 / static_cast<double>(n_px);
    const ParzenKernel kernel(bins, sigma_ratio);

    std::vector<double> joint(static_cast<size_t>(bins) * bins, 0.0);
    ParzenWindow wf, wm;
    for (size_t i = 0; i < n_px; ++i) {
        kernel.eval(F.data[i], wf);
        kernel.eval(M.data[i], wm);
        const double inv = inv_n / (wf.G * wm.G);
        for (int k = wf.k_lo; k <= wf.k_hi; ++k) {
            const double wk = wf.g[k - wf.k_lo] * inv;
            double* row = &joint[static_cast<size_t>(k) * bins];
            for (int l = wm.k_lo; l <= wm.k_hi; ++l) row[l] += wk * wm.g[l - wm.k_lo];
        }
    }

    std::vector<double> pF(bins, 0.0), pM(bins, 0.0);
    double h_joint = 0.0;
    for (int k = 0; k < bins; ++k) {
        for (int l = 0; l < bins; ++l) {
            const double p = joint[static_cast<size_t>(k) * bins + l];
            pF[k] += p;
            pM[l] += p;
            h_joint -= p * std::log(std::max(p, kEntropyFloor));
        }
    }
    double h_f = 0.0, h_m = 0.0;
    for (int k = 0; k < bins; ++k) {
        h_f -= pF[k] * std::log(std::max(pF[k], kEntropyFloor));
        h_m -= pM[k] * std::log(std::max(pM[k], kEntropyFloor));
    }

    ImageLossResult res;
    res.value = -(h_f + h_m) / h_joint;
    res.grad = Image2D(F.width, F.height);

    // Entropy derivatives; H_F is independent of M because the normalized
    // M-weights sum to one per pixel.
    std::vector<double> cM(bins), cJ(static_cast<size_t>(bins) * bins);
    for (int l = 0; l < bins; ++l) cM[l] = entropy_coef(pM[l]);
    for (size_t e = 0; e < cJ.size(); ++e) cJ[e] = entropy_coef(joint[e]);

    const double wM = -1.0 / h_joint;                          // dvalue/dH_M
    const double wJ = (h_f + h_m) / (h_joint * h_joint);       // dvalue/dH_FM

    for (size_t i = 0; i < n_px; ++i) {
        kernel.eval(F.data[i], wf);
        kernel.eval(M.data[i], wm);
        const double invF = 1.0 / wf.G;
        const double invM = 1.0 / wm.G;
        double term_m = 0.0, term_j = 0.0;
        for (int l = wm.k_lo; l <= wm.k_hi; ++l) {
            const double g = wm.g[l - wm.k_lo];
            // d w_l / d i = (g_l' G - g_l G') / G^2
            const double wprime = (g * wm.dcoef[l - wm.k_lo] - g * wm.Gp * invM) * invM;
            term_m += cM[l] * wprime;
            double a = 0.0;
            const double* col = &cJ[l];
            for (int k = wf.k_lo; k <= wf.k_hi; ++k)
                a += col[static_cast<size_t>(k) * bins] * wf.g[k - wf.k_lo];
            term_j += wprime * a * invF;
        }
        res.grad.data[i] = inv_n * (wM * term_m + wJ * term_j);
    }
    return res;
}

ImageLossResult ngf(const Image2D& F, const Image2D& M, double eps_rel) {
    check_same_shape(F, M, "ngf");
    if (eps_rel <= 0.0) throw data_error("ngf: eps_rel must be positive");
    const VectorField2D gF = gradient_central(F);
    const VectorField2D gM = gradient_central(M);
    const size_t n_px = F.size();
    const double inv_n = 1.0 / static_cast<double>(n_px);

    double mean_f = 0.0, mean_m = 0.0;
    for (size_t i = 0; i < n_px; ++i) {
        mean_f += std::hypot(gF.comp[2 * i], gF.comp[2 * i + 1]);
        mean_m += std::hypot(gM.comp[2 * i], gM.comp[2 * i + 1]);
    }
    mean_f *= inv_n;
    mean_m *= inv_n;
    const bool floored_m = eps_rel * mean_m < 1e-8;
    const double eps_f = std::max(eps_rel * mean_f, 1e-8);
    const double eps_m = std::max(eps_rel * mean_m, 1e-8);
    const double ef2 = eps_f * eps_f, em2 = eps_m * eps_m;

    double value = 0.0, d_dem2 = 0.0;
    VectorField2D dL_dgM(F.width, F.height);
    for (size_t i = 0; i < n_px; ++i) {
        const double fx = gF.comp[2 * i], fy = gF.comp[2 * i + 1];
        const double mx = gM.comp[2 * i], my = gM.comp[2 * i + 1];
        const double c = fx * mx + fy * my;
        const double a = fx * fx + fy * fy;
        const double b = mx * mx + my * my;
        const double den = (a + ef2) * (b + em2);
        const double t = c * c / den;
        value += 1.0 - t;
        const double dc = -inv_n * 2.0 * c / den;        // dvalue/dc
        const double db = inv_n * t / (b + em2);         // dvalue/db
        dL_dgM.comp[2 * i] = dc * fx + db * 2.0 * mx;
        dL_dgM.comp[2 * i + 1] = dc * fy + db * 2.0 * my;
        d_dem2 += inv_n * t / (b + em2);                 // dvalue/d(eps_m^2)
    }
    value *= inv_n;

    // eps_m depends on M through the mean gradient magnitude (unless floored).
    if (!floored_m) {
        const double coef = d_dem2 * 2.0 * eps_m * eps_rel * inv_n;
        for (size_t i = 0; i < n_px; ++i) {
            const double mx = gM.comp[2 * i], my = gM.comp[2 * i + 1];
            const double norm = std::hypot(mx, my);
            if (norm > 0.0) {
                dL_dgM.comp[2 * i] += coef * mx / norm;
                dL_dgM.comp[2 * i + 1] += coef * my / norm;
            }
        }
    }

    ImageLossResult res;
    res.value = value;
    res.grad = gradient_central_adjoint(dL_dgM);
    return res;
}

ImageLossResult mse(const Image2D& F, const Image2D& M) {
    check_same_shape(F, M, "mse");
    const size_t n_px = F.size();
    const double inv_n = 1.0 / static_cast<double>(n_px);
    ImageLossResult res;
    res.grad = Image2D(F.width, F.height);
    double value = 0.0;
    for (size_t i = 0; i < n_px; ++i) {
        const double d = F.data[i] - M.data[i];
        value += d * d;
        res.grad.data[i] = 2.0 * (M.data[i] - F.data[i]) * inv_n;
    }
    res.value = value * inv_n;
    return res;
}

FieldLossResult reg_diffusion(const VectorField2D& v) {
    if (v.width < 2 || v.height < 2)
        throw data_error("reg_diffusion: field must be at least 2x2");
    const int w = v.width, h = v.height;
    // Mean over pixels, two components and two difference directions.
    const double norm = 1.0 / (4.0 * static_cast<double>(v.pixels()));
    FieldLossResult res;
    res.grad = VectorField2D(w, h);
    double value = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = 2 * (static_cast<size_t>(y) * w + x);
            for (int c = 0; c < 2; ++c) {
                if (x + 1 < w) {
                    const double d = v.comp[i + 2 + c] - v.comp[i + c];
                    value += d * d;
                    res.grad.comp[i + 2 + c] += 2.0 * d * norm;
                    res.grad.comp[i + c] -= 2.0 * d * norm;
                }
                if (y + 1 < h) {
                    const double d = v.comp[i + 2 * static_cast<size_t>(w) + c] - v.comp[i + c];
                    value += d * d;
                    res.grad.comp[i + 2 * static_cast<size_t>(w) + c] += 2.0 * d * norm;
                    res.grad.comp[i + c] -= 2.0 * d * norm;
                }
            }
        }
    }
    res.value = value * norm;
    return res;
}

} // namespace edgereg
