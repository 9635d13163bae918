#include "edgereg/synth.hpp"

#include <cmath>
#include <random>

#include "edgereg/edge_map.hpp"
#include "edgereg/transform.hpp"

namespace edgereg {

namespace {

// Distributions are hand-rolled on top of mt19937_64 because the standard
// library distributions are implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
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

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Closed boundary: radius(theta) = base * (1 + sum_j a_j cos(j theta + phi_j)).
struct WobblyCircle {
    double cx, cy, base;
    double amp[4];
    double phase[4];

    double radius(double theta) const {
        double r = 1.0;
        for (int j = 0; j < 4; ++j) r += amp[j] * std::cos((j + 2) * theta + phase[j]);
        return base * r;
    }

    bool contains(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        const double rr = std::hypot(dx, dy);
        if (rr == 0.0) return true;
        return rr < radius(std::atan2(dy, dx));
    }
};

// Smoothed white noise free of border artifacts: the noise is generated on a
// padded grid so every kept pixel sees full kernel support, then cropped.
Image2D smoothed_noise(Rng& rng, int size, double sigma) {
    const int pad = static_cast<int>(std::ceil(3.0 * sigma));
    const int n = size + 2 * pad;
    Image2D noise(n, n);
    for (double& v : noise.data) v = rng.gaussian();
    const Image2D smooth = gaussian_smooth(noise, sigma);
    Image2D out(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) out.at(x, y) = smooth.at(x + pad, y + pad);
    return out;
}

// Low-frequency multiplicative bias in [1-amp, 1+amp].
Image2D bias_field(Rng& rng, int size, double amp) {
    Image2D field = smoothed_noise(rng, size, size / 8.0);
    double maxabs = 0.0;
    for (double v : field.data) maxabs = std::max(maxabs, std::abs(v));
    const double k = maxabs > 0.0 ? amp / maxabs : 0.0;
    for (double& v : field.data) v = 1.0 + k * v;
    return field;
}

} // namespace

void make_phantom(uint64_t seed, int size, LabelMap2D& labels, Image2D& modality_a,
                  Image2D& modality_b, double noise_sigma, bool with_bias) {
    if (size < 64) throw data_error("make_phantom: size must be >= 64");
    Rng rng(splitmix64(seed));

    // Shared center keeps the rings nested; radius gaps exceed the maximum
    // combined boundary perturbation (4 * 0.02 of each base radius).
    const double cx = size * (0.5 + rng.uniform(-0.02, 0.02));
    const double cy = size * (0.5 + rng.uniform(-0.02, 0.02));
    const double base[4] = {0.42, 0.33, 0.24, 0.13};
    WobblyCircle rings[4];
    for (int k = 0; k < 4; ++k) {
        rings[k].cx = cx;
        rings[k].cy = cy;
        rings[k].base = base[k] * size;
        for (int j = 0; j < 4; ++j) {
            rings[k].amp[j] = rng.uniform(-0.02, 0.02);
            rings[k].phase[j] = rng.uniform(0.0, 2.0 * M_PI);
        }
    }

    labels = LabelMap2D(size, size, 0);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            int lab = 0;
            for (int k = 0; k < 4; ++k)
                if (rings[k].contains(x, y)) lab = k + 1;
            labels.at(x, y) = lab;
        }
    }

    static const double map_a[5] = {0.0, 0.3, 0.5, 0.7, 0.9};
    static const double map_b[5] = {0.0, 0.8, 0.3, 0.9, 0.4};
    modality_a = Image2D(size, size);
    modality_b = Image2D(size, size);
    for (size_t i = 0; i < labels.size(); ++i) {
        modality_a.data[i] = map_a[labels.labels[i]];
        modality_b.data[i] = map_b[labels.labels[i]];
    }

    Rng rng_a(splitmix64(seed ^ 0xa5a5a5a5a5a5a5a5ULL));
    Rng rng_b(splitmix64(seed ^ 0x5a5a5a5a5a5a5a5aULL));
    if (with_bias) {
        const Image2D bias_a = bias_field(rng_a, size, 0.10);
        const Image2D bias_b = bias_field(rng_b, size, 0.10);
        for (size_t i = 0; i < modality_a.size(); ++i) {
            modality_a.data[i] *= bias_a.data[i];
            modality_b.data[i] *= bias_b.data[i];
        }
    }
    if (noise_sigma > 0.0) {
        for (size_t i = 0; i < modality_a.size(); ++i) {
            modality_a.data[i] += noise_sigma * rng_a.gaussian();
            modality_b.data[i] += noise_sigma * rng_b.gaussian();
        }
    }
    for (size_t i = 0; i < modality_a.size(); ++i) {
        modality_a.data[i] = std::min(std::max(modality_a.data[i], 0.0), 1.0);
        modality_b.data[i] = std::min(std::max(modality_b.data[i], 0.0), 1.0);
    }
}

VectorField2D random_smooth_svf(uint64_t seed, int size, double max_disp, double smooth_sigma) {
    if (size < 16) throw data_error("random_smooth_svf: size must be >= 16");
    if (max_disp < 0.0 || max_disp >= size / 8.0)
        throw data_error("random_smooth_svf: max_disp must lie in [0, size/8)");
    VectorField2D v(size, size);
    if (max_disp == 0.0) return v;
    if (smooth_sigma <= 0.0) smooth_sigma = size / 12.0;

    Rng rng(splitmix64(seed ^ 0xdeadbeefcafef00dULL));
    const Image2D sx = smoothed_noise(rng, size, smooth_sigma);
    const Image2D sy = smoothed_noise(rng, size, smooth_sigma);

    double max_comp = 0.0;
    for (size_t i = 0; i < sx.size(); ++i) {
        v.comp[2 * i] = sx.data[i];
        v.comp[2 * i + 1] = sy.data[i];
        max_comp = std::max(max_comp, std::max(std::abs(sx.data[i]), std::abs(sy.data[i])));
    }
    if (max_comp == 0.0) return v;

    // Rescale until the exponential's max-norm displacement hits max_disp.
    const SquaringConfig squaring;
    double scale = max_disp / max_comp;
    for (int iter = 0; iter < 10; ++iter) {
        VectorField2D scaled = v;
        for (double& c : scaled.comp) c *= scale;
        const VectorField2D disp = svf_exp(scaled, squaring);
        double d = 0.0;
        for (double c : disp.comp) d = std::max(d, std::abs(c));
        if (d == 0.0) break;
        if (std::abs(d - max_disp) <= 0.02 * max_disp) break;
        scale *= max_disp / d;
    }
    for (double& c : v.comp) c *= scale;
    return v;
}

PhantomPair make_pair(uint64_t seed, int size, double max_disp) {
    PhantomPair pair;
    pair.seed = seed;
    Image2D modality_a, modality_b;
    make_phantom(seed, size, pair.fixed_seg, modality_a, modality_b);

    const VectorField2D v = random_smooth_svf(splitmix64(seed + 1), size, max_disp);
    pair.gt_displacement = svf_exp(v, SquaringConfig{});

    pair.fixed = std::move(modality_a);
    pair.moving = warp_image(modality_b, pair.gt_displacement);
    pair.moving_seg = warp_labels_nn(pair.fixed_seg, pair.gt_displacement);
    return pair;
}

} // namespace edgereg
