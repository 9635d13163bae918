#pragma once

#include <cstdint>
#include <vector>

#include "edgereg/errors.hpp"

namespace edgereg {

/// Scalar 2D raster, row-major, double precision. Intensities are
/// dimensionless; codecs map them to [0,1].
struct Image2D {
    int width = 0;
    int height = 0;
    std::vector<double> data; // size width*height, index y*width + x

    Image2D() = default;
    Image2D(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw data_error("Image2D: dimensions must be >= 1");
    }

    size_t size() const { return data.size(); }
    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

    bool same_shape(const Image2D& o) const { return width == o.width && height == o.height; }
};

/// Integer label raster with the same shape contract as Image2D.
/// Label 0 is reserved for background.
struct LabelMap2D {
    int width = 0;
    int height = 0;
    std::vector<int32_t> labels;

    LabelMap2D() = default;
    LabelMap2D(int w, int h, int32_t fill = 0)
        : width(w), height(h), labels(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw data_error("LabelMap2D: dimensions must be >= 1");
    }

    size_t size() const { return labels.size(); }
    int32_t& at(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }
    int32_t at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }

    bool same_shape(const LabelMap2D& o) const { return width == o.width && height == o.height; }
};

/// Per-pixel 2-vector raster in pixel units. Components are interleaved
/// (dx, dy) so the flat buffer doubles as an optimizer parameter vector.
struct VectorField2D {
    int width = 0;
    int height = 0;
    std::vector<double> comp; // size 2*width*height, (dx,dy) at 2*(y*width+x)

    VectorField2D() = default;
    VectorField2D(int w, int h)
        : width(w), height(h), comp(2 * static_cast<size_t>(w) * h, 0.0) {
        if (w < 1 || h < 1) throw data_error("VectorField2D: dimensions must be >= 1");
    }

    size_t pixels() const { return static_cast<size_t>(width) * height; }
    double& dx(int x, int y) { return comp[2 * (static_cast<size_t>(y) * width + x)]; }
    double& dy(int x, int y) { return comp[2 * (static_cast<size_t>(y) * width + x) + 1]; }
    double dx(int x, int y) const { return comp[2 * (static_cast<size_t>(y) * width + x)]; }
    double dy(int x, int y) const { return comp[2 * (static_cast<size_t>(y) * width + x) + 1]; }

    bool same_shape(const VectorField2D& o) const { return width == o.width && height == o.height; }
};

/// (img - min) / (max - min); all zeros when the image is constant.
Image2D normalize_minmax(const Image2D& img);

} // namespace edgereg
