#include "edgereg/image.hpp"

#include <algorithm>

namespace edgereg {

Image2D normalize_minmax(const Image2D& img) {
    Image2D out(img.width, img.height);
    const auto [lo_it, hi_it] = std::minmax_element(img.data.begin(), img.data.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi > lo) {
        const double inv = 1.0 / (hi - lo);
        for (size_t i = 0; i < img.size(); ++i) out.data[i] = (img.data[i] - lo) * inv;
    }
    return out;
}

} // namespace edgereg
