#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "deepsent/error.hpp"

namespace deepsent {

// One single-band image, row-major float32 reflectance.
struct Raster {
    int height = 0;
    int width = 0;
    std::vector<float> values;

    Raster() = default;
    Raster(int h, int w, float fill = 0.0f) : height(h), width(w), values(std::size_t(h) * w, fill) {
        if (h < 1 || w < 1) throw_config("raster dimensions must be >= 1");
    }

    float& at(int y, int x) { return values[std::size_t(y) * width + x]; }
    float at(int y, int x) const { return values[std::size_t(y) * width + x]; }
    std::size_t size() const { return values.size(); }

    bool same_shape(const Raster& o) const { return height == o.height && width == o.width; }

    bool all_finite() const {
        for (float v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

}  // namespace deepsent
