#pragma once

#include "deepsent/raster.hpp"

namespace deepsent {

// All resampling in this project goes through one fixed kernel so that file
// outputs are reproducible bit for bit: separable Catmull-Rom bicubic
// (a = -0.5), symmetric reflection at borders, double accumulation divided by
// the tap-weight sum (keeps constants exactly constant).

// Catmull-Rom kernel value at offset t.
double bicubic_weight(double t);

// Symmetric border reflection: -1 -> 0, -2 -> 1, n -> n-1.
int reflect_index(int i, int n);

// Resizes to out_h x out_w; pixel-center mapping src = (dst + 0.5)/scale - 0.5.
// Used both for integer-factor upsampling and plain bicubic downsampling.
Raster bicubic_resize(const Raster& in, int out_h, int out_w);

// Translates image content by (dx, dy) pixels: out(y, x) = in(y - dy, x - dx).
Raster bicubic_shift(const Raster& in, double dy, double dx);

// Separable Gaussian blur, kernel radius ceil(3*sigma); sigma = 0 is identity.
Raster gaussian_blur(const Raster& in, double sigma);

}  // namespace deepsent
