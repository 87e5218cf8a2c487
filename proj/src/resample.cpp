#include "deepsent/resample.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace deepsent {

double bicubic_weight(double t) {
    constexpr double a = -0.5;
    const double x = std::fabs(t);
    if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

namespace {

// Per-axis resampling plan: 4 reflected source taps + weights per output index.
struct AxisPlan {
    std::vector<std::array<int, 4>> idx;
    std::vector<std::array<double, 4>> w;
};

template <typename CenterFn>
AxisPlan plan_axis(int out_n, int in_n, CenterFn center) {
    AxisPlan p;
    p.idx.resize(out_n);
    p.w.resize(out_n);
    for (int i = 0; i < out_n; ++i) {
        const double c = center(i);
        const int base = int(std::floor(c)) - 1;
        for (int j = 0; j < 4; ++j) {
            p.idx[i][j] = reflect_index(base + j, in_n);
            p.w[i][j] = bicubic_weight(c - double(base + j));
        }
    }
    return p;
}

Raster apply_separable(const Raster& in, const AxisPlan& px, const AxisPlan& py) {
    const int out_w = int(px.idx.size());
    const int out_h = int(py.idx.size());

    // Horizontal pass kept in double to avoid an intermediate rounding step.
    std::vector<double> tmp(std::size_t(in.height) * out_w);
    for (int y = 0; y < in.height; ++y) {
        const float* row = &in.values[std::size_t(y) * in.width];
        double* trow = &tmp[std::size_t(y) * out_w];
        for (int x = 0; x < out_w; ++x) {
            const auto& id = px.idx[x];
            const auto& w = px.w[x];
            const double s = w[0] * row[id[0]] + w[1] * row[id[1]] + w[2] * row[id[2]] + w[3] * row[id[3]];
            trow[x] = s / (w[0] + w[1] + w[2] + w[3]);
        }
    }

    Raster out(out_h, out_w);
    for (int y = 0; y < out_h; ++y) {
        const auto& id = py.idx[y];
        const auto& w = py.w[y];
        const double wsum = w[0] + w[1] + w[2] + w[3];
        const double* r0 = &tmp[std::size_t(id[0]) * out_w];
        const double* r1 = &tmp[std::size_t(id[1]) * out_w];
        const double* r2 = &tmp[std::size_t(id[2]) * out_w];
        const double* r3 = &tmp[std::size_t(id[3]) * out_w];
        float* orow = &out.values[std::size_t(y) * out_w];
        for (int x = 0; x < out_w; ++x)
            orow[x] = float((w[0] * r0[x] + w[1] * r1[x] + w[2] * r2[x] + w[3] * r3[x]) / wsum);
    }
    return out;
}

}  // namespace

Raster bicubic_resize(const Raster& in, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1) throw_config("bicubic_resize: output dims must be >= 1");
    const double sy = double(in.height) / out_h;
    const double sx = double(in.width) / out_w;
    const auto px = plan_axis(out_w, in.width, [&](int i) { return (i + 0.5) * sx - 0.5; });
    const auto py = plan_axis(out_h, in.height, [&](int i) { return (i + 0.5) * sy - 0.5; });
    return apply_separable(in, px, py);
}

Raster bicubic_shift(const Raster& in, double dy, double dx) {
    const auto px = plan_axis(in.width, in.width, [&](int i) { return double(i) - dx; });
    const auto py = plan_axis(in.height, in.height, [&](int i) { return double(i) - dy; });
    return apply_separable(in, px, py);
}

Raster gaussian_blur(const Raster& in, double sigma) {
    if (sigma < 0.0) throw_config("gaussian_blur: sigma must be >= 0");
    const int radius = int(std::ceil(3.0 * sigma));
    if (radius == 0) return in;

    std::vector<double> k(std::size_t(2 * radius + 1));
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[std::size_t(i + radius)] = std::exp(-0.5 * double(i) * double(i) / (sigma * sigma));
        ksum += k[std::size_t(i + radius)];
    }

    std::vector<double> tmp(in.size());
    for (int y = 0; y < in.height; ++y) {
        const float* row = &in.values[std::size_t(y) * in.width];
        double* trow = &tmp[std::size_t(y) * in.width];
        for (int x = 0; x < in.width; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += k[std::size_t(i + radius)] * row[reflect_index(x + i, in.width)];
            trow[x] = s / ksum;
        }
    }

    Raster out(in.height, in.width);
    for (int y = 0; y < in.height; ++y) {
        float* orow = &out.values[std::size_t(y) * in.width];
        for (int x = 0; x < in.width; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += k[std::size_t(i + radius)] * tmp[std::size_t(reflect_index(y + i, in.height)) * in.width + x];
            orow[x] = float(s / ksum);
        }
    }
    return out;
}

}  // namespace deepsent
