#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "deepsent/resample.hpp"
#include "deepsent/rng.hpp"

using namespace deepsent;

namespace {

Raster random_raster(int h, int w, Rng& rng) {
    Raster r(h, w);
    for (auto& v : r.values) v = float(rng.uniform());
    return r;
}

// Non-separable full 2-D reference: every output pixel gathers its 4x4 tap
// neighborhood directly. Independent of the separable production path.
Raster reference_resize(const Raster& in, int out_h, int out_w) {
    Raster out(out_h, out_w);
    const double sy = double(in.height) / out_h;
    const double sx = double(in.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        const double cy = (y + 0.5) * sy - 0.5;
        const int by = int(std::floor(cy)) - 1;
        for (int x = 0; x < out_w; ++x) {
            const double cx = (x + 0.5) * sx - 0.5;
            const int bx = int(std::floor(cx)) - 1;
            double acc = 0.0, wacc = 0.0;
            for (int j = 0; j < 4; ++j)
                for (int i = 0; i < 4; ++i) {
                    const double w = bicubic_weight(cy - (by + j)) * bicubic_weight(cx - (bx + i));
                    acc += w * in.at(reflect_index(by + j, in.height), reflect_index(bx + i, in.width));
                    wacc += w;
                }
            out.at(y, x) = float(acc / wacc);
        }
    }
    return out;
}

Raster reference_blur(const Raster& in, double sigma) {
    const int radius = int(std::ceil(3.0 * sigma));
    if (radius == 0) return in;
    Raster out(in.height, in.width);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0, wacc = 0.0;
            for (int j = -radius; j <= radius; ++j)
                for (int i = -radius; i <= radius; ++i) {
                    const double w = std::exp(-0.5 * (double(j) * j + double(i) * i) / (sigma * sigma));
                    acc += w * in.at(reflect_index(y + j, in.height), reflect_index(x + i, in.width));
                    wacc += w;
                }
            out.at(y, x) = float(acc / wacc);
        }
    return out;
}

}  // namespace

TEST_CASE("reflect_index mirrors symmetrically") {
    CHECK(reflect_index(0, 5) == 0);
    CHECK(reflect_index(-1, 5) == 0);
    CHECK(reflect_index(-2, 5) == 1);
    CHECK(reflect_index(5, 5) == 4);
    CHECK(reflect_index(6, 5) == 3);
    CHECK(reflect_index(-1, 1) == 0);
    CHECK(reflect_index(3, 1) == 0);
}

TEST_CASE("bicubic kernel interpolates: unit at 0, zero at integers") {
    CHECK(bicubic_weight(0.0) == doctest::Approx(1.0));
    CHECK(bicubic_weight(1.0) == doctest::Approx(0.0));
    CHECK(bicubic_weight(-1.0) == doctest::Approx(0.0));
    CHECK(bicubic_weight(2.0) == doctest::Approx(0.0));
    CHECK(bicubic_weight(2.5) == 0.0);
}

TEST_CASE("resize of a constant raster is that constant everywhere") {
    const Raster c(7, 5, 0.37f);
    for (int f : {2, 3, 6, 18}) {
        const Raster up = bicubic_resize(c, 7 * f, 5 * f);
        for (float v : up.values) CHECK(v == 0.37f);
    }
    const Raster big(36, 36, -1.25f);
    const Raster down = bicubic_resize(big, 6, 6);
    for (float v : down.values) CHECK(v == -1.25f);
}

TEST_CASE("same-size resize and zero shift are exact identities") {
    Rng rng = Rng::keyed(1, {1});
    const Raster r = random_raster(9, 13, rng);
    const Raster same = bicubic_resize(r, 9, 13);
    CHECK(same.values == r.values);
    const Raster shifted = bicubic_shift(r, 0.0, 0.0);
    CHECK(shifted.values == r.values);
}

TEST_CASE("integer shift relocates interior pixels exactly") {
    Rng rng = Rng::keyed(2, {2});
    const Raster r = random_raster(10, 10, rng);
    const Raster s = bicubic_shift(r, 2.0, -1.0);
    for (int y = 4; y < 8; ++y)
        for (int x = 4; x < 8; ++x) CHECK(s.at(y, x) == r.at(y - 2, x + 1));
}

TEST_CASE("separable resize matches the direct 2-D reference") {
    Rng rng = Rng::keyed(3, {3});
    for (int trial = 0; trial < 5; ++trial) {
        const Raster r = random_raster(12, 12, rng);
        for (auto [oh, ow] : {std::pair{36, 36}, std::pair{4, 4}, std::pair{24, 8}}) {
            const Raster got = bicubic_resize(r, oh, ow);
            const Raster want = reference_resize(r, oh, ow);
            for (std::size_t i = 0; i < got.size(); ++i)
                CHECK(got.values[i] == doctest::Approx(want.values[i]).epsilon(0).scale(1).epsilon(1e-6));
        }
    }
}

TEST_CASE("subpixel shift matches the direct 2-D reference") {
    Rng rng = Rng::keyed(4, {4});
    const Raster r = random_raster(11, 9, rng);
    const Raster got = bicubic_shift(r, 0.75, -1.25);
    Raster want(r.height, r.width);
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x) {
            const double cy = y - 0.75, cx = x + 1.25;
            const int by = int(std::floor(cy)) - 1, bx = int(std::floor(cx)) - 1;
            double acc = 0.0, wacc = 0.0;
            for (int j = 0; j < 4; ++j)
                for (int i = 0; i < 4; ++i) {
                    const double w = bicubic_weight(cy - (by + j)) * bicubic_weight(cx - (bx + i));
                    acc += w * r.at(reflect_index(by + j, r.height), reflect_index(bx + i, r.width));
                    wacc += w;
                }
            want.at(y, x) = float(acc / wacc);
        }
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(std::fabs(got.values[i] - want.values[i]) < 1e-6f);
}

TEST_CASE("gaussian blur: constants exact, reference match, sigma 0 identity") {
    const Raster c(8, 8, 0.5f);
    const Raster bc = gaussian_blur(c, 1.3);
    for (float v : bc.values) CHECK(v == 0.5f);

    Rng rng = Rng::keyed(5, {5});
    const Raster r = random_raster(10, 12, rng);
    CHECK(gaussian_blur(r, 0.0).values == r.values);

    for (double sigma : {0.4, 1.0}) {
        const Raster got = gaussian_blur(r, sigma);
        const Raster want = reference_blur(r, sigma);
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(std::fabs(got.values[i] - want.values[i]) < 1e-6f);
    }
}

TEST_CASE("blur rejects negative sigma") {
    const Raster r(4, 4, 0.0f);
    CHECK_THROWS_AS(gaussian_blur(r, -0.1), Error);
}
