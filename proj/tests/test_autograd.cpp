#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deepsent/autograd.hpp"
#include "test_support.hpp"

using namespace deepsent;
using namespace deepsent::nn;
using namespace deepsent::testing;

namespace {
Rng g_rng = Rng::keyed(2024, {77});
}

TEST_CASE("elementwise chain gradients match finite differences") {
    auto x = random_tensor({2, 3, 4, 4}, g_rng);
    auto y = random_tensor({2, 3, 4, 4}, g_rng);
    const double err = gradcheck({x, y}, [](Graph<double>& g, const std::vector<Var<double>>& v) {
        auto d = sub(g, v[0], v[1]);
        auto a = affine(g, d, 1.7, 0.3);
        return mean_all(g, square(g, add(g, a, v[1])));
    });
    CHECK(err < 1e-6);
}

TEST_CASE("sub_scalar routes gradient into the bias term") {
    auto x = random_tensor({1, 1, 3, 3}, g_rng);
    auto s = random_tensor({1}, g_rng);
    const double err = gradcheck({x, s}, [](Graph<double>& g, const std::vector<Var<double>>& v) {
        return mean_all(g, square(g, sub_scalar(g, v[0], v[1])));
    });
    CHECK(err < 1e-6);
}

TEST_CASE("crop2d gradient scatters into the window") {
    auto x = random_tensor({1, 2, 6, 5}, g_rng);
    const double err = gradcheck({x}, [](Graph<double>& g, const std::vector<Var<double>>& v) {
        return mean_all(g, square(g, crop2d(g, v[0], 1, 2, 4, 3)));
    });
    CHECK(err < 1e-6);
}

TEST_CASE("slot ops: concat, slice, pad") {
    auto a = random_tensor({2, 2, 3, 3}, g_rng);
    auto b = random_tensor({3, 2, 3, 3}, g_rng);
    const double err = gradcheck({a, b}, [](Graph<double>& g, const std::vector<Var<double>>& v) {
        auto cat = concat_slots(g, {v[0], v[1]});
        auto padded = pad_slots_zero(g, cat, 3);
        auto sl = slice_slots(g, padded, 1, 5);
        return mean_all(g, square(g, sl));
    });
    CHECK(err < 1e-6);
}

TEST_CASE("concat_channels gradient splits correctly") {
    auto a = random_tensor({2, 3, 4, 4}, g_rng);
    auto b = random_tensor({2, 1, 4, 4}, g_rng);
    const double err = gradcheck({a, b}, [](Graph<double>& g, const std::vector<Var<double>>& v) {
        return mean_all(g, square(g, concat_channels(g, v[0], v[1])));
    });
    CHECK(err < 1e-6);
}

TEST_CASE("masked_residual_merge: gating semantics and gradients") {
    auto s1 = random_tensor({4, 2, 3, 3}, g_rng);
    auto f = random_tensor({4, 2, 3, 3}, g_rng);
    const std::vector<unsigned char> mask = {1, 0, 1, 0};

    Graph<double> g(false);
    auto out = masked_residual_merge(g, g.leaf(s1), g.leaf(f), mask);
    const std::size_t plane = 2 * 3 * 3;
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t i = 0; i < plane; ++i) {
            const double want = mask[t] ? s1.data[t * plane + i] + f.data[t * plane + i] : s1.data[t * plane + i];
            CHECK(out.val().data[t * plane + i] == want);
        }

    const double err = gradcheck({s1, f}, [&](Graph<double>& gg, const std::vector<Var<double>>& v) {
        return mean_all(gg, square(gg, masked_residual_merge(gg, v[0], v[1], mask)));
    });
    CHECK(err < 1e-6);
}

TEST_CASE("conv2d forward matches a naive per-pixel reference") {
    auto x = random_tensor({2, 3, 5, 6}, g_rng);
    auto w = random_tensor({4, 3, 3, 3}, g_rng);
    auto b = random_tensor({4}, g_rng);

    Graph<double> g(false);
    auto out = conv2d(g, g.leaf(x), g.leaf(w), g.leaf(b));

    for (int n = 0; n < 2; ++n)
        for (int co = 0; co < 4; ++co)
            for (int y = 0; y < 5; ++y)
                for (int xx = 0; xx < 6; ++xx) {
                    double acc = b.data[std::size_t(co)];
                    for (int ci = 0; ci < 3; ++ci)
                        for (int ky = 0; ky < 3; ++ky)
                            for (int kx = 0; kx < 3; ++kx) {
                                const int iy = y + ky - 1, ix = xx + kx - 1;
                                if (iy < 0 || iy >= 5 || ix < 0 || ix >= 6) continue;
                                acc += w.at4(co, ci, ky, kx) * x.at4(n, ci, iy, ix);
                            }
                    CHECK(out.val().at4(n, co, y, xx) == doctest::Approx(acc).epsilon(1e-12));
                }
}

TEST_CASE("conv2d gradients (3x3 and 1x1) match finite differences") {
    for (int k : {3, 1}) {
        auto x = random_tensor({2, 2, 4, 4}, g_rng);
        auto w = random_tensor({3, 2, k, k}, g_rng);
        auto b = random_tensor({3}, g_rng);
        const double err = gradcheck({x, w, b}, [](Graph<double>& g, const std::vector<Var<double>>& v) {
            return mean_all(g, square(g, conv2d(g, v[0], v[1], v[2])));
        });
        CHECK(err < 1e-6);
    }
}

TEST_CASE("prelu gradient, including the slope") {
    auto x = random_tensor({1, 2, 4, 4}, g_rng);
    // keep values away from the kink
    for (auto& v : x.data)
        if (std::fabs(v) < 0.05) v += 0.1;
    auto a = random_tensor({1}, g_rng, 0.1, 0.5);
    const double err = gradcheck({x, a}, [](Graph<double>& g, const std::vector<Var<double>>& v) {
        return mean_all(g, square(g, prelu(g, v[0], v[1])));
    });
    CHECK(err < 1e-6);
}

TEST_CASE("instance_norm: constant plane to zeros, unit stats, idempotence") {
    Graph<double> g(false);
    Tensor<double> c({1, 1, 4, 4}, 3.5);  // dyadic: the plane mean is exact
    auto out = instance_norm(g, g.leaf(c), 1e-5);
    for (double v : out.val().data) CHECK(v == 0.0);
    Tensor<double> c2({1, 1, 4, 4}, 3.7);
    auto out2 = instance_norm(g, g.leaf(c2), 1e-5);
    for (double v : out2.val().data) CHECK(std::fabs(v) < 1e-9);

    auto x = random_tensor({1, 3, 8, 8}, g_rng);
    auto y = instance_norm(g, g.leaf(x), 1e-5);
    for (int ch = 0; ch < 3; ++ch) {
        double m = 0.0, s2 = 0.0;
        for (int i = 0; i < 64; ++i) m += y.val().at4(0, ch, i / 8, i % 8);
        m /= 64.0;
        for (int i = 0; i < 64; ++i) {
            const double d = y.val().at4(0, ch, i / 8, i % 8) - m;
            s2 += d * d;
        }
        CHECK(std::fabs(m) < 1e-5);
        CHECK(std::sqrt(s2 / 64.0) == doctest::Approx(1.0).epsilon(1e-3));
    }

    auto yy = instance_norm(g, y, 1e-5);
    for (std::size_t i = 0; i < yy.val().numel(); ++i)
        CHECK(yy.val().data[i] == doctest::Approx(y.val().data[i]).epsilon(1e-4));
}

TEST_CASE("instance_norm gradient matches finite differences") {
    auto x = random_tensor({2, 2, 3, 4}, g_rng);
    const double err = gradcheck({x}, [](Graph<double>& g, const std::vector<Var<double>>& v) {
        auto y = instance_norm(g, v[0], 1e-5);
        auto z = affine(g, y, 0.8, 0.1);
        return mean_all(g, square(g, z));
    });
    CHECK(err < 1e-5);
}

TEST_CASE("pixel_shuffle: spec mapping, s=1 identity, round-trip, gradient") {
    Graph<double> g(false);

    // 4x2x2, s=2: channel r*2+q lands at (0, 2y+r, 2x+q)
    Tensor<double> x({1, 4, 2, 2});
    for (std::size_t i = 0; i < x.numel(); ++i) x.data[i] = double(i);
    auto y = pixel_shuffle(g, g.leaf(x), 2);
    CHECK(y.val().shape == std::vector<int>{1, 1, 4, 4});
    for (int r = 0; r < 2; ++r)
        for (int q = 0; q < 2; ++q)
            for (int yy = 0; yy < 2; ++yy)
                for (int xx = 0; xx < 2; ++xx)
                    CHECK(y.val().at4(0, 0, 2 * yy + r, 2 * xx + q) == x.at4(0, r * 2 + q, yy, xx));

    auto x1 = random_tensor({2, 3, 4, 4}, g_rng);
    auto same = pixel_shuffle(g, g.leaf(x1), 1);
    CHECK(same.val().data == x1.data);

    for (int s : {2, 3}) {
        auto xs = random_tensor({2, 2 * s * s, 3, 3}, g_rng);
        auto shuffled = pixel_shuffle(g, g.leaf(xs), s);
        const auto back = pixel_unshuffle_tensor(shuffled.val(), s);
        CHECK(back.data == xs.data);
    }

    auto xg = random_tensor({1, 8, 3, 3}, g_rng);
    const double err = gradcheck({xg}, [](Graph<double>& gg, const std::vector<Var<double>>& v) {
        return mean_all(gg, square(gg, pixel_shuffle(gg, v[0], 2)));
    });
    CHECK(err < 1e-6);

    Tensor<double> bad({1, 3, 2, 2});
    CHECK_THROWS_AS(pixel_shuffle(g, g.leaf(bad), 2), Error);
}

TEST_CASE("eager mode records nothing and matches recorded values") {
    auto x = random_tensor({1, 2, 3, 3}, g_rng);
    Graph<double> rec(true);
    Graph<double> eag(false);
    auto a = mean_all(rec, square(rec, rec.leaf(x)));
    auto b = mean_all(eag, square(eag, eag.leaf(x)));
    CHECK(a.val().data[0] == b.val().data[0]);
    CHECK(rec.size() == 3);
    CHECK(eag.size() == 0);
}
