#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "deepsent/error.hpp"
#include "deepsent/raster.hpp"

namespace deepsent {

// Dense row-major tensor, rank <= 4. Network activations use {T, C, H, W}.
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s, T fill = T(0))
        : shape(std::move(s)), data(numel_of(shape), fill) {}

    static std::size_t numel_of(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int d : s) {
            if (d < 1) throw_config("tensor dims must be >= 1");
            n *= std::size_t(d);
        }
        return n;
    }

    std::size_t numel() const { return data.size(); }
    int rank() const { return int(shape.size()); }
    int dim(int i) const { return shape[std::size_t(i)]; }

    T& at4(int n, int c, int y, int x) {
        return data[((std::size_t(n) * dim(1) + c) * dim(2) + y) * dim(3) + x];
    }
    T at4(int n, int c, int y, int x) const {
        return data[((std::size_t(n) * dim(1) + c) * dim(2) + y) * dim(3) + x];
    }

    static Tensor from_raster(const Raster& r) {
        Tensor t({1, 1, r.height, r.width});
        for (std::size_t i = 0; i < r.size(); ++i) t.data[i] = T(r.values[i]);
        return t;
    }

    Raster to_raster() const {
        if (numel() != std::size_t(dim(rank() - 2)) * dim(rank() - 1))
            throw_internal("to_raster requires a single-plane tensor");
        Raster r(dim(rank() - 2), dim(rank() - 1));
        for (std::size_t i = 0; i < r.size(); ++i) r.values[i] = float(data[i]);
        return r;
    }
};

template <typename T>
bool same_shape(const Tensor<T>& a, const Tensor<T>& b) {
    return a.shape == b.shape;
}

}  // namespace deepsent
