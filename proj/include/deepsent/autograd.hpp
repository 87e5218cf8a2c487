#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "deepsent/tensor.hpp"

namespace deepsent::nn {

using deepsent::Tensor;

// Reverse-mode tape. Ops append nodes in execution order, so walking the tape
// backwards is already a topological order. With recording off the same ops
// run eagerly and intermediates free as their last reference drops, which
// keeps full-resolution inference within a small memory envelope.
template <typename T>
class Graph;

template <typename T>
struct Var {
    std::shared_ptr<Tensor<T>> value;
    int node = -1;

    const Tensor<T>& val() const { return *value; }
};

template <typename T>
class Graph {
public:
    explicit Graph(bool recording = true) : recording_(recording) {}

    bool recording() const { return recording_; }

    Var<T> leaf(std::shared_ptr<Tensor<T>> value) {
        Var<T> v{std::move(value), -1};
        if (recording_) {
            nodes_.push_back(Node{v.value, {}, {}, nullptr});
            v.node = int(nodes_.size()) - 1;
        }
        return v;
    }

    Var<T> leaf(Tensor<T> value) { return leaf(std::make_shared<Tensor<T>>(std::move(value))); }

    // Registers an op result. backward(gout, parent_grads) accumulates into
    // the parent gradient tensors (already zero-initialized, same shape as
    // the parent values).
    using BackwardFn = std::function<void(const Tensor<T>& gout, const std::vector<Tensor<T>*>& parent_grads)>;

    Var<T> op(Tensor<T> out, const std::vector<Var<T>>& inputs, BackwardFn backward) {
        Var<T> v{std::make_shared<Tensor<T>>(std::move(out)), -1};
        if (recording_) {
            Node n;
            n.value = v.value;
            for (const Var<T>& in : inputs) n.parents.push_back(in.node);
            n.backward = std::move(backward);
            nodes_.push_back(std::move(n));
            v.node = int(nodes_.size()) - 1;
        }
        return v;
    }

    // Backpropagates from a scalar root through every reachable node.
    void backward(const Var<T>& root) {
        if (!recording_ || root.node < 0) throw_internal("backward() needs a recorded graph");
        if (nodes_[std::size_t(root.node)].value->numel() != 1)
            throw_internal("backward() root must be a scalar");

        std::vector<char> live(nodes_.size(), 0);
        std::vector<int> stack = {root.node};
        live[std::size_t(root.node)] = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int p : nodes_[std::size_t(i)].parents)
                if (p >= 0 && !live[std::size_t(p)]) {
                    live[std::size_t(p)] = 1;
                    stack.push_back(p);
                }
        }

        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (live[i]) nodes_[i].grad = Tensor<T>(nodes_[i].value->shape, T(0));
        nodes_[std::size_t(root.node)].grad.data[0] = T(1);

        std::vector<Tensor<T>*> pgrads;
        for (int i = root.node; i >= 0; --i) {
            Node& n = nodes_[std::size_t(i)];
            if (!live[std::size_t(i)] || !n.backward) continue;
            pgrads.clear();
            for (int p : n.parents) pgrads.push_back(p >= 0 ? &nodes_[std::size_t(p)].grad : nullptr);
            n.backward(n.grad, pgrads);
        }
    }

    const Tensor<T>& grad(const Var<T>& v) const {
        if (v.node < 0) throw_internal("grad() of an unrecorded var");
        return nodes_[std::size_t(v.node)].grad;
    }

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        std::shared_ptr<Tensor<T>> value;
        Tensor<T> grad;
        std::vector<int> parents;
        BackwardFn backward;
    };

    bool recording_;
    std::vector<Node> nodes_;
};

// --- elementwise and reduction ops ---------------------------------------

template <typename T>
Var<T> add(Graph<T>& g, const Var<T>& a, const Var<T>& b) {
    if (!same_shape(a.val(), b.val())) throw_internal("add: shape mismatch");
    Tensor<T> out = a.val();
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += b.val().data[i];
    return g.op(std::move(out), {a, b}, [](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
        for (int k = 0; k < 2; ++k)
            if (pg[std::size_t(k)])
                for (std::size_t i = 0; i < gout.numel(); ++i) pg[std::size_t(k)]->data[i] += gout.data[i];
    });
}

template <typename T>
Var<T> sub(Graph<T>& g, const Var<T>& a, const Var<T>& b) {
    if (!same_shape(a.val(), b.val())) throw_internal("sub: shape mismatch");
    Tensor<T> out = a.val();
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] -= b.val().data[i];
    return g.op(std::move(out), {a, b}, [](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
        if (pg[0])
            for (std::size_t i = 0; i < gout.numel(); ++i) pg[0]->data[i] += gout.data[i];
        if (pg[1])
            for (std::size_t i = 0; i < gout.numel(); ++i) pg[1]->data[i] -= gout.data[i];
    });
}

// out = scale * x + offset with compile-time constants (de-standardization).
template <typename T>
Var<T> affine(Graph<T>& g, const Var<T>& x, double scale, double offset) {
    Tensor<T> out = x.val();
    for (auto& v : out.data) v = T(scale * v + offset);
    return g.op(std::move(out), {x}, [scale](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
        if (pg[0])
            for (std::size_t i = 0; i < gout.numel(); ++i) pg[0]->data[i] += T(scale) * gout.data[i];
    });
}

template <typename T>
Var<T> square(Graph<T>& g, const Var<T>& x) {
    Tensor<T> out = x.val();
    for (auto& v : out.data) v *= v;
    auto xv = x.value;
    return g.op(std::move(out), {x}, [xv](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
        if (pg[0])
            for (std::size_t i = 0; i < gout.numel(); ++i) pg[0]->data[i] += T(2) * xv->data[i] * gout.data[i];
    });
}

template <typename T>
Var<T> mean_all(Graph<T>& g, const Var<T>& x) {
    Tensor<T> out({1});
    T acc = T(0);
    for (T v : x.val().data) acc += v;
    const std::size_t n = x.val().numel();
    out.data[0] = acc / T(n);
    return g.op(std::move(out), {x}, [n](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
        if (pg[0]) {
            const T gi = gout.data[0] / T(n);
            for (auto& v : pg[0]->data) v += gi;
        }
    });
}

// out = x - s, where s is a recorded scalar (the brightness-bias term).
template <typename T>
Var<T> sub_scalar(Graph<T>& g, const Var<T>& x, const Var<T>& s) {
    if (s.val().numel() != 1) throw_internal("sub_scalar: s must be scalar");
    Tensor<T> out = x.val();
    const T sv = s.val().data[0];
    for (auto& v : out.data) v -= sv;
    return g.op(std::move(out), {x, s}, [](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
        if (pg[0])
            for (std::size_t i = 0; i < gout.numel(); ++i) pg[0]->data[i] += gout.data[i];
        if (pg[1]) {
            T acc = T(0);
            for (T v : gout.data) acc += v;
            pg[1]->data[0] -= acc;
        }
    });
}

// --- structural ops -------------------------------------------------------

template <typename T>
Var<T> crop2d(Graph<T>& g, const Var<T>& x, int top, int left, int oh, int ow) {
    const Tensor<T>& xv = x.val();
    if (xv.rank() != 4) throw_internal("crop2d: rank-4 input expected");
    const int N = xv.dim(0), C = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
    if (top < 0 || left < 0 || top + oh > H || left + ow > W) throw_internal("crop2d: window out of range");
    Tensor<T> out({N, C, oh, ow});
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int y = 0; y < oh; ++y) {
                const T* src = &xv.data[((std::size_t(n) * C + c) * H + top + y) * W + left];
                T* dst = &out.data[((std::size_t(n) * C + c) * oh + y) * ow];
                for (int xx = 0; xx < ow; ++xx) dst[xx] = src[xx];
            }
    return g.op(std::move(out), {x},
                [=](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
                    if (!pg[0]) return;
                    for (int n = 0; n < N; ++n)
                        for (int c = 0; c < C; ++c)
                            for (int y = 0; y < oh; ++y) {
                                T* dst = &pg[0]->data[((std::size_t(n) * C + c) * H + top + y) * W + left];
                                const T* src = &gout.data[((std::size_t(n) * C + c) * oh + y) * ow];
                                for (int xx = 0; xx < ow; ++xx) dst[xx] += src[xx];
                            }
                });
}

template <typename T>
Var<T> concat_slots(Graph<T>& g, const std::vector<Var<T>>& parts) {
    if (parts.empty()) throw_internal("concat_slots: empty list");
    const Tensor<T>& first = parts.front().val();
    int total = 0;
    for (const auto& p : parts) {
        if (p.val().rank() != 4 || p.val().dim(1) != first.dim(1) || p.val().dim(2) != first.dim(2) ||
            p.val().dim(3) != first.dim(3))
            throw_internal("concat_slots: shape mismatch");
        total += p.val().dim(0);
    }
    Tensor<T> out({total, first.dim(1), first.dim(2), first.dim(3)});
    const std::size_t plane = out.numel() / std::size_t(total);
    std::size_t off = 0;
    std::vector<std::size_t> sizes;
    for (const auto& p : parts) {
        const std::size_t bytes = std::size_t(p.val().dim(0)) * plane;
        std::copy(p.val().data.begin(), p.val().data.end(), out.data.begin() + long(off));
        sizes.push_back(bytes);
        off += bytes;
    }
    return g.op(std::move(out), parts,
                [sizes](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
                    std::size_t off = 0;
                    for (std::size_t k = 0; k < sizes.size(); ++k) {
                        if (pg[k])
                            for (std::size_t i = 0; i < sizes[k]; ++i) pg[k]->data[i] += gout.data[off + i];
                        off += sizes[k];
                    }
                });
}

template <typename T>
Var<T> slice_slots(Graph<T>& g, const Var<T>& x, int begin, int count) {
    const Tensor<T>& xv = x.val();
    if (xv.rank() != 4 || begin < 0 || begin + count > xv.dim(0)) throw_internal("slice_slots: bad range");
    Tensor<T> out({count, xv.dim(1), xv.dim(2), xv.dim(3)});
    const std::size_t plane = xv.numel() / std::size_t(xv.dim(0));
    std::copy(xv.data.begin() + long(std::size_t(begin) * plane),
              xv.data.begin() + long(std::size_t(begin + count) * plane), out.data.begin());
    const std::size_t off = std::size_t(begin) * plane;
    const std::size_t len = std::size_t(count) * plane;
    return g.op(std::move(out), {x},
                [off, len](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
                    if (pg[0])
                        for (std::size_t i = 0; i < len; ++i) pg[0]->data[off + i] += gout.data[i];
                });
}

// Appends `extra` all-zero slots at the tail of axis 0.
template <typename T>
Var<T> pad_slots_zero(Graph<T>& g, const Var<T>& x, int extra) {
    if (extra == 0) return x;
    const Tensor<T>& xv = x.val();
    Tensor<T> out({xv.dim(0) + extra, xv.dim(1), xv.dim(2), xv.dim(3)});
    std::copy(xv.data.begin(), xv.data.end(), out.data.begin());
    const std::size_t len = xv.numel();
    return g.op(std::move(out), {x},
                [len](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
                    if (pg[0])
                        for (std::size_t i = 0; i < len; ++i) pg[0]->data[i] += gout.data[i];
                });
}

template <typename T>
Var<T> concat_channels(Graph<T>& g, const Var<T>& a, const Var<T>& b) {
    const Tensor<T>& av = a.val();
    const Tensor<T>& bv = b.val();
    if (av.rank() != 4 || bv.rank() != 4 || av.dim(0) != bv.dim(0) || av.dim(2) != bv.dim(2) ||
        av.dim(3) != bv.dim(3))
        throw_internal("concat_channels: shape mismatch");
    const int N = av.dim(0), Ca = av.dim(1), Cb = bv.dim(1), H = av.dim(2), W = av.dim(3);
    Tensor<T> out({N, Ca + Cb, H, W});
    const std::size_t hw = std::size_t(H) * W;
    for (int n = 0; n < N; ++n) {
        std::copy(av.data.begin() + long(std::size_t(n) * Ca * hw),
                  av.data.begin() + long(std::size_t(n + 1) * Ca * hw),
                  out.data.begin() + long(std::size_t(n) * (Ca + Cb) * hw));
        std::copy(bv.data.begin() + long(std::size_t(n) * Cb * hw),
                  bv.data.begin() + long(std::size_t(n + 1) * Cb * hw),
                  out.data.begin() + long(std::size_t(n) * (Ca + Cb) * hw + Ca * hw));
    }
    return g.op(std::move(out), {a, b},
                [N, Ca, Cb, hw](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
                    for (int n = 0; n < N; ++n) {
                        const std::size_t base = std::size_t(n) * (std::size_t(Ca) + Cb) * hw;
                        if (pg[0])
                            for (std::size_t i = 0; i < std::size_t(Ca) * hw; ++i)
                                pg[0]->data[std::size_t(n) * Ca * hw + i] += gout.data[base + i];
                        if (pg[1])
                            for (std::size_t i = 0; i < std::size_t(Cb) * hw; ++i)
                                pg[1]->data[std::size_t(n) * Cb * hw + i] += gout.data[base + std::size_t(Ca) * hw + i];
                    }
                });
}

// out[t] = mask[t] ? s1[t] + f[t] : s1[t]  -- the alpha-gated fusion update.
// Gating is a branch, not a multiply, so padded slots pass through bit-exact.
template <typename T>
Var<T> masked_residual_merge(Graph<T>& g, const Var<T>& s1, const Var<T>& f, std::vector<unsigned char> mask) {
    if (!same_shape(s1.val(), f.val())) throw_internal("masked_residual_merge: shape mismatch");
    if (int(mask.size()) != s1.val().dim(0)) throw_internal("masked_residual_merge: mask length mismatch");
    Tensor<T> out = s1.val();
    const std::size_t plane = out.numel() / std::size_t(out.dim(0));
    for (std::size_t t = 0; t < mask.size(); ++t)
        if (mask[t]) {
            T* dst = &out.data[t * plane];
            const T* src = &f.val().data[t * plane];
            for (std::size_t i = 0; i < plane; ++i) dst[i] += src[i];
        }
    return g.op(std::move(out), {s1, f},
                [mask, plane](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
                    if (pg[0])
                        for (std::size_t i = 0; i < gout.numel(); ++i) pg[0]->data[i] += gout.data[i];
                    if (pg[1])
                        for (std::size_t t = 0; t < mask.size(); ++t)
                            if (mask[t])
                                for (std::size_t i = 0; i < plane; ++i)
                                    pg[1]->data[t * plane + i] += gout.data[t * plane + i];
                });
}

// --- neural ops -----------------------------------------------------------

// 2-D convolution, stride 1, zero padding k/2 (same spatial size), weights
// shared across axis 0. x {N,Ci,H,W}, w {Co,Ci,k,k}, b {Co} -> {N,Co,H,W}.
template <typename T>
Var<T> conv2d(Graph<T>& g, const Var<T>& x, const Var<T>& w, const Var<T>& b) {
    const Tensor<T>& xv = x.val();
    const Tensor<T>& wv = w.val();
    if (xv.rank() != 4 || wv.rank() != 4) throw_internal("conv2d: rank-4 tensors expected");
    const int N = xv.dim(0), Ci = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
    const int Co = wv.dim(0), k = wv.dim(2);
    if (wv.dim(1) != Ci || wv.dim(3) != k || b.val().numel() != std::size_t(Co))
        throw_internal("conv2d: weight shape mismatch");
    const int p = k / 2;

    Tensor<T> out({N, Co, H, W});
    for (int n = 0; n < N; ++n)
        for (int co = 0; co < Co; ++co) {
            T* oplane = &out.data[(std::size_t(n) * Co + co) * H * W];
            const T bias = b.val().data[std::size_t(co)];
            for (std::size_t i = 0; i < std::size_t(H) * W; ++i) oplane[i] = bias;
            for (int ci = 0; ci < Ci; ++ci) {
                const T* iplane = &xv.data[(std::size_t(n) * Ci + ci) * H * W];
                for (int ky = 0; ky < k; ++ky)
                    for (int kx = 0; kx < k; ++kx) {
                        const T wgt = wv.data[((std::size_t(co) * Ci + ci) * k + ky) * k + kx];
                        const int y0 = std::max(0, p - ky), y1 = std::min(H, H + p - ky);
                        const int x0 = std::max(0, p - kx), x1 = std::min(W, W + p - kx);
                        for (int y = y0; y < y1; ++y) {
                            const T* irow = iplane + std::size_t(y + ky - p) * W + (kx - p);
                            T* orow = oplane + std::size_t(y) * W;
                            for (int xx = x0; xx < x1; ++xx) orow[xx] += wgt * irow[xx];
                        }
                    }
            }
        }

    auto xval = x.value;
    auto wval = w.value;
    return g.op(std::move(out), {x, w, b},
                [=](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
                    if (pg[2]) {
                        for (int co = 0; co < Co; ++co) {
                            T acc = T(0);
                            for (int n = 0; n < N; ++n) {
                                const T* gplane = &gout.data[(std::size_t(n) * Co + co) * H * W];
                                for (std::size_t i = 0; i < std::size_t(H) * W; ++i) acc += gplane[i];
                            }
                            pg[2]->data[std::size_t(co)] += acc;
                        }
                    }
                    for (int n = 0; n < N; ++n)
                        for (int co = 0; co < Co; ++co) {
                            const T* gplane = &gout.data[(std::size_t(n) * Co + co) * H * W];
                            for (int ci = 0; ci < Ci; ++ci) {
                                const T* iplane = &xval->data[(std::size_t(n) * Ci + ci) * H * W];
                                T* giplane = pg[0] ? &pg[0]->data[(std::size_t(n) * Ci + ci) * H * W] : nullptr;
                                for (int ky = 0; ky < k; ++ky)
                                    for (int kx = 0; kx < k; ++kx) {
                                        const std::size_t widx = ((std::size_t(co) * Ci + ci) * k + ky) * k + kx;
                                        const T wgt = wval->data[widx];
                                        const int y0 = std::max(0, p - ky), y1 = std::min(H, H + p - ky);
                                        const int x0 = std::max(0, p - kx), x1 = std::min(W, W + p - kx);
                                        T wacc = T(0);
                                        for (int y = y0; y < y1; ++y) {
                                            const T* irow = iplane + std::size_t(y + ky - p) * W + (kx - p);
                                            T* girow = giplane ? giplane + std::size_t(y + ky - p) * W + (kx - p) : nullptr;
                                            const T* grow = gplane + std::size_t(y) * W;
                                            if (girow)
                                                for (int xx = x0; xx < x1; ++xx) girow[xx] += wgt * grow[xx];
                                            if (pg[1])
                                                for (int xx = x0; xx < x1; ++xx) wacc += irow[xx] * grow[xx];
                                        }
                                        if (pg[1]) pg[1]->data[widx] += wacc;
                                    }
                            }
                        }
                });
}

// PReLU with one learnable slope (tensor of 1 element).
template <typename T>
Var<T> prelu(Graph<T>& g, const Var<T>& x, const Var<T>& slope) {
    if (slope.val().numel() != 1) throw_internal("prelu: slope must be a single element");
    const T a = slope.val().data[0];
    Tensor<T> out = x.val();
    for (auto& v : out.data)
        if (v < T(0)) v *= a;
    auto xval = x.value;
    return g.op(std::move(out), {x, slope},
                [xval, a](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
                    if (pg[0])
                        for (std::size_t i = 0; i < gout.numel(); ++i)
                            pg[0]->data[i] += (xval->data[i] > T(0)) ? gout.data[i] : a * gout.data[i];
                    if (pg[1]) {
                        T acc = T(0);
                        for (std::size_t i = 0; i < gout.numel(); ++i)
                            if (xval->data[i] <= T(0)) acc += xval->data[i] * gout.data[i];
                        pg[1]->data[0] += acc;
                    }
                });
}

// Instance normalization without affine parameters: each (n, c) plane is
// centered and scaled by 1/sqrt(var + eps) over its spatial extent.
template <typename T>
Var<T> instance_norm(Graph<T>& g, const Var<T>& x, double eps) {
    const Tensor<T>& xv = x.val();
    if (xv.rank() != 4) throw_internal("instance_norm: rank-4 input expected");
    const int planes = xv.dim(0) * xv.dim(1);
    const std::size_t hw = std::size_t(xv.dim(2)) * xv.dim(3);
    if (hw < 2) throw_internal("instance_norm: spatial extent must be >= 2");

    Tensor<T> out(xv.shape);
    auto stats = std::make_shared<std::vector<std::pair<T, T>>>();  // (mean, inv_std)
    stats->reserve(std::size_t(planes));
    for (int pidx = 0; pidx < planes; ++pidx) {
        const T* src = &xv.data[std::size_t(pidx) * hw];
        T* dst = &out.data[std::size_t(pidx) * hw];
        T mean = T(0);
        for (std::size_t i = 0; i < hw; ++i) mean += src[i];
        mean /= T(hw);
        T var = T(0);
        for (std::size_t i = 0; i < hw; ++i) {
            const T d = src[i] - mean;
            var += d * d;
        }
        var /= T(hw);
        const T inv = T(1) / std::sqrt(var + T(eps));
        for (std::size_t i = 0; i < hw; ++i) dst[i] = (src[i] - mean) * inv;
        stats->emplace_back(mean, inv);
    }
    auto xval = x.value;
    return g.op(std::move(out), {x},
                [xval, stats, planes, hw](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
                    if (!pg[0]) return;
                    for (int pidx = 0; pidx < planes; ++pidx) {
                        const T mean = (*stats)[std::size_t(pidx)].first;
                        const T inv = (*stats)[std::size_t(pidx)].second;
                        const T* src = &xval->data[std::size_t(pidx) * hw];
                        const T* go = &gout.data[std::size_t(pidx) * hw];
                        T* gi = &pg[0]->data[std::size_t(pidx) * hw];
                        T gsum = T(0), gysum = T(0);
                        for (std::size_t i = 0; i < hw; ++i) {
                            const T y = (src[i] - mean) * inv;
                            gsum += go[i];
                            gysum += go[i] * y;
                        }
                        const T gmean = gsum / T(hw);
                        const T gymean = gysum / T(hw);
                        for (std::size_t i = 0; i < hw; ++i) {
                            const T y = (src[i] - mean) * inv;
                            gi[i] += inv * (go[i] - gmean - y * gymean);
                        }
                    }
                });
}

// Depth-to-space: {N, C*s*s, H, W} -> {N, C, s*H, s*W}.
// Input channel c*s*s + r*s + q lands at output (c, s*y + r, s*x + q).
template <typename T>
Var<T> pixel_shuffle(Graph<T>& g, const Var<T>& x, int s) {
    const Tensor<T>& xv = x.val();
    if (xv.rank() != 4) throw_internal("pixel_shuffle: rank-4 input expected");
    const int N = xv.dim(0), Cin = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
    if (Cin % (s * s) != 0) throw_config("pixel_shuffle: channels not divisible by s^2");
    const int C = Cin / (s * s);

    Tensor<T> out({N, C, s * H, s * W});
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int r = 0; r < s; ++r)
                for (int q = 0; q < s; ++q) {
                    const T* iplane = &xv.data[(std::size_t(n) * Cin + std::size_t(c) * s * s + std::size_t(r) * s + q) * H * W];
                    for (int y = 0; y < H; ++y) {
                        T* orow = &out.data[((std::size_t(n) * C + c) * (s * H) + std::size_t(s) * y + r) * (s * W)];
                        const T* irow = iplane + std::size_t(y) * W;
                        for (int xx = 0; xx < W; ++xx) orow[std::size_t(s) * xx + q] = irow[xx];
                    }
                }
    return g.op(std::move(out), {x},
                [=](const Tensor<T>& gout, const std::vector<Tensor<T>*>& pg) {
                    if (!pg[0]) return;
                    for (int n = 0; n < N; ++n)
                        for (int c = 0; c < C; ++c)
                            for (int r = 0; r < s; ++r)
                                for (int q = 0; q < s; ++q) {
                                    T* giplane = &pg[0]->data[(std::size_t(n) * Cin + std::size_t(c) * s * s +
                                                               std::size_t(r) * s + q) * H * W];
                                    for (int y = 0; y < H; ++y) {
                                        const T* grow = &gout.data[((std::size_t(n) * C + c) * (s * H) +
                                                                    std::size_t(s) * y + r) * (s * W)];
                                        T* girow = giplane + std::size_t(y) * W;
                                        for (int xx = 0; xx < W; ++xx) girow[xx] += grow[std::size_t(s) * xx + q];
                                    }
                                }
                });
}

// Plain-tensor inverse of pixel_shuffle; used by tests as a round-trip oracle.
template <typename T>
Tensor<T> pixel_unshuffle_tensor(const Tensor<T>& x, int s) {
    const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    if (H % s != 0 || W % s != 0) throw_config("pixel_unshuffle: dims not divisible by s");
    Tensor<T> out({N, C * s * s, H / s, W / s});
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int y = 0; y < H; ++y)
                for (int xx = 0; xx < W; ++xx)
                    out.at4(n, c * s * s + (y % s) * s + (xx % s), y / s, xx / s) = x.at4(n, c, y, xx);
    return out;
}

}  // namespace deepsent::nn
