#include "adcnn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adcnn/error.hpp"

namespace adcnn {

FilterBank::FilterBank(std::size_t kernel, std::size_t in, std::size_t out)
    : kernel_size(kernel),
      in_channels(in),
      out_channels(out),
      weights({out, in, kernel, kernel}),
      bias({out}) {
    if (kernel % 2 == 0)
        throw ConfigError("kernel_size must be odd, got " + std::to_string(kernel));
}

namespace {

void check_chw(const Tensor& t, const char* what) {
    if (t.rank() != 3)
        throw ShapeError(std::string(what) + " must be [C,H,W], got rank " +
                         std::to_string(t.rank()));
}

// Valid output range [lo, hi) along one axis for kernel shift d: the input
// index i+d must stay inside [0, extent). Empty when lo >= hi.
struct ShiftRange {
    std::size_t lo, hi;
};

ShiftRange shift_range(std::size_t extent, long d) {
    const long n = static_cast<long>(extent);
    const long lo = std::max(0L, -d);
    const long hi = std::min(n, n - d);
    if (lo >= hi) return {0, 0};
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

} // namespace

Tensor conv2d_forward(const Tensor& input, const FilterBank& filters) {
    check_chw(input, "conv input");
    if (filters.kernel_size % 2 == 0)
        throw ConfigError("kernel_size must be odd");
    if (input.dim(0) != filters.in_channels)
        throw ShapeError("conv input has " + std::to_string(input.dim(0)) +
                         " channels, filters expect " + std::to_string(filters.in_channels));

    const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
    const std::size_t F = filters.out_channels, K = filters.kernel_size;
    const long pad = static_cast<long>((K - 1) / 2);

    Tensor out({F, H, W});
    for (std::size_t f = 0; f < F; ++f) {
        double* omap = &out.data[f * H * W];
        const double b = filters.bias[f];
        std::fill(omap, omap + H * W, b);
        for (std::size_t c = 0; c < C; ++c) {
            const double* imap = &input.data[c * H * W];
            for (std::size_t ky = 0; ky < K; ++ky) {
                for (std::size_t kx = 0; kx < K; ++kx) {
                    const double w = filters.weights.at(f, c, ky, kx);
                    if (w == 0.0) continue;
                    const long dy = static_cast<long>(ky) - pad;
                    const long dx = static_cast<long>(kx) - pad;
                    const auto [y0, y1] = shift_range(H, dy);
                    const auto [x0, x1] = shift_range(W, dx);
                    for (std::size_t y = y0; y < y1; ++y) {
                        double* orow = omap + y * W;
                        const double* irow = imap + (y + dy) * W + dx;
                        for (std::size_t x = x0; x < x1; ++x)
                            orow[x] += w * irow[x];
                    }
                }
            }
        }
    }
    return out;
}

ConvGradients conv2d_backward(const Tensor& input, const FilterBank& filters,
                              const Tensor& upstream) {
    check_chw(input, "conv input");
    check_chw(upstream, "conv upstream");
    if (input.dim(0) != filters.in_channels)
        throw ShapeError("conv input channel mismatch");
    if (upstream.dim(0) != filters.out_channels || upstream.dim(1) != input.dim(1) ||
        upstream.dim(2) != input.dim(2))
        throw ShapeError("conv upstream shape does not match forward output");

    const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
    const std::size_t F = filters.out_channels, K = filters.kernel_size;
    const long pad = static_cast<long>((K - 1) / 2);

    ConvGradients g;
    g.weights = Tensor::zeros_like(filters.weights);
    g.bias = Tensor::zeros_like(filters.bias);
    g.input = Tensor::zeros_like(input);

    for (std::size_t f = 0; f < F; ++f) {
        const double* umap = &upstream.data[f * H * W];
        double db = 0.0;
        for (std::size_t i = 0; i < H * W; ++i) db += umap[i];
        g.bias[f] = db;

        for (std::size_t c = 0; c < C; ++c) {
            const double* imap = &input.data[c * H * W];
            double* gmap = &g.input.data[c * H * W];
            for (std::size_t ky = 0; ky < K; ++ky) {
                for (std::size_t kx = 0; kx < K; ++kx) {
                    const long dy = static_cast<long>(ky) - pad;
                    const long dx = static_cast<long>(kx) - pad;
                    const auto [y0, y1] = shift_range(H, dy);
                    const auto [x0, x1] = shift_range(W, dx);

                    // dW[f,c,ky,kx] = sum over valid (y,x) of up*in(shifted)
                    double dw = 0.0;
                    for (std::size_t y = y0; y < y1; ++y) {
                        const double* urow = umap + y * W;
                        const double* irow = imap + (y + dy) * W + dx;
                        for (std::size_t x = x0; x < x1; ++x)
                            dw += urow[x] * irow[x];
                    }
                    g.weights.at(f, c, ky, kx) = dw;

                    // dIn[c, y+dy, x+dx] += w * up[f, y, x]
                    const double w = filters.weights.at(f, c, ky, kx);
                    if (w == 0.0) continue;
                    for (std::size_t y = y0; y < y1; ++y) {
                        const double* urow = umap + y * W;
                        double* grow = gmap + (y + dy) * W + dx;
                        for (std::size_t x = x0; x < x1; ++x)
                            grow[x] += w * urow[x];
                    }
                }
            }
        }
    }
    return g;
}

PoolResult maxpool_forward(const Tensor& input) {
    check_chw(input, "pool input");
    const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
    if (H % 2 != 0 || W % 2 != 0)
        throw ShapeError("maxpool needs even spatial dims, got " + std::to_string(H) +
                         "x" + std::to_string(W));

    PoolResult r;
    r.output = Tensor({C, H / 2, W / 2});
    r.argmax.channels = C;
    r.argmax.in_h = H;
    r.argmax.in_w = W;
    r.argmax.out_h = H / 2;
    r.argmax.out_w = W / 2;
    r.argmax.index.resize(C * (H / 2) * (W / 2));

    std::size_t o = 0;
    for (std::size_t c = 0; c < C; ++c) {
        const double* imap = &input.data[c * H * W];
        for (std::size_t y = 0; y + 1 < H; y += 2) {
            for (std::size_t x = 0; x + 1 < W; x += 2) {
                std::size_t best = y * W + x;
                double bestv = imap[best];
                const std::size_t cand[3] = {y * W + x + 1, (y + 1) * W + x,
                                             (y + 1) * W + x + 1};
                for (std::size_t k = 0; k < 3; ++k) {
                    if (imap[cand[k]] > bestv) { // strict: first occurrence wins ties
                        bestv = imap[cand[k]];
                        best = cand[k];
                    }
                }
                r.output[o] = bestv;
                r.argmax.index[o] = c * H * W + best;
                ++o;
            }
        }
    }
    return r;
}

Tensor maxpool_backward(const ArgmaxMap& argmax, const Tensor& upstream) {
    if (upstream.rank() != 3 || upstream.dim(0) != argmax.channels ||
        upstream.dim(1) != argmax.out_h || upstream.dim(2) != argmax.out_w)
        throw ShapeError("pool upstream shape does not match argmax map");
    if (argmax.index.size() != upstream.size())
        throw ShapeError("argmax map is stale");

    Tensor grad({argmax.channels, argmax.in_h, argmax.in_w});
    for (std::size_t i = 0; i < argmax.index.size(); ++i) {
        if (argmax.index[i] >= grad.size())
            throw ShapeError("argmax map refers outside the input");
        grad[argmax.index[i]] += upstream[i];
    }
    return grad;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (weights.rank() != 2)
        throw ShapeError("dense weights must be [m,n]");
    const std::size_t m = weights.dim(0), n = weights.dim(1);
    if (input.size() != n)
        throw ShapeError("dense input size " + std::to_string(input.size()) +
                         " != weight columns " + std::to_string(n));
    if (bias.size() != m)
        throw ShapeError("dense bias size mismatch");

    Tensor out({m});
    for (std::size_t i = 0; i < m; ++i) {
        const double* wrow = &weights.data[i * n];
        double acc = bias[i];
        for (std::size_t j = 0; j < n; ++j) acc += wrow[j] * input[j];
        out[i] = acc;
    }
    return out;
}

DenseGradients dense_backward(const Tensor& input, const Tensor& weights,
                              const Tensor& upstream) {
    if (weights.rank() != 2)
        throw ShapeError("dense weights must be [m,n]");
    const std::size_t m = weights.dim(0), n = weights.dim(1);
    if (input.size() != n || upstream.size() != m)
        throw ShapeError("dense backward shape mismatch");

    DenseGradients g;
    g.weights = Tensor({m, n});
    g.bias = Tensor({m});
    g.input = Tensor(input.shape);
    for (std::size_t i = 0; i < m; ++i) {
        const double u = upstream[i];
        g.bias[i] = u;
        double* gw = &g.weights.data[i * n];
        const double* wrow = &weights.data[i * n];
        for (std::size_t j = 0; j < n; ++j) {
            gw[j] = u * input[j];
            g.input[j] += u * wrow[j];
        }
    }
    return g;
}

Tensor relu(const Tensor& input) {
    Tensor out(input.shape);
    for (std::size_t i = 0; i < input.size(); ++i)
        out[i] = input[i] > 0.0 ? input[i] : 0.0;
    return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& upstream) {
    if (!input.same_shape(upstream))
        throw ShapeError("relu upstream shape mismatch");
    Tensor grad(input.shape);
    for (std::size_t i = 0; i < input.size(); ++i)
        grad[i] = input[i] > 0.0 ? upstream[i] : 0.0;
    return grad;
}

Tensor softmax(const Tensor& logits) {
    Tensor p(logits.shape);
    double mx = logits[0];
    for (std::size_t i = 1; i < logits.size(); ++i) mx = std::max(mx, logits[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) p[i] /= sum;
    return p;
}

SoftmaxLoss softmax_cross_entropy(const Tensor& logits, std::size_t true_class) {
    if (true_class >= logits.size())
        throw ShapeError("true_class out of range");

    SoftmaxLoss r;
    double mx = logits[0];
    for (std::size_t i = 1; i < logits.size(); ++i) mx = std::max(mx, logits[i]);
    double sum = 0.0;
    Tensor e(logits.shape);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        e[i] = std::exp(logits[i] - mx);
        sum += e[i];
    }
    // loss = log(sum exp(z - mx)) - (z_t - mx), always >= 0
    r.loss = std::log(sum) - (logits[true_class] - mx);
    r.probs = Tensor(logits.shape);
    r.grad = Tensor(logits.shape);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        r.probs[i] = e[i] / sum;
        r.grad[i] = r.probs[i] - (i == true_class ? 1.0 : 0.0);
    }
    return r;
}

void sgd_update(std::span<double> params, std::span<const double> grads,
                std::span<double> velocity, double learning_rate, double momentum) {
    if (params.size() != grads.size() || params.size() != velocity.size())
        throw ShapeError("sgd_update size mismatch");
    if (!(learning_rate > 0.0))
        throw ConfigError("learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw ConfigError("momentum must be in [0,1)");
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = momentum * velocity[i] - learning_rate * grads[i];
        params[i] += velocity[i];
    }
}

void sgd_update(Tensor& params, const Tensor& grads, Tensor& velocity,
                double learning_rate, double momentum) {
    if (!params.same_shape(grads) || !params.same_shape(velocity))
        throw ShapeError("sgd_update tensor shape mismatch");
    sgd_update(std::span<double>(params.data), std::span<const double>(grads.data),
               std::span<double>(velocity.data), learning_rate, momentum);
}

} // namespace adcnn
