#ifndef ADCNN_LAYERS_HPP
#define ADCNN_LAYERS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "adcnn/tensor.hpp"

namespace adcnn {

/// Weights of one convolution layer: [out, in, k, k] plus per-output bias.
struct FilterBank {
    std::size_t kernel_size = 0;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    Tensor weights; // [out, in, k, k]
    Tensor bias;    // [out]

    FilterBank() = default;
    FilterBank(std::size_t kernel, std::size_t in, std::size_t out);
};

struct ConvGradients {
    Tensor weights;
    Tensor bias;
    Tensor input;
};

/// Cross-correlation with zero same-padding of (k-1)/2; output [F, H, W].
Tensor conv2d_forward(const Tensor& input, const FilterBank& filters);
ConvGradients conv2d_backward(const Tensor& input, const FilterBank& filters,
                              const Tensor& upstream);

/// Winning input positions of a 2x2/stride-2 max pool, one flat input index
/// per output cell. Ties resolve to the first position in row-major order.
struct ArgmaxMap {
    std::size_t channels = 0;
    std::size_t in_h = 0, in_w = 0;
    std::size_t out_h = 0, out_w = 0;
    std::vector<std::size_t> index;
};

struct PoolResult {
    Tensor output;
    ArgmaxMap argmax;
};

PoolResult maxpool_forward(const Tensor& input);
Tensor maxpool_backward(const ArgmaxMap& argmax, const Tensor& upstream);

/// y = W x + b with W of shape [m, n].
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

struct DenseGradients {
    Tensor weights;
    Tensor bias;
    Tensor input;
};

DenseGradients dense_backward(const Tensor& input, const Tensor& weights,
                              const Tensor& upstream);

Tensor relu(const Tensor& input);
/// Passes upstream where input > 0; zero elsewhere (including at 0 exactly).
Tensor relu_backward(const Tensor& input, const Tensor& upstream);

Tensor softmax(const Tensor& logits);

struct SoftmaxLoss {
    double loss = 0.0;
    Tensor grad;  // d loss / d logits
    Tensor probs;
};

/// loss = -log softmax(logits)[true_class], max-subtraction stabilized.
SoftmaxLoss softmax_cross_entropy(const Tensor& logits, std::size_t true_class);

/// v <- momentum*v - lr*g ; p <- p + v
void sgd_update(std::span<double> params, std::span<const double> grads,
                std::span<double> velocity, double learning_rate, double momentum);
void sgd_update(Tensor& params, const Tensor& grads, Tensor& velocity,
                double learning_rate, double momentum);

} // namespace adcnn

#endif // ADCNN_LAYERS_HPP
