#ifndef ADCNN_NETWORK_HPP
#define ADCNN_NETWORK_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "adcnn/layers.hpp"
#include "adcnn/samples.hpp"
#include "adcnn/tensor.hpp"

namespace adcnn {

/// Architecture hyperparameters. The stage count is derived: the input is
/// halved by each pool until the feature map reaches target_map, and the
/// filter count doubles per stage starting at base_filters.
struct NetworkConfig {
    std::size_t input_size = 256;
    std::size_t kernel_size = 5;
    std::size_t base_filters = 8;
    std::size_t target_map = 4;
    std::size_t classes = 2;

    void validate() const;
    std::size_t stages() const;
    std::size_t filters_at(std::size_t stage) const;
    std::size_t dense_inputs() const;
};

/// Stacked [conv -> ReLU -> 2x2 maxpool] stages plus one dense classifier.
struct Network {
    NetworkConfig config;
    std::vector<FilterBank> stages;
    Tensor dense_weights; // [classes, dense_inputs]
    Tensor dense_bias;    // [classes]

    std::size_t parameter_count() const;
};

/// He-normal initialized network (biases zero), seeded.
Network build_network(const NetworkConfig& config, std::uint64_t seed);

/// Parameters in checkpoint order: per stage conv weights then bias, then
/// dense weights, then dense bias.
std::vector<double> flatten_parameters(const Network& net);
void set_parameters(Network& net, std::span<const double> flat);

struct StageCache {
    Tensor conv_out;
    Tensor relu_out;
    PoolResult pool;
};

struct ForwardCache {
    Tensor input;
    std::vector<StageCache> stages;
    Tensor flat;
    Tensor logits;
};

/// Logits for one standardized [1, H, W] input.
Tensor forward_logits(const Network& net, const Tensor& input,
                      ForwardCache* cache = nullptr);

/// Class probabilities [n, classes]; rows sum to 1.
Tensor forward(const Network& net, const std::vector<Tensor>& batch);

/// Probability of the AD class (index 1).
double predict_score(const Network& net, const Tensor& standardized_input);

struct LossAndGradients {
    double loss = 0.0;
    std::vector<double> gradients; // flat, parameter order
};

/// Mean cross-entropy over the batch and its gradient, accumulated in fixed
/// sample order.
LossAndGradients network_loss_and_gradients(const Network& net,
                                            const std::vector<Tensor>& inputs,
                                            const std::vector<std::size_t>& labels);

double network_loss(const Network& net, const std::vector<Tensor>& inputs,
                    const std::vector<std::size_t>& labels);

/// Central-difference check of `analytic` against `loss` around the current
/// `params`, over all coordinates or a deterministic spread of max_coords.
/// Returns max |a-n| / max(|a|,|n|,1e-12). Restores params before returning.
double finite_difference_check(std::span<double> params,
                               std::span<const double> analytic,
                               const std::function<double()>& loss, double epsilon,
                               std::size_t max_coords);

/// Full-network gradient check on a batch; epsilon 1e-5, >= 500 coordinates.
double gradient_check(const Network& net, const std::vector<Tensor>& inputs,
                      const std::vector<std::size_t>& labels, double epsilon = 1e-5,
                      std::size_t max_coords = 600);

struct TrainingConfig {
    std::size_t batch_size = 60;
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::size_t max_epochs = 30;
    std::size_t patience = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochStats {
    double train_cost = 0.0;
    double val_cost = 0.0;
    double val_accuracy = 0.0;
};

struct TrainingHistory {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0; // 0-based index into epochs
};

/// Mini-batch SGD with momentum and validation-cost early stopping. On
/// return the network holds the best-validation-epoch parameters.
TrainingHistory train(Network& net, const SampleSource& train_set,
                      const SampleSource& val_set, const TrainingConfig& cfg);

/// CSV `epoch,train_cost,val_cost,val_acc` (epoch is 1-based).
void write_history(const TrainingHistory& history, const std::string& path);

/// Bit-exact checkpoint: magic "ADCNN\0v1", one UTF-8 header line, then
/// parameters as little-endian 64-bit floats in the declared order.
void save_checkpoint(const Network& net, const std::string& path,
                     std::size_t epoch = 0, double val_cost = 0.0);

struct LoadedCheckpoint {
    Network network;
    std::size_t epoch = 0;
    double val_cost = 0.0;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

} // namespace adcnn

#endif // ADCNN_NETWORK_HPP
