#include "adcnn/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "adcnn/error.hpp"
#include "adcnn/rng.hpp"

namespace adcnn {

void NetworkConfig::validate() const {
    if (kernel_size % 2 == 0 || kernel_size == 0)
        throw ConfigError("network.kernel_size must be odd");
    if (base_filters == 0) throw ConfigError("network.base_filters must be >= 1");
    if (classes < 2) throw ConfigError("network.classes must be >= 2");
    if (target_map == 0) throw ConfigError("network.target_map must be >= 1");
    stages(); // throws if input_size is unreachable
}

std::size_t NetworkConfig::stages() const {
    std::size_t size = input_size;
    std::size_t k = 0;
    while (size > target_map && size % 2 == 0) {
        size /= 2;
        ++k;
    }
    if (size != target_map || k == 0)
        throw ConfigError("network.input_size " + std::to_string(input_size) +
                          " cannot be halved down to a " + std::to_string(target_map) +
                          "x" + std::to_string(target_map) + " map");
    return k;
}

std::size_t NetworkConfig::filters_at(std::size_t stage) const {
    return base_filters << stage;
}

std::size_t NetworkConfig::dense_inputs() const {
    return target_map * target_map * filters_at(stages() - 1);
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& s : stages) n += s.weights.size() + s.bias.size();
    return n + dense_weights.size() + dense_bias.size();
}

Network build_network(const NetworkConfig& config, std::uint64_t seed) {
    config.validate();
    const std::size_t k = config.stages();

    Network net;
    net.config = config;
    Rng rng(substream(seed, Stream::init));

    std::size_t in_channels = 1;
    for (std::size_t i = 0; i < k; ++i) {
        FilterBank bank(config.kernel_size, in_channels, config.filters_at(i));
        const double stddev =
            std::sqrt(2.0 / static_cast<double>(in_channels * config.kernel_size *
                                                config.kernel_size));
        for (auto& w : bank.weights.data) w = stddev * rng.normal();
        net.stages.push_back(std::move(bank));
        in_channels = config.filters_at(i);
    }

    const std::size_t n_in = config.dense_inputs();
    net.dense_weights = Tensor({config.classes, n_in});
    net.dense_bias = Tensor({config.classes});
    const double stddev = std::sqrt(2.0 / static_cast<double>(n_in));
    for (auto& w : net.dense_weights.data) w = stddev * rng.normal();
    return net;
}

std::vector<double> flatten_parameters(const Network& net) {
    std::vector<double> flat;
    flat.reserve(net.parameter_count());
    for (const auto& s : net.stages) {
        flat.insert(flat.end(), s.weights.data.begin(), s.weights.data.end());
        flat.insert(flat.end(), s.bias.data.begin(), s.bias.data.end());
    }
    flat.insert(flat.end(), net.dense_weights.data.begin(), net.dense_weights.data.end());
    flat.insert(flat.end(), net.dense_bias.data.begin(), net.dense_bias.data.end());
    return flat;
}

void set_parameters(Network& net, std::span<const double> flat) {
    if (flat.size() != net.parameter_count())
        throw ShapeError("parameter vector has wrong length");
    std::size_t at = 0;
    auto take = [&](Tensor& t) {
        std::copy(flat.begin() + at, flat.begin() + at + t.size(), t.data.begin());
        at += t.size();
    };
    for (auto& s : net.stages) {
        take(s.weights);
        take(s.bias);
    }
    take(net.dense_weights);
    take(net.dense_bias);
}

Tensor forward_logits(const Network& net, const Tensor& input, ForwardCache* cache) {
    if (input.rank() != 3 || input.dim(0) != 1 ||
        input.dim(1) != net.config.input_size || input.dim(2) != net.config.input_size)
        throw ShapeError("network input must be [1," +
                         std::to_string(net.config.input_size) + "," +
                         std::to_string(net.config.input_size) + "]");

    Tensor current = input;
    if (cache) {
        cache->input = input;
        cache->stages.clear();
        cache->stages.resize(net.stages.size());
    }
    for (std::size_t i = 0; i < net.stages.size(); ++i) {
        Tensor conv_out = conv2d_forward(current, net.stages[i]);
        Tensor relu_out = relu(conv_out);
        PoolResult pooled = maxpool_forward(relu_out);
        current = pooled.output;
        if (cache) {
            cache->stages[i].conv_out = std::move(conv_out);
            cache->stages[i].relu_out = std::move(relu_out);
            cache->stages[i].pool = std::move(pooled);
            // current aliases the cached pool output's data copy
            current = cache->stages[i].pool.output;
        }
    }

    Tensor flat({current.size()}, current.data);
    Tensor logits = dense_forward(flat, net.dense_weights, net.dense_bias);
    if (cache) {
        cache->flat = flat;
        cache->logits = logits;
    }
    return logits;
}

Tensor forward(const Network& net, const std::vector<Tensor>& batch) {
    Tensor out({batch.size(), net.config.classes});
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Tensor probs = softmax(forward_logits(net, batch[i]));
        std::copy(probs.data.begin(), probs.data.end(),
                  out.data.begin() + i * net.config.classes);
    }
    return out;
}

double predict_score(const Network& net, const Tensor& standardized_input) {
    return softmax(forward_logits(net, standardized_input))[1];
}

namespace {

// Backpropagates one sample's loss gradient and adds the parameter gradient
// into `flat_grad` (checkpoint parameter order).
void accumulate_sample_gradient(const Network& net, const ForwardCache& cache,
                                const Tensor& dlogits, std::vector<double>& flat_grad) {
    DenseGradients dg = dense_backward(cache.flat, net.dense_weights, dlogits);

    // Walk the stages backwards, tracking the gradient w.r.t. each stage input.
    const std::size_t n_stages = net.stages.size();
    std::vector<Tensor> stage_wgrad(n_stages);
    std::vector<Tensor> stage_bgrad(n_stages);

    Tensor upstream(cache.stages.back().pool.output.shape, dg.input.data);
    for (std::size_t i = n_stages; i-- > 0;) {
        const StageCache& sc = cache.stages[i];
        Tensor relu_up = maxpool_backward(sc.pool.argmax, upstream);
        Tensor conv_up = relu_backward(sc.conv_out, relu_up);
        const Tensor& stage_input = i == 0 ? cache.input : cache.stages[i - 1].pool.output;
        ConvGradients cg = conv2d_backward(stage_input, net.stages[i], conv_up);
        stage_wgrad[i] = std::move(cg.weights);
        stage_bgrad[i] = std::move(cg.bias);
        upstream = std::move(cg.input);
    }

    std::size_t at = 0;
    auto add = [&](const Tensor& t) {
        for (std::size_t i = 0; i < t.size(); ++i) flat_grad[at + i] += t[i];
        at += t.size();
    };
    for (std::size_t i = 0; i < n_stages; ++i) {
        add(stage_wgrad[i]);
        add(stage_bgrad[i]);
    }
    add(dg.weights);
    add(dg.bias);
}

} // namespace

LossAndGradients network_loss_and_gradients(const Network& net,
                                            const std::vector<Tensor>& inputs,
                                            const std::vector<std::size_t>& labels) {
    if (inputs.empty() || inputs.size() != labels.size())
        throw DataError("loss needs a non-empty batch with matching labels");

    LossAndGradients out;
    out.gradients.assign(net.parameter_count(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(inputs.size());

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        ForwardCache cache;
        const Tensor logits = forward_logits(net, inputs[i], &cache);
        SoftmaxLoss sl = softmax_cross_entropy(logits, labels[i]);
        out.loss += sl.loss * inv_n;
        Tensor dlogits(sl.grad.shape);
        for (std::size_t j = 0; j < dlogits.size(); ++j)
            dlogits[j] = sl.grad[j] * inv_n;
        accumulate_sample_gradient(net, cache, dlogits, out.gradients);
    }
    return out;
}

double network_loss(const Network& net, const std::vector<Tensor>& inputs,
                    const std::vector<std::size_t>& labels) {
    if (inputs.empty() || inputs.size() != labels.size())
        throw DataError("loss needs a non-empty batch with matching labels");
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Tensor logits = forward_logits(net, inputs[i]);
        loss += softmax_cross_entropy(logits, labels[i]).loss * inv_n;
    }
    return loss;
}

double finite_difference_check(std::span<double> params,
                               std::span<const double> analytic,
                               const std::function<double()>& loss, double epsilon,
                               std::size_t max_coords) {
    if (params.size() != analytic.size())
        throw ShapeError("finite_difference_check size mismatch");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");

    const std::size_t n = params.size();
    std::vector<std::size_t> coords;
    if (n <= max_coords) {
        coords.resize(n);
        for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
        // Deterministic spread over the whole parameter vector.
        coords.resize(max_coords);
        for (std::size_t j = 0; j < max_coords; ++j) coords[j] = (j * n) / max_coords;
    }

    double max_err = 0.0;
    for (std::size_t i : coords) {
        const double saved = params[i];
        params[i] = saved + epsilon;
        const double up = loss();
        params[i] = saved - epsilon;
        const double down = loss();
        params[i] = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double a = analytic[i];
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
        max_err = std::max(max_err, std::abs(a - numeric) / denom);
    }
    return max_err;
}

double gradient_check(const Network& net, const std::vector<Tensor>& inputs,
                      const std::vector<std::size_t>& labels, double epsilon,
                      std::size_t max_coords) {
    Network probe = net;
    std::vector<double> flat = flatten_parameters(probe);
    const LossAndGradients base = network_loss_and_gradients(probe, inputs, labels);

    auto loss = [&]() {
        set_parameters(probe, flat);
        return network_loss(probe, inputs, labels);
    };
    return finite_difference_check(std::span<double>(flat),
                                   std::span<const double>(base.gradients), loss,
                                   epsilon, max_coords);
}

void TrainingConfig::validate() const {
    if (batch_size == 0) throw ConfigError("train.batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw ConfigError("train.momentum must be in [0,1)");
    if (max_epochs == 0) throw ConfigError("train.max_epochs must be >= 1");
    if (patience == 0) throw ConfigError("train.patience must be >= 1");
}

namespace {

std::pair<double, double> validation_stats(const Network& net,
                                           const SampleSource& val_set) {
    double cost = 0.0;
    std::size_t correct = 0;
    const std::size_t n = val_set.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Tensor input = val_set.input(i);
        const std::size_t label = val_set.label(i);
        const Tensor logits = forward_logits(net, input);
        SoftmaxLoss sl = softmax_cross_entropy(logits, label);
        cost += sl.loss;
        const bool predicted_ad = sl.probs[1] >= 0.5;
        if (predicted_ad == (label == 1)) ++correct;
    }
    return {cost / static_cast<double>(n),
            static_cast<double>(correct) / static_cast<double>(n)};
}

} // namespace

TrainingHistory train(Network& net, const SampleSource& train_set,
                      const SampleSource& val_set, const TrainingConfig& cfg) {
    cfg.validate();
    if (train_set.size() == 0) throw DataError("training split is empty");
    if (val_set.size() == 0) throw DataError("validation split is empty");

    std::vector<double> params = flatten_parameters(net);
    std::vector<double> velocity(params.size(), 0.0);

    TrainingHistory history;
    std::vector<double> best_params = params;
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t stale_epochs = 0;

    const std::size_t n = train_set.size();
    std::vector<std::size_t> order(n);

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        Rng rng(substream(cfg.seed, Stream::shuffle, epoch));
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_below(i)]);

        double epoch_cost = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            std::vector<Tensor> inputs;
            std::vector<std::size_t> labels;
            inputs.reserve(stop - start);
            labels.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                inputs.push_back(train_set.input(order[i]));
                labels.push_back(train_set.label(order[i]));
            }

            LossAndGradients lg = network_loss_and_gradients(net, inputs, labels);
            if (!std::isfinite(lg.loss))
                throw DataError("training diverged at epoch " + std::to_string(epoch + 1) +
                                ", batch " + std::to_string(batch_index + 1));
            epoch_cost += lg.loss * static_cast<double>(stop - start);

            sgd_update(std::span<double>(params), std::span<const double>(lg.gradients),
                       std::span<double>(velocity), cfg.learning_rate, cfg.momentum);
            set_parameters(net, params);
        }

        EpochStats stats;
        stats.train_cost = epoch_cost / static_cast<double>(n);
        const auto [val_cost, val_acc] = validation_stats(net, val_set);
        stats.val_cost = val_cost;
        stats.val_accuracy = val_acc;
        history.epochs.push_back(stats);

        if (val_cost < best_cost) {
            best_cost = val_cost;
            best_params = params;
            history.best_epoch = epoch;
            stale_epochs = 0;
        } else {
            ++stale_epochs;
            if (stale_epochs >= cfg.patience) break;
        }
    }

    set_parameters(net, best_params);
    return history;
}

void write_history(const TrainingHistory& history, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out << "epoch,train_cost,val_cost,val_acc\n";
    char buf[128];
    for (std::size_t i = 0; i < history.epochs.size(); ++i) {
        const EpochStats& e = history.epochs[i];
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g\n", i + 1, e.train_cost,
                      e.val_cost, e.val_accuracy);
        out << buf;
    }
    if (!out) throw FormatError(path + ": write failed");
}

namespace {

constexpr char kMagic[8] = {'A', 'D', 'C', 'N', 'N', '\0', 'v', '1'};

std::uint64_t to_le_bits(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r = (r << 8) | ((bits >> (8 * i)) & 0xff);
        bits = r;
    }
    return bits;
}

double from_le_bits(std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r = (r << 8) | ((bits >> (8 * i)) & 0xff);
        bits = r;
    }
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

} // namespace

void save_checkpoint(const Network& net, const std::string& path, std::size_t epoch,
                     double val_cost) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(path + ": cannot open for writing");

    out.write(kMagic, sizeof(kMagic));
    char header[256];
    std::snprintf(header, sizeof(header),
                  "input_size=%zu kernel_size=%zu base_filters=%zu target_map=%zu "
                  "classes=%zu epoch=%zu val_cost=%.17g\n",
                  net.config.input_size, net.config.kernel_size, net.config.base_filters,
                  net.config.target_map, net.config.classes, epoch, val_cost);
    out << header;

    const std::vector<double> flat = flatten_parameters(net);
    std::vector<unsigned char> payload(flat.size() * 8);
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const std::uint64_t bits = to_le_bits(flat[i]);
        for (int b = 0; b < 8; ++b)
            payload[i * 8 + b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw FormatError(path + ": write failed");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open for reading");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < sizeof(kMagic) || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw FormatError(path + ": bad checkpoint magic/version");

    const std::size_t header_end = buf.find('\n', sizeof(kMagic));
    if (header_end == std::string::npos || header_end > 4096)
        throw FormatError(path + ": missing checkpoint header line");
    const std::string header = buf.substr(sizeof(kMagic), header_end - sizeof(kMagic));

    LoadedCheckpoint ck;
    NetworkConfig cfg;
    std::istringstream hs(header);
    std::string token;
    bool have[7] = {};
    while (hs >> token) {
        const std::size_t eq = token.find('=');
        if (eq == std::string::npos)
            throw FormatError(path + ": malformed header token '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        try {
            if (key == "input_size") { cfg.input_size = std::stoul(value); have[0] = true; }
            else if (key == "kernel_size") { cfg.kernel_size = std::stoul(value); have[1] = true; }
            else if (key == "base_filters") { cfg.base_filters = std::stoul(value); have[2] = true; }
            else if (key == "target_map") { cfg.target_map = std::stoul(value); have[3] = true; }
            else if (key == "classes") { cfg.classes = std::stoul(value); have[4] = true; }
            else if (key == "epoch") { ck.epoch = std::stoul(value); have[5] = true; }
            else if (key == "val_cost") { ck.val_cost = std::stod(value); have[6] = true; }
            else throw FormatError(path + ": unknown header key '" + key + "'");
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception&) {
            throw FormatError(path + ": bad header value for '" + key + "'");
        }
    }
    for (bool h : have)
        if (!h) throw FormatError(path + ": incomplete checkpoint header");

    cfg.validate();

    // Assemble an uninitialized network of the right geometry.
    Network net;
    net.config = cfg;
    std::size_t in_channels = 1;
    for (std::size_t i = 0; i < cfg.stages(); ++i) {
        net.stages.emplace_back(cfg.kernel_size, in_channels, cfg.filters_at(i));
        in_channels = cfg.filters_at(i);
    }
    net.dense_weights = Tensor({cfg.classes, cfg.dense_inputs()});
    net.dense_bias = Tensor({cfg.classes});

    const std::size_t n_params = net.parameter_count();
    const std::size_t payload_at = header_end + 1;
    const std::size_t payload_bytes = buf.size() - payload_at;
    if (payload_bytes != n_params * 8)
        throw FormatError(path + ": parameter payload is " + std::to_string(payload_bytes) +
                          " bytes, expected " + std::to_string(n_params * 8));

    std::vector<double> flat(n_params);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data()) + payload_at;
    for (std::size_t i = 0; i < n_params; ++i) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[i * 8 + b];
        flat[i] = from_le_bits(bits);
    }
    set_parameters(net, flat);
    ck.network = std::move(net);
    return ck;
}

} // namespace adcnn
