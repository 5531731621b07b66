#ifndef ADCNN_SAMPLES_HPP
#define ADCNN_SAMPLES_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "adcnn/tensor.hpp"

namespace adcnn {

/// A labeled set of network-ready inputs. Implementations must be pure:
/// input(i) returns bit-identical tensors on every call.
class SampleSource {
public:
    virtual ~SampleSource() = default;
    virtual std::size_t size() const = 0;
    /// Standardized [1, H, W] input for sample i.
    virtual Tensor input(std::size_t i) const = 0;
    /// Class index for sample i (1 = AD, 0 = normal).
    virtual std::size_t label(std::size_t i) const = 0;
};

class MaterializedSamples : public SampleSource {
public:
    MaterializedSamples() = default;

    void add(Tensor input, std::size_t label) {
        inputs_.push_back(std::move(input));
        labels_.push_back(label);
    }

    std::size_t size() const override { return inputs_.size(); }
    Tensor input(std::size_t i) const override { return inputs_[i]; }
    std::size_t label(std::size_t i) const override { return labels_[i]; }

private:
    std::vector<Tensor> inputs_;
    std::vector<std::size_t> labels_;
};

} // namespace adcnn

#endif // ADCNN_SAMPLES_HPP
