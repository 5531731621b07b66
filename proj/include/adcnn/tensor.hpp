#ifndef ADCNN_TENSOR_HPP
#define ADCNN_TENSOR_HPP

#include <cstddef>
#include <vector>

#include "adcnn/error.hpp"

namespace adcnn {

/// Dense n-dimensional array of doubles in row-major order.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> s)
        : shape(std::move(s)), data(product(shape), 0.0) {}

    Tensor(std::vector<std::size_t> s, std::vector<double> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (product(shape) != data.size())
            throw ShapeError("tensor data length does not match shape");
    }

    static std::size_t product(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (std::size_t e : s) n *= e;
        return n;
    }

    static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape); }

    std::size_t size() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }
    std::size_t dim(std::size_t i) const { return shape[i]; }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    double& at(std::size_t i) { return data[i]; }
    double at(std::size_t i) const { return data[i]; }

    double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

    double& at(std::size_t c, std::size_t y, std::size_t x) {
        return data[(c * shape[1] + y) * shape[2] + x];
    }
    double at(std::size_t c, std::size_t y, std::size_t x) const {
        return data[(c * shape[1] + y) * shape[2] + x];
    }

    double& at(std::size_t o, std::size_t c, std::size_t y, std::size_t x) {
        return data[((o * shape[1] + c) * shape[2] + y) * shape[3] + x];
    }
    double at(std::size_t o, std::size_t c, std::size_t y, std::size_t x) const {
        return data[((o * shape[1] + c) * shape[2] + y) * shape[3] + x];
    }
};

} // namespace adcnn

#endif // ADCNN_TENSOR_HPP
