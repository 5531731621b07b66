#ifndef ADCNN_TESTS_ORACLES_HPP
#define ADCNN_TESTS_ORACLES_HPP

// Independent reference implementations used only by the tests. These are
// deliberately written in the most literal form possible (explicit padded
// buffers, per-window scans, threshold sweeps) so that they share no code
// path with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "adcnn/image.hpp"
#include "adcnn/layers.hpp"
#include "adcnn/metrics.hpp"
#include "adcnn/tensor.hpp"

namespace oracles {

// Quintuple-loop cross-correlation over an explicitly zero-padded copy.
inline adcnn::Tensor naive_conv2d(const adcnn::Tensor& input,
                                  const adcnn::FilterBank& filters) {
    const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
    const std::size_t F = filters.out_channels, K = filters.kernel_size;
    const std::size_t pad = (K - 1) / 2;
    const std::size_t PH = H + 2 * pad, PW = W + 2 * pad;

    std::vector<double> padded(C * PH * PW, 0.0);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t y = 0; y < H; ++y)
            for (std::size_t x = 0; x < W; ++x)
                padded[(c * PH + y + pad) * PW + (x + pad)] = input.at(c, y, x);

    adcnn::Tensor out({F, H, W});
    for (std::size_t f = 0; f < F; ++f)
        for (std::size_t y = 0; y < H; ++y)
            for (std::size_t x = 0; x < W; ++x) {
                double acc = filters.bias[f];
                for (std::size_t c = 0; c < C; ++c)
                    for (std::size_t ky = 0; ky < K; ++ky)
                        for (std::size_t kx = 0; kx < K; ++kx)
                            acc += filters.weights.at(f, c, ky, kx) *
                                   padded[(c * PH + y + ky) * PW + (x + kx)];
                out.at(f, y, x) = acc;
            }
    return out;
}

// Per-window max scan, 2x2 stride 2.
inline adcnn::Tensor naive_maxpool(const adcnn::Tensor& input) {
    const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
    adcnn::Tensor out({C, H / 2, W / 2});
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t y = 0; y < H / 2; ++y)
            for (std::size_t x = 0; x < W / 2; ++x) {
                double m = input.at(c, 2 * y, 2 * x);
                m = std::max(m, input.at(c, 2 * y, 2 * x + 1));
                m = std::max(m, input.at(c, 2 * y + 1, 2 * x));
                m = std::max(m, input.at(c, 2 * y + 1, 2 * x + 1));
                out.at(c, y, x) = m;
            }
    return out;
}

// ROC points by sweeping every distinct score as a >= threshold.
inline std::vector<adcnn::RocPoint> roc_threshold_sweep(
    const std::vector<adcnn::ScoredSample>& samples) {
    std::vector<double> thresholds;
    for (const auto& s : samples) thresholds.push_back(s.score);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    std::size_t npos = 0, nneg = 0;
    for (const auto& s : samples) (s.positive ? npos : nneg) += 1;

    std::vector<adcnn::RocPoint> points;
    points.push_back({0.0, 0.0});
    for (double t : thresholds) {
        std::size_t tp = 0, fp = 0;
        for (const auto& s : samples) {
            if (s.score >= t) (s.positive ? tp : fp) += 1;
        }
        points.push_back({static_cast<double>(fp) / static_cast<double>(nneg),
                          static_cast<double>(tp) / static_cast<double>(npos)});
    }
    return points;
}

// Mean absolute angular intensity difference over circles about a center.
// Radial structures (lines through the center region) score high; smooth
// fields score low.
inline double angular_gradient_statistic(const adcnn::GrayImage& img,
                                         double center_row, double center_col) {
    const double rmax = 0.45 * static_cast<double>(std::min(img.width, img.height));
    double total = 0.0;
    std::size_t terms = 0;
    for (double r = 2.0; r <= rmax; r += 1.0) {
        const std::size_t n = std::max<std::size_t>(8, static_cast<std::size_t>(
                                                           std::lround(2.0 * M_PI * r)));
        double prev = 0.0, first = 0.0;
        bool have_prev = false;
        for (std::size_t j = 0; j < n; ++j) {
            const double theta = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
            const long row = std::lround(center_row + r * std::sin(theta));
            const long col = std::lround(center_col + r * std::cos(theta));
            if (row < 0 || col < 0 || row >= static_cast<long>(img.height) ||
                col >= static_cast<long>(img.width))
                continue;
            const double v = img.at(static_cast<std::size_t>(row),
                                    static_cast<std::size_t>(col));
            if (have_prev) {
                total += std::abs(v - prev);
                ++terms;
            } else {
                first = v;
                have_prev = true;
            }
            prev = v;
        }
        if (have_prev) {
            total += std::abs(first - prev);
            ++terms;
        }
    }
    return terms == 0 ? 0.0 : total / static_cast<double>(terms);
}

} // namespace oracles

#endif // ADCNN_TESTS_ORACLES_HPP
