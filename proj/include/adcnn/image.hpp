#ifndef ADCNN_IMAGE_HPP
#define ADCNN_IMAGE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "adcnn/tensor.hpp"

namespace adcnn {

/// Grayscale image with intensities in [0,1], row-major.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(std::size_t w, std::size_t h)
        : width(w), height(h), pixels(w * h, 0.0) {}

    std::size_t size() const { return pixels.size(); }

    double& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
    double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

/// Binary portable graymap (magic P5), maxval 255 or 65535. 16-bit samples
/// are big-endian per the format. Intensities map linearly to [0,1].
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& image, const std::string& path,
               unsigned maxval = 65535);

/// [1, H, W] tensor view of the image.
Tensor to_tensor(const GrayImage& image);
GrayImage from_tensor(const Tensor& t);

/// Area-mean pooling by an integer factor; both extents must divide evenly.
GrayImage downscale_mean(const GrayImage& image, std::size_t factor);

} // namespace adcnn

#endif // ADCNN_IMAGE_HPP
