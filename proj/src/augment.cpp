#include "adcnn/augment.hpp"

#include <cmath>

#include "adcnn/error.hpp"
#include "adcnn/rng.hpp"

namespace adcnn {

const char* to_string(GeometricTransform t) {
    switch (t) {
        case GeometricTransform::identity: return "identity";
        case GeometricTransform::flip_h: return "flipH";
        case GeometricTransform::flip_v: return "flipV";
        case GeometricTransform::flip_hv: return "flipHV";
        case GeometricTransform::rot90: return "rot90";
        case GeometricTransform::rot180: return "rot180";
        case GeometricTransform::rot270: return "rot270";
        case GeometricTransform::flip_h_rot90: return "flipH.rot90";
        case GeometricTransform::flip_v_rot90: return "flipV.rot90";
    }
    return "?";
}

GeometricTransform inverse(GeometricTransform t) {
    switch (t) {
        case GeometricTransform::rot90: return GeometricTransform::rot270;
        case GeometricTransform::rot270: return GeometricTransform::rot90;
        // The remaining elements are involutions.
        default: return t;
    }
}

AugmentationPlan enumerate_plan() {
    AugmentationPlan plan;
    plan.entries.reserve(kGeometricTransforms.size() * kNoiseVariances.size());
    for (GeometricTransform t : kGeometricTransforms)
        for (double v : kNoiseVariances)
            plan.entries.push_back({t, NoiseSpec{v}});
    return plan;
}

GrayImage apply_geometric(const GrayImage& image, GeometricTransform t) {
    if (image.width != image.height)
        throw ShapeError("geometric transforms require a square image, got " +
                         std::to_string(image.width) + "x" + std::to_string(image.height));
    const std::size_t n = image.width;
    if (t == GeometricTransform::identity) return image;

    GrayImage out(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            double v;
            switch (t) {
                case GeometricTransform::flip_h: v = image.at(r, n - 1 - c); break;
                case GeometricTransform::flip_v: v = image.at(n - 1 - r, c); break;
                case GeometricTransform::flip_hv:
                case GeometricTransform::rot180: v = image.at(n - 1 - r, n - 1 - c); break;
                // clockwise: out(r,c) = in(n-1-c, r)
                case GeometricTransform::rot90: v = image.at(n - 1 - c, r); break;
                case GeometricTransform::rot270: v = image.at(c, n - 1 - r); break;
                // rot90 then flipH: out(r,c) = rot90(r, n-1-c) = in(c, r)
                case GeometricTransform::flip_h_rot90: v = image.at(c, r); break;
                // rot90 then flipV: out(r,c) = rot90(n-1-r, c) = in(n-1-c, n-1-r)
                case GeometricTransform::flip_v_rot90:
                    v = image.at(n - 1 - c, n - 1 - r);
                    break;
                default: v = image.at(r, c); break;
            }
            out.at(r, c) = v;
        }
    }
    return out;
}

std::uint64_t noise_seed(std::uint64_t run_seed, std::uint64_t roi_id,
                         std::uint64_t plan_index) {
    return substream(run_seed, Stream::noise, roi_id, plan_index);
}

GrayImage add_gaussian_noise(const GrayImage& image, NoiseSpec spec, std::uint64_t seed) {
    if (spec.variance == 0.0) return image;
    if (spec.variance < 0.0) throw ConfigError("noise variance must be non-negative");

    const double sigma = std::sqrt(spec.variance);
    Rng rng(seed);
    GrayImage out(image.width, image.height);
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double v = image.pixels[i] + sigma * rng.normal();
        out.pixels[i] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
    return out;
}

GrayImage apply_plan_entry(const GrayImage& roi, const PlanEntry& entry,
                           std::uint64_t run_seed, std::uint64_t roi_id,
                           std::uint64_t plan_index) {
    GrayImage g = apply_geometric(roi, entry.transform);
    return add_gaussian_noise(g, entry.noise, noise_seed(run_seed, roi_id, plan_index));
}

std::vector<GrayImage> augment_roi(const GrayImage& roi, const AugmentationPlan& plan,
                                   std::uint64_t run_seed, std::uint64_t roi_id) {
    std::vector<GrayImage> out;
    out.reserve(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i)
        out.push_back(apply_plan_entry(roi, plan[i], run_seed, roi_id, i));
    return out;
}

GrayImage zscore_standardize(const GrayImage& image, double epsilon) {
    if (image.size() == 0) throw ShapeError("zscore on empty image");

    const double n = static_cast<double>(image.size());
    double sum = 0.0;
    for (double v : image.pixels) sum += v;
    const double mean = sum / n;

    double ss = 0.0;
    for (double v : image.pixels) ss += (v - mean) * (v - mean);
    const double stddev = std::sqrt(ss / n); // population std

    GrayImage out(image.width, image.height);
    if (stddev <= epsilon) return out; // (near-)constant image maps to zeros
    for (std::size_t i = 0; i < image.size(); ++i)
        out.pixels[i] = (image.pixels[i] - mean) / stddev;
    return out;
}

} // namespace adcnn
