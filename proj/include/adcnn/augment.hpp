#ifndef ADCNN_AUGMENT_HPP
#define ADCNN_AUGMENT_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "adcnn/image.hpp"

namespace adcnn {

/// The nine enumerated symmetry variants. flip_hv acts identically to rot180
/// but remains a distinct plan entry. Rotations are clockwise; the composed
/// tags apply the rotation first, then the flip.
enum class GeometricTransform {
    identity,
    flip_h,
    flip_v,
    flip_hv,
    rot90,
    rot180,
    rot270,
    flip_h_rot90,
    flip_v_rot90,
};

constexpr std::array<GeometricTransform, 9> kGeometricTransforms = {
    GeometricTransform::identity,     GeometricTransform::flip_h,
    GeometricTransform::flip_v,       GeometricTransform::flip_hv,
    GeometricTransform::rot90,        GeometricTransform::rot180,
    GeometricTransform::rot270,       GeometricTransform::flip_h_rot90,
    GeometricTransform::flip_v_rot90,
};

const char* to_string(GeometricTransform t);

/// The dihedral inverse: applying it after the original restores the input.
GeometricTransform inverse(GeometricTransform t);

/// Zero-mean Gaussian noise level in squared intensity units on [0,1].
struct NoiseSpec {
    double variance = 0.0;
};

constexpr std::array<double, 4> kNoiseVariances = {0.0, 0.02, 0.04, 0.06};

struct PlanEntry {
    GeometricTransform transform;
    NoiseSpec noise;
};

/// Ordered 36-entry product of the 9 geometric variants (outer) and the
/// 4 noise levels (inner). Entry 0 is (identity, no noise).
struct AugmentationPlan {
    std::vector<PlanEntry> entries;

    std::size_t size() const { return entries.size(); }
    const PlanEntry& operator[](std::size_t i) const { return entries[i]; }
};

AugmentationPlan enumerate_plan();

/// Pixel permutation on a square image; throws ShapeError otherwise.
GrayImage apply_geometric(const GrayImage& image, GeometricTransform t);

/// Per-sample noise seed: (run seed, roi id, plan index) via the documented
/// splitmix64 chain in rng.hpp.
std::uint64_t noise_seed(std::uint64_t run_seed, std::uint64_t roi_id,
                         std::uint64_t plan_index);

/// Adds i.i.d. normal(0, variance) noise (mt19937_64 + Box-Muller), clamped
/// to [0,1]. Variance 0 returns the input bit-identically.
GrayImage add_gaussian_noise(const GrayImage& image, NoiseSpec spec,
                             std::uint64_t seed);

/// Geometry first, then noise keyed by (run_seed, roi_id, plan index).
GrayImage apply_plan_entry(const GrayImage& roi, const PlanEntry& entry,
                           std::uint64_t run_seed, std::uint64_t roi_id,
                           std::uint64_t plan_index);

/// All 36 variants of one ROI, in plan order.
std::vector<GrayImage> augment_roi(const GrayImage& roi, const AugmentationPlan& plan,
                                   std::uint64_t run_seed, std::uint64_t roi_id);

/// (x - mean) / max(population std, epsilon).
GrayImage zscore_standardize(const GrayImage& image, double epsilon = 1e-8);

} // namespace adcnn

#endif // ADCNN_AUGMENT_HPP
