#ifndef ADCNN_DATASET_HPP
#define ADCNN_DATASET_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "adcnn/augment.hpp"
#include "adcnn/image.hpp"
#include "adcnn/samples.hpp"

namespace adcnn {

enum class RoiLabel { normal = 0, ad = 1 };

const char* to_string(RoiLabel label);
RoiLabel roi_label_from_string(const std::string& s);

enum class Split { unsplit, train, val, test };

const char* to_string(Split split);
Split split_from_string(const std::string& s);

/// A labeled region-of-interest reference into a source image.
struct RoiRecord {
    std::string image_id;
    std::size_t center_row = 0;
    std::size_t center_col = 0;
    std::size_t size = 256;
    RoiLabel label = RoiLabel::normal;
};

struct SplitRatios {
    double train = 0.70;
    double validation = 0.15;
    double test = 0.15;

    void validate() const; // positive, sum to 1 within 1e-12
};

/// One dataset sample: a source file plus the augmentation variant to apply.
/// plan_index 0 is the original (identity transform, no noise).
struct ManifestEntry {
    std::string path;
    RoiLabel label = RoiLabel::normal;
    Split split = Split::unsplit;
    std::uint64_t roi_id = 0;
    std::size_t plan_index = 0;
};

using Manifest = std::vector<ManifestEntry>;

/// CSV with header `path,label,split,roi_id,plan_index`.
void write_manifest(const Manifest& manifest, const std::string& path);
Manifest read_manifest(const std::string& path);

/// Top-left corner of the size x size crop window centered at (row, col),
/// shifted the minimal distance to fit inside height x width.
std::pair<std::size_t, std::size_t> crop_origin(std::size_t height, std::size_t width,
                                                std::size_t center_row,
                                                std::size_t center_col,
                                                std::size_t size);

GrayImage crop_roi(const GrayImage& image, std::size_t center_row,
                   std::size_t center_col, std::size_t size);

/// Uniformly draws window centers until one neither overlaps the AD window
/// nor lies on empty background (mean intensity > 0.05). Gives up after
/// 10000 draws with a DataError.
std::pair<std::size_t, std::size_t> sample_normal_roi(const GrayImage& image,
                                                      std::size_t ad_row,
                                                      std::size_t ad_col,
                                                      std::size_t size,
                                                      std::uint64_t seed);

enum class SplitMode { roi_level, paper_faithful };

/// Assigns a split to every entry, shuffling per class by the seed and
/// rounding with largest remainder. roi_level keeps all variants of one ROI
/// in the same split; paper_faithful splits the augmented pool directly.
void stratified_split(Manifest& manifest, const SplitRatios& ratios,
                      std::uint64_t seed, SplitMode mode);

/// Synthetic stand-in for the clinical data: a smoothed random field, plus a
/// radial spiculation pattern for the AD class.
std::vector<GrayImage> synth_generate(std::size_t count, RoiLabel label,
                                      std::size_t image_size, std::uint64_t seed);

/// Same generator, exposing the spiculation center of each AD image.
struct SynthRoi {
    GrayImage image;
    std::size_t center_row = 0;
    std::size_t center_col = 0;
};

std::vector<SynthRoi> synth_generate_detailed(std::size_t count, RoiLabel label,
                                              std::size_t image_size,
                                              std::uint64_t seed);

/// Synthetic whole exam: dark background, a textured breast-shaped region,
/// and n_distortions implanted spiculation patterns. Built at quarter
/// resolution and upsampled 4x so that 4x area-pooled scan windows match the
/// ROI texture statistics. Extents must be multiples of 4.
struct ExamSynthesis {
    GrayImage image;
    std::vector<std::pair<std::size_t, std::size_t>> ad_centers; // (row, col)
};

ExamSynthesis synth_exam(std::size_t height, std::size_t width,
                         std::size_t n_distortions, std::uint64_t seed);

/// Serves manifest rows as standardized network inputs, applying the plan
/// entry (geometry, then seeded noise, then z-score) on the fly. Source
/// images are loaded once up front.
class RoiSampleSource : public SampleSource {
public:
    RoiSampleSource(Manifest manifest, const AugmentationPlan& plan,
                    std::uint64_t run_seed);

    std::size_t size() const override { return manifest_.size(); }
    Tensor input(std::size_t i) const override;
    std::size_t label(std::size_t i) const override {
        return static_cast<std::size_t>(manifest_[i].label);
    }
    const ManifestEntry& entry(std::size_t i) const { return manifest_[i]; }

private:
    Manifest manifest_;
    AugmentationPlan plan_;
    std::uint64_t run_seed_;
    std::map<std::string, GrayImage> images_;
};

/// The subset of a manifest assigned to one split.
Manifest filter_split(const Manifest& manifest, Split split);

} // namespace adcnn

#endif // ADCNN_DATASET_HPP
