#ifndef ADCNN_SCANNER_HPP
#define ADCNN_SCANNER_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adcnn/dataset.hpp"
#include "adcnn/image.hpp"
#include "adcnn/metrics.hpp"
#include "adcnn/network.hpp"

namespace adcnn {

/// Expert-marked lesion center.
struct AdMark {
    std::size_t row = 0;
    std::size_t col = 0;
};

struct ExamImage {
    GrayImage image;
    std::string exam_id;
    std::vector<AdMark> marks;
};

struct ScanGrid {
    std::size_t roi_size = 256;
    std::size_t stride = 64;
    double coverage_min = 0.75; // fraction of the window inside the breast mask

    void validate() const;
};

struct BinaryMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> on;

    BinaryMask() = default;
    BinaryMask(std::size_t w, std::size_t h) : width(w), height(h), on(w * h, 0) {}
    std::uint8_t at(std::size_t row, std::size_t col) const { return on[row * width + col]; }
    std::uint8_t& at(std::size_t row, std::size_t col) { return on[row * width + col]; }
};

/// Between-class-variance thresholding over a 256-bin histogram, keeping only
/// the largest 4-connected foreground component.
BinaryMask segment_breast(const GrayImage& image);

/// Window centers for all stride-aligned, fully-inside windows with mask
/// coverage >= coverage_min, in row-major order.
std::vector<std::pair<std::size_t, std::size_t>> extract_grid(const BinaryMask& mask,
                                                              const ScanGrid& grid);

/// AD iff any mark center lies inside the window, all four edges inclusive.
RoiLabel label_roi(std::size_t top, std::size_t left, std::size_t size,
                   const std::vector<AdMark>& marks);

struct RoiScore {
    std::size_t center_row = 0;
    std::size_t center_col = 0;
    double score = 0.0;
    RoiLabel label = RoiLabel::normal;
};

struct ScanResult {
    std::vector<RoiScore> rois;
    bool roc_defined = false; // false when the exam has a single class only
    RocCurve roc;
    double auc = 0.0;
    double accuracy = 0.0;
    GrayImage heatmap; // per-pixel max window score, 0 where uncovered
};

/// Segments, grids, scores and labels every window of the exam. Windows are
/// area-mean pooled down to the network input size when roi_size is an
/// integer multiple of it.
ScanResult scan_exam(const Network& net, const ExamImage& exam, const ScanGrid& grid);

/// CSV `row,col,score,label` (window centers).
void write_scan_csv(const ScanResult& result, const std::string& path);

/// Appends `exam_id,n_rois,n_positive,auc,accuracy`; auc=NA when undefined.
/// Writes the header when the file does not exist yet.
void append_scan_summary(const ScanResult& result, const std::string& exam_id,
                         const std::string& path);

} // namespace adcnn

#endif // ADCNN_SCANNER_HPP
