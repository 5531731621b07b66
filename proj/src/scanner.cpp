#include "adcnn/scanner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "adcnn/augment.hpp"
#include "adcnn/error.hpp"

namespace adcnn {

void ScanGrid::validate() const {
    if (roi_size == 0) throw ConfigError("scan.roi_size must be >= 1");
    if (stride == 0 || stride > roi_size)
        throw ConfigError("scan.stride must be in [1, roi_size]");
    if (!(coverage_min > 0.0) || coverage_min > 1.0)
        throw ConfigError("scan.coverage_min must be in (0, 1]");
}

BinaryMask segment_breast(const GrayImage& image) {
    if (image.size() == 0) throw ShapeError("segment_breast on empty image");

    // 256-bin histogram over [0,1].
    std::array<std::size_t, 256> hist{};
    for (double v : image.pixels) {
        int bin = static_cast<int>(v * 256.0);
        bin = std::clamp(bin, 0, 255);
        hist[static_cast<std::size_t>(bin)] += 1;
    }

    const double total = static_cast<double>(image.size());
    double sum_all = 0.0;
    for (int b = 0; b < 256; ++b) sum_all += static_cast<double>(b) * hist[b];

    // Threshold maximizing the between-class variance; first maximum wins.
    double best_sigma = 0.0;
    int best_t = -1;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < 256; ++t) {
        w0 += static_cast<double>(hist[t]);
        sum0 += static_cast<double>(t) * hist[t];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double sigma = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (sigma > best_sigma) {
            best_sigma = sigma;
            best_t = t;
        }
    }
    if (best_t < 0)
        throw DataError("segmentation failed: image has a single intensity level");

    BinaryMask fg(image.width, image.height);
    for (std::size_t i = 0; i < image.size(); ++i) {
        int bin = static_cast<int>(image.pixels[i] * 256.0);
        bin = std::clamp(bin, 0, 255);
        fg.on[i] = bin > best_t ? 1 : 0;
    }

    // Largest 4-connected component, first one on ties in scan order.
    const long W = static_cast<long>(image.width), H = static_cast<long>(image.height);
    std::vector<std::int32_t> comp(image.size(), -1);
    std::vector<std::size_t> stack;
    std::int32_t n_comp = 0;
    std::size_t best_size = 0;
    std::int32_t best_comp = -1;
    for (std::size_t start = 0; start < image.size(); ++start) {
        if (!fg.on[start] || comp[start] >= 0) continue;
        std::size_t size = 0;
        stack.push_back(start);
        comp[start] = n_comp;
        while (!stack.empty()) {
            const std::size_t at = stack.back();
            stack.pop_back();
            ++size;
            const long r = static_cast<long>(at) / W, c = static_cast<long>(at) % W;
            const long nb[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
            for (const auto& [nr, nc] : nb) {
                if (nr < 0 || nc < 0 || nr >= H || nc >= W) continue;
                const std::size_t ni = static_cast<std::size_t>(nr * W + nc);
                if (fg.on[ni] && comp[ni] < 0) {
                    comp[ni] = n_comp;
                    stack.push_back(ni);
                }
            }
        }
        if (size > best_size) {
            best_size = size;
            best_comp = n_comp;
        }
        ++n_comp;
    }
    if (best_comp < 0) throw DataError("segmentation failed: empty foreground");

    BinaryMask mask(image.width, image.height);
    for (std::size_t i = 0; i < image.size(); ++i)
        mask.on[i] = comp[i] == best_comp ? 1 : 0;
    return mask;
}

std::vector<std::pair<std::size_t, std::size_t>> extract_grid(const BinaryMask& mask,
                                                              const ScanGrid& grid) {
    grid.validate();
    if (mask.width < grid.roi_size || mask.height < grid.roi_size)
        throw ShapeError("image smaller than one scan window");

    // Summed-area table for O(1) window coverage.
    const std::size_t W = mask.width, H = mask.height;
    std::vector<std::uint64_t> sat((W + 1) * (H + 1), 0);
    for (std::size_t r = 0; r < H; ++r)
        for (std::size_t c = 0; c < W; ++c)
            sat[(r + 1) * (W + 1) + (c + 1)] = sat[r * (W + 1) + (c + 1)] +
                                               sat[(r + 1) * (W + 1) + c] -
                                               sat[r * (W + 1) + c] + mask.on[r * W + c];

    auto window_sum = [&](std::size_t top, std::size_t left, std::size_t size) {
        return sat[(top + size) * (W + 1) + (left + size)] -
               sat[top * (W + 1) + (left + size)] - sat[(top + size) * (W + 1) + left] +
               sat[top * (W + 1) + left];
    };

    const double window_area = static_cast<double>(grid.roi_size * grid.roi_size);
    std::vector<std::pair<std::size_t, std::size_t>> centers;
    for (std::size_t top = 0; top + grid.roi_size <= H; top += grid.stride) {
        for (std::size_t left = 0; left + grid.roi_size <= W; left += grid.stride) {
            const double coverage =
                static_cast<double>(window_sum(top, left, grid.roi_size)) / window_area;
            if (coverage >= grid.coverage_min)
                centers.emplace_back(top + grid.roi_size / 2, left + grid.roi_size / 2);
        }
    }
    return centers;
}

RoiLabel label_roi(std::size_t top, std::size_t left, std::size_t size,
                   const std::vector<AdMark>& marks) {
    const std::size_t bottom = top + size - 1, right = left + size - 1;
    for (const AdMark& m : marks)
        if (m.row >= top && m.row <= bottom && m.col >= left && m.col <= right)
            return RoiLabel::ad;
    return RoiLabel::normal;
}

ScanResult scan_exam(const Network& net, const ExamImage& exam, const ScanGrid& grid) {
    grid.validate();
    const std::size_t input_size = net.config.input_size;
    if (grid.roi_size % input_size != 0)
        throw ConfigError("scan.roi_size must be a multiple of the network input size");
    const std::size_t factor = grid.roi_size / input_size;

    for (const AdMark& m : exam.marks)
        if (m.row >= exam.image.height || m.col >= exam.image.width)
            throw DataError("AD mark outside the exam image");

    const BinaryMask mask = segment_breast(exam.image);
    const auto centers = extract_grid(mask, grid);

    ScanResult result;
    result.heatmap = GrayImage(exam.image.width, exam.image.height);
    result.rois.reserve(centers.size());

    for (const auto& [crow, ccol] : centers) {
        const std::size_t top = crow - grid.roi_size / 2;
        const std::size_t left = ccol - grid.roi_size / 2;
        GrayImage window = crop_roi(exam.image, crow, ccol, grid.roi_size);
        if (factor > 1) window = downscale_mean(window, factor);
        const double score = predict_score(net, to_tensor(zscore_standardize(window)));

        RoiScore rs;
        rs.center_row = crow;
        rs.center_col = ccol;
        rs.score = score;
        rs.label = label_roi(top, left, grid.roi_size, exam.marks);
        result.rois.push_back(rs);

        for (std::size_t r = top; r < top + grid.roi_size; ++r) {
            double* row = &result.heatmap.pixels[r * result.heatmap.width];
            for (std::size_t c = left; c < left + grid.roi_size; ++c)
                row[c] = std::max(row[c], score);
        }
    }

    std::vector<ScoredSample> samples;
    samples.reserve(result.rois.size());
    std::size_t n_pos = 0;
    for (const auto& r : result.rois) {
        samples.push_back({r.score, r.label == RoiLabel::ad});
        if (r.label == RoiLabel::ad) ++n_pos;
    }
    if (!samples.empty() && n_pos > 0 && n_pos < samples.size()) {
        result.roc_defined = true;
        result.roc = roc_curve(samples);
        result.auc = auc_trapezoid(result.roc);
        result.accuracy = accuracy_at_threshold(samples);
    } else if (!samples.empty()) {
        result.roc_defined = false;
        result.accuracy = accuracy_at_threshold(samples);
    }
    return result;
}

void write_scan_csv(const ScanResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out << "row,col,score,label\n";
    char buf[128];
    for (const auto& r : result.rois) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.9g,%s\n", r.center_row, r.center_col,
                      r.score, to_string(r.label));
        out << buf;
    }
    if (!out) throw FormatError(path + ": write failed");
}

void append_scan_summary(const ScanResult& result, const std::string& exam_id,
                         const std::string& path) {
    const bool fresh = !std::filesystem::exists(path);
    std::ofstream out(path, std::ios::app);
    if (!out) throw FormatError(path + ": cannot open for appending");
    if (fresh) out << "exam_id,n_rois,n_positive,auc,accuracy\n";

    std::size_t n_pos = 0;
    for (const auto& r : result.rois)
        if (r.label == RoiLabel::ad) ++n_pos;

    char buf[160];
    if (result.roc_defined)
        std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,%.6f,%.6f\n", exam_id.c_str(),
                      result.rois.size(), n_pos, result.auc, result.accuracy);
    else
        std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,NA,%.6f\n", exam_id.c_str(),
                      result.rois.size(), n_pos, result.accuracy);
    out << buf;
    if (!out) throw FormatError(path + ": write failed");
}

} // namespace adcnn
