#include "adcnn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "adcnn/error.hpp"
#include "adcnn/rng.hpp"

namespace adcnn {

const char* to_string(RoiLabel label) {
    return label == RoiLabel::ad ? "ad" : "normal";
}

RoiLabel roi_label_from_string(const std::string& s) {
    if (s == "ad") return RoiLabel::ad;
    if (s == "normal") return RoiLabel::normal;
    throw FormatError("unknown label '" + s + "'");
}

const char* to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
        case Split::unsplit: return "unsplit";
    }
    return "?";
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    if (s == "test") return Split::test;
    if (s == "unsplit") return Split::unsplit;
    throw FormatError("unknown split '" + s + "'");
}

void SplitRatios::validate() const {
    if (!(train > 0.0) || !(validation > 0.0) || !(test > 0.0))
        throw ConfigError("split ratios must all be positive");
    if (std::abs(train + validation + test - 1.0) > 1e-12)
        throw ConfigError("split ratios must sum to 1");
}

void write_manifest(const Manifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out << "path,label,split,roi_id,plan_index\n";
    for (const auto& e : manifest) {
        out << e.path << ',' << to_string(e.label) << ',' << to_string(e.split) << ','
            << e.roi_id << ',' << e.plan_index << '\n';
    }
    if (!out) throw FormatError(path + ": write failed");
}

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path + ": cannot open for reading");

    std::string line;
    if (!std::getline(in, line) || line != "path,label,split,roi_id,plan_index")
        throw FormatError(path + ": bad manifest header");

    Manifest manifest;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string path_field, label_field, split_field, roi_field, plan_field;
        if (!std::getline(ss, path_field, ',') || !std::getline(ss, label_field, ',') ||
            !std::getline(ss, split_field, ',') || !std::getline(ss, roi_field, ',') ||
            !std::getline(ss, plan_field))
            throw FormatError(path + ": malformed row at line " + std::to_string(lineno));
        ManifestEntry e;
        e.path = path_field;
        e.label = roi_label_from_string(label_field);
        e.split = split_from_string(split_field);
        try {
            e.roi_id = std::stoull(roi_field);
            e.plan_index = std::stoul(plan_field);
        } catch (const std::exception&) {
            throw FormatError(path + ": bad numeric field at line " + std::to_string(lineno));
        }
        manifest.push_back(std::move(e));
    }
    return manifest;
}

std::pair<std::size_t, std::size_t> crop_origin(std::size_t height, std::size_t width,
                                                std::size_t center_row,
                                                std::size_t center_col,
                                                std::size_t size) {
    if (size == 0) throw ConfigError("crop size must be positive");
    if (size > width || size > height)
        throw ShapeError("crop size " + std::to_string(size) + " exceeds image " +
                         std::to_string(width) + "x" + std::to_string(height));

    const long half = static_cast<long>(size / 2);
    long top = static_cast<long>(center_row) - half;
    long left = static_cast<long>(center_col) - half;
    top = std::clamp(top, 0L, static_cast<long>(height - size));
    left = std::clamp(left, 0L, static_cast<long>(width - size));
    return {static_cast<std::size_t>(top), static_cast<std::size_t>(left)};
}

GrayImage crop_roi(const GrayImage& image, std::size_t center_row,
                   std::size_t center_col, std::size_t size) {
    const auto [top, left] = crop_origin(image.height, image.width, center_row,
                                         center_col, size);
    GrayImage out(size, size);
    for (std::size_t r = 0; r < size; ++r) {
        const double* src = &image.pixels[(top + r) * image.width + left];
        std::copy(src, src + size, &out.pixels[r * size]);
    }
    return out;
}

namespace {

double window_mean(const GrayImage& image, std::size_t top, std::size_t left,
                   std::size_t size) {
    double sum = 0.0;
    for (std::size_t r = 0; r < size; ++r) {
        const double* row = &image.pixels[(top + r) * image.width + left];
        for (std::size_t c = 0; c < size; ++c) sum += row[c];
    }
    return sum / static_cast<double>(size * size);
}

bool windows_overlap(std::size_t a_top, std::size_t a_left, std::size_t b_top,
                     std::size_t b_left, std::size_t size) {
    const bool rows = a_top < b_top + size && b_top < a_top + size;
    const bool cols = a_left < b_left + size && b_left < a_left + size;
    return rows && cols;
}

} // namespace

std::pair<std::size_t, std::size_t> sample_normal_roi(const GrayImage& image,
                                                      std::size_t ad_row,
                                                      std::size_t ad_col,
                                                      std::size_t size,
                                                      std::uint64_t seed) {
    const auto [ad_top, ad_left] =
        crop_origin(image.height, image.width, ad_row, ad_col, size);

    Rng rng(substream(seed, Stream::placement));
    const std::size_t row_span = image.height - size + 1;
    const std::size_t col_span = image.width - size + 1;
    constexpr std::size_t kMaxDraws = 10000;

    for (std::size_t draw = 0; draw < kMaxDraws; ++draw) {
        const std::size_t top = rng.uniform_below(row_span);
        const std::size_t left = rng.uniform_below(col_span);
        if (windows_overlap(top, left, ad_top, ad_left, size)) continue;
        if (window_mean(image, top, left, size) <= 0.05) continue;
        return {top + size / 2, left + size / 2};
    }
    throw DataError("no valid normal ROI placement within 10000 draws");
}

namespace {

// Largest-remainder apportionment of n into the three ratio buckets.
std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios) {
    const double r[3] = {ratios.train, ratios.validation, ratios.test};
    std::array<std::size_t, 3> base{};
    double frac[3];
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double q = r[i] * static_cast<double>(n);
        base[i] = static_cast<std::size_t>(std::floor(q));
        frac[i] = q - std::floor(q);
        assigned += base[i];
    }
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return frac[a] > frac[b]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) base[order[k % 3]] += 1;
    return base;
}

template <typename T>
void seeded_shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.uniform_below(i)]);
}

constexpr Split kSplitOrder[3] = {Split::train, Split::val, Split::test};

} // namespace

void stratified_split(Manifest& manifest, const SplitRatios& ratios,
                      std::uint64_t seed, SplitMode mode) {
    ratios.validate();

    for (int cls = 0; cls < 2; ++cls) {
        const RoiLabel label = cls == 0 ? RoiLabel::normal : RoiLabel::ad;
        Rng rng(substream(seed, Stream::split, static_cast<std::uint64_t>(cls),
                          static_cast<std::uint64_t>(mode)));

        if (mode == SplitMode::paper_faithful) {
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < manifest.size(); ++i)
                if (manifest[i].label == label) rows.push_back(i);
            if (rows.empty())
                throw DataError(std::string("no samples of class ") + to_string(label));
            seeded_shuffle(rows, rng);
            const auto counts = apportion(rows.size(), ratios);
            std::size_t at = 0;
            for (int s = 0; s < 3; ++s)
                for (std::size_t k = 0; k < counts[s]; ++k)
                    manifest[rows[at++]].split = kSplitOrder[s];
        } else {
            // Unit of assignment is the ROI; all of its variants follow it.
            std::vector<std::uint64_t> roi_ids;
            for (const auto& e : manifest)
                if (e.label == label &&
                    std::find(roi_ids.begin(), roi_ids.end(), e.roi_id) == roi_ids.end())
                    roi_ids.push_back(e.roi_id);
            if (roi_ids.empty())
                throw DataError(std::string("no samples of class ") + to_string(label));
            seeded_shuffle(roi_ids, rng);
            const auto counts = apportion(roi_ids.size(), ratios);
            std::map<std::uint64_t, Split> assignment;
            std::size_t at = 0;
            for (int s = 0; s < 3; ++s)
                for (std::size_t k = 0; k < counts[s]; ++k)
                    assignment[roi_ids[at++]] = kSplitOrder[s];
            for (auto& e : manifest)
                if (e.label == label) e.split = assignment[e.roi_id];
        }
    }
}

namespace {

// Separable box blur with edge truncation; window = 2*radius + 1.
void box_blur(std::vector<double>& px, std::size_t width, std::size_t height,
              std::size_t radius) {
    std::vector<double> tmp(px.size());
    const long r = static_cast<long>(radius);
    for (std::size_t y = 0; y < height; ++y) {
        const double* row = &px[y * width];
        for (std::size_t x = 0; x < width; ++x) {
            const long lo = std::max(0L, static_cast<long>(x) - r);
            const long hi = std::min(static_cast<long>(width) - 1, static_cast<long>(x) + r);
            double acc = 0.0;
            for (long k = lo; k <= hi; ++k) acc += row[k];
            tmp[y * width + x] = acc / static_cast<double>(hi - lo + 1);
        }
    }
    for (std::size_t x = 0; x < width; ++x) {
        for (std::size_t y = 0; y < height; ++y) {
            const long lo = std::max(0L, static_cast<long>(y) - r);
            const long hi = std::min(static_cast<long>(height) - 1, static_cast<long>(y) + r);
            double acc = 0.0;
            for (long k = lo; k <= hi; ++k) acc += tmp[k * width + x];
            px[y * width + x] = acc / static_cast<double>(hi - lo + 1);
        }
    }
}

// White noise blurred by an 11-pixel box filter, min-max rescaled to [lo, hi].
GrayImage smooth_field(std::size_t width, std::size_t height, Rng& rng, double lo,
                       double hi) {
    GrayImage img(width, height);
    for (auto& p : img.pixels) p = rng.uniform01();
    box_blur(img.pixels, width, height, 5);
    const auto [mn, mx] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    const double span = *mx - *mn;
    if (span <= 0.0) {
        std::fill(img.pixels.begin(), img.pixels.end(), 0.5 * (lo + hi));
        return img;
    }
    for (auto& p : img.pixels) p = lo + (hi - lo) * (p - *mn) / span;
    return img;
}

// Brightest-wins overlay of 12..24 radiating segments with linear falloff.
void draw_spiculation(std::vector<double>& overlay, std::size_t width,
                      std::size_t height, double center_row, double center_col,
                      double radius, double amplitude, Rng& rng) {
    const std::size_t nseg = 12 + rng.uniform_below(13);
    for (std::size_t s = 0; s < nseg; ++s) {
        const double theta = rng.uniform01() * 2.0 * M_PI;
        const double dr = std::sin(theta), dc = std::cos(theta);
        for (double t = 0.0; t <= radius; t += 0.5) {
            const long row = std::lround(center_row + t * dr);
            const long col = std::lround(center_col + t * dc);
            if (row < 0 || col < 0 || row >= static_cast<long>(height) ||
                col >= static_cast<long>(width))
                break;
            const double amp = amplitude * (1.0 - t / radius);
            double& o = overlay[static_cast<std::size_t>(row) * width +
                                static_cast<std::size_t>(col)];
            o = std::max(o, amp);
        }
    }
}

SynthRoi synth_one(RoiLabel label, std::size_t size, Rng& rng) {
    SynthRoi roi;
    roi.image = smooth_field(size, size, rng, 0.2, 0.8);
    // A reference point is drawn for both classes so the consumed stream
    // stays aligned and normals carry a comparable "center".
    const std::size_t lo = 3 * size / 8, hi = 5 * size / 8;
    roi.center_row = lo + rng.uniform_below(hi - lo);
    roi.center_col = lo + rng.uniform_below(hi - lo);
    if (label == RoiLabel::ad) {
        std::vector<double> overlay(size * size, 0.0);
        draw_spiculation(overlay, size, size, static_cast<double>(roi.center_row),
                         static_cast<double>(roi.center_col),
                         static_cast<double>(size) / 4.0, 0.15, rng);
        for (std::size_t i = 0; i < overlay.size(); ++i) {
            const double v = roi.image.pixels[i] + overlay[i];
            roi.image.pixels[i] = v > 1.0 ? 1.0 : v;
        }
    }
    return roi;
}

} // namespace

std::vector<SynthRoi> synth_generate_detailed(std::size_t count, RoiLabel label,
                                              std::size_t image_size,
                                              std::uint64_t seed) {
    if (count == 0) throw ConfigError("synth count must be >= 1");
    if (image_size == 0) throw ConfigError("synth image_size must be >= 1");
    std::vector<SynthRoi> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(substream(seed, Stream::synth, static_cast<std::uint64_t>(label), i));
        out.push_back(synth_one(label, image_size, rng));
    }
    return out;
}

std::vector<GrayImage> synth_generate(std::size_t count, RoiLabel label,
                                      std::size_t image_size, std::uint64_t seed) {
    std::vector<GrayImage> out;
    out.reserve(count);
    for (auto& r : synth_generate_detailed(count, label, image_size, seed))
        out.push_back(std::move(r.image));
    return out;
}

ExamSynthesis synth_exam(std::size_t height, std::size_t width,
                         std::size_t n_distortions, std::uint64_t seed) {
    if (height % 4 != 0 || width % 4 != 0)
        throw ConfigError("exam extents must be multiples of 4");
    const std::size_t qh = height / 4, qw = width / 4;
    if (qh < 64 || qw < 64) throw ConfigError("exam too small");

    Rng rng(substream(seed, Stream::synth, 0xe5a3, 0));
    GrayImage field = smooth_field(qw, qh, rng, 0.2, 0.8);

    // Breast profile: half-ellipse anchored on the left edge.
    const double cr = static_cast<double>(qh) / 2.0;
    const double a = 0.48 * static_cast<double>(qh);
    const double b = 0.85 * static_cast<double>(qw);
    auto inside = [&](double row, double col, double shrink) {
        const double dr = (row - cr) / (a * shrink);
        const double dc = col / (b * shrink);
        return dr * dr + dc * dc <= 1.0;
    };

    GrayImage quarter(qw, qh);
    for (std::size_t r = 0; r < qh; ++r)
        for (std::size_t c = 0; c < qw; ++c)
            quarter.at(r, c) = inside(static_cast<double>(r), static_cast<double>(c), 1.0)
                                   ? field.at(r, c)
                                   : 0.05;

    ExamSynthesis exam;
    std::vector<double> overlay(qh * qw, 0.0);
    for (std::size_t d = 0; d < n_distortions; ++d) {
        // Rejection-sample a center well inside the breast.
        std::size_t row = 0, col = 0;
        for (int tries = 0; tries < 100000; ++tries) {
            row = rng.uniform_below(qh);
            col = rng.uniform_below(qw);
            if (inside(static_cast<double>(row), static_cast<double>(col), 0.65) &&
                col >= 24)
                break;
        }
        draw_spiculation(overlay, qw, qh, static_cast<double>(row),
                         static_cast<double>(col), 16.0, 0.15, rng);
        exam.ad_centers.emplace_back(row * 4 + 2, col * 4 + 2);
    }
    for (std::size_t i = 0; i < overlay.size(); ++i) {
        const double v = quarter.pixels[i] + overlay[i];
        quarter.pixels[i] = v > 1.0 ? 1.0 : v;
    }

    // Nearest upsample so 4x area pooling recovers the quarter image exactly.
    exam.image = GrayImage(width, height);
    for (std::size_t r = 0; r < height; ++r) {
        const double* qrow = &quarter.pixels[(r / 4) * qw];
        double* row = &exam.image.pixels[r * width];
        for (std::size_t c = 0; c < width; ++c) row[c] = qrow[c / 4];
    }
    return exam;
}

RoiSampleSource::RoiSampleSource(Manifest manifest, const AugmentationPlan& plan,
                                 std::uint64_t run_seed)
    : manifest_(std::move(manifest)), plan_(plan), run_seed_(run_seed) {
    for (const auto& e : manifest_) {
        if (e.plan_index >= plan_.size())
            throw DataError("manifest plan_index " + std::to_string(e.plan_index) +
                            " outside the 36-entry plan");
        if (images_.find(e.path) == images_.end())
            images_.emplace(e.path, read_pgm(e.path));
    }
}

Tensor RoiSampleSource::input(std::size_t i) const {
    const ManifestEntry& e = manifest_[i];
    const GrayImage& original = images_.at(e.path);
    GrayImage variant =
        apply_plan_entry(original, plan_[e.plan_index], run_seed_, e.roi_id, e.plan_index);
    return to_tensor(zscore_standardize(variant));
}

Manifest filter_split(const Manifest& manifest, Split split) {
    Manifest out;
    for (const auto& e : manifest)
        if (e.split == split) out.push_back(e);
    return out;
}

} // namespace adcnn
