#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "adcnn/augment.hpp"
#include "adcnn/error.hpp"
#include "adcnn/rng.hpp"

using namespace adcnn;

namespace {

GrayImage square22(double a, double b, double c, double d) {
    GrayImage img(2, 2);
    img.pixels = {a, b, c, d};
    return img;
}

GrayImage random_image(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    GrayImage img(n, n);
    for (auto& p : img.pixels) p = rng.uniform01();
    return img;
}

} // namespace

TEST_SUITE_BEGIN("augment");

TEST_CASE("plan has 36 distinct entries, identity first") {
    const AugmentationPlan plan = enumerate_plan();
    CHECK(plan.size() == 36);
    CHECK(600 * plan.size() == 21600);

    CHECK(plan[0].transform == GeometricTransform::identity);
    CHECK(plan[0].noise.variance == 0.0);

    std::set<std::pair<int, double>> seen;
    for (std::size_t i = 0; i < plan.size(); ++i)
        seen.insert({static_cast<int>(plan[i].transform), plan[i].noise.variance});
    CHECK(seen.size() == 36);
}

TEST_CASE("plan enumeration is stable across calls") {
    const AugmentationPlan a = enumerate_plan();
    const AugmentationPlan b = enumerate_plan();
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].transform == b[i].transform);
        CHECK(a[i].noise.variance == b[i].noise.variance);
    }
    // geometric outer, noise inner
    CHECK(a[1].transform == GeometricTransform::identity);
    CHECK(a[1].noise.variance == 0.02);
    CHECK(a[4].transform == GeometricTransform::flip_h);
    CHECK(a[4].noise.variance == 0.0);
}

TEST_CASE("rot90 is the hand permutation and has order four") {
    const GrayImage img = square22(1, 2, 3, 4);
    const GrayImage r = apply_geometric(img, GeometricTransform::rot90);
    CHECK(r.pixels == std::vector<double>{3, 1, 4, 2});

    GrayImage four = img;
    for (int i = 0; i < 4; ++i) four = apply_geometric(four, GeometricTransform::rot90);
    CHECK(four.pixels == img.pixels);
}

TEST_CASE("flipH of flipV equals rot180") {
    const GrayImage img = square22(1, 2, 3, 4);
    const GrayImage hv =
        apply_geometric(apply_geometric(img, GeometricTransform::flip_v),
                        GeometricTransform::flip_h);
    CHECK(hv.pixels == std::vector<double>{4, 3, 2, 1});
    const GrayImage r180 = apply_geometric(img, GeometricTransform::rot180);
    CHECK(hv.pixels == r180.pixels);
    const GrayImage fhv = apply_geometric(img, GeometricTransform::flip_hv);
    CHECK(fhv.pixels == r180.pixels);
}

TEST_CASE("every transform composed with its inverse restores the input") {
    const GrayImage img = random_image(8, 99);
    for (GeometricTransform t : kGeometricTransforms) {
        const GrayImage back = apply_geometric(apply_geometric(img, t), inverse(t));
        CHECK(back.pixels == img.pixels);
    }
}

TEST_CASE("geometric transforms permute the pixel multiset") {
    const GrayImage img = random_image(6, 5);
    std::vector<double> original = img.pixels;
    std::sort(original.begin(), original.end());
    for (GeometricTransform t : kGeometricTransforms) {
        std::vector<double> moved = apply_geometric(img, t).pixels;
        std::sort(moved.begin(), moved.end());
        CHECK(moved == original);
    }
}

TEST_CASE("geometric transforms reject non-square images") {
    GrayImage rect(3, 2);
    CHECK_THROWS_AS(apply_geometric(rect, GeometricTransform::rot90), ShapeError);
}

TEST_CASE("zero-variance noise is the bit-identical input") {
    const GrayImage img = random_image(16, 123);
    const GrayImage out = add_gaussian_noise(img, NoiseSpec{0.0}, 7);
    CHECK(out.pixels == img.pixels);
}

TEST_CASE("noise is deterministic in (seed, roi, plan index)") {
    const GrayImage img = random_image(16, 321);
    const std::uint64_t s = noise_seed(13, 4, 21);
    const GrayImage a = add_gaussian_noise(img, NoiseSpec{0.04}, s);
    const GrayImage b = add_gaussian_noise(img, NoiseSpec{0.04}, s);
    CHECK(a.pixels == b.pixels);

    const GrayImage c = add_gaussian_noise(img, NoiseSpec{0.04}, noise_seed(13, 4, 22));
    CHECK(a.pixels != c.pixels);
}

TEST_CASE("noise sample statistics match the spec'd variance") {
    // Pre-clamp distribution: measure the generator stream itself.
    const std::size_t n = 1000000;
    const double sigma = std::sqrt(0.02);
    Rng rng(noise_seed(2024, 0, 1));
    double sum = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = sigma * rng.normal();
        sum += x;
        ss += x * x;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = ss / static_cast<double>(n) - mean * mean;
    CHECK(std::abs(mean) < 0.0005);
    CHECK(std::abs(var - 0.02) < 0.02 * 0.02);

    // And the pixel path: mid-gray input at this variance almost never clamps.
    GrayImage mid(1000, 1000);
    std::fill(mid.pixels.begin(), mid.pixels.end(), 0.5);
    const GrayImage noisy = add_gaussian_noise(mid, NoiseSpec{0.02}, noise_seed(2024, 0, 1));
    double psum = 0.0, pss = 0.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        const double d = noisy.pixels[i] - 0.5;
        psum += d;
        pss += d * d;
    }
    const double pmean = psum / static_cast<double>(noisy.size());
    const double pvar = pss / static_cast<double>(noisy.size()) - pmean * pmean;
    CHECK(std::abs(pmean) < 0.0005);
    CHECK(std::abs(pvar - 0.02) < 0.02 * 0.02);
}

TEST_CASE("noise output stays in [0,1]") {
    const GrayImage img = random_image(32, 55);
    const GrayImage out = add_gaussian_noise(img, NoiseSpec{0.06}, 9);
    for (double p : out.pixels) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("augment_roi yields 36 same-shape variants, original first") {
    const GrayImage roi = random_image(16, 77);
    const AugmentationPlan plan = enumerate_plan();
    const auto variants = augment_roi(roi, plan, 42, 3);
    CHECK(variants.size() == 36);
    CHECK(variants[0].pixels == roi.pixels);
    for (const auto& v : variants) {
        CHECK(v.width == roi.width);
        CHECK(v.height == roi.height);
    }
}

TEST_CASE("zscore anchors") {
    GrayImage two(2, 1);
    two.pixels = {0.0, 2.0};
    const GrayImage z = zscore_standardize(two);
    CHECK(z.pixels[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(z.pixels[1] == doctest::Approx(1.0).epsilon(1e-12));

    GrayImage flat(4, 4);
    std::fill(flat.pixels.begin(), flat.pixels.end(), 0.3);
    const GrayImage zf = zscore_standardize(flat);
    for (double p : zf.pixels) CHECK(p == 0.0);
}

TEST_CASE("zscore recomputation on a random image") {
    const GrayImage img = random_image(32, 2025);
    const GrayImage z = zscore_standardize(img);
    double sum = 0.0;
    for (double p : z.pixels) sum += p;
    const double mean = sum / static_cast<double>(z.size());
    double ss = 0.0;
    for (double p : z.pixels) ss += (p - mean) * (p - mean);
    const double stddev = std::sqrt(ss / static_cast<double>(z.size()));
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(stddev - 1.0) < 1e-6);
}

TEST_SUITE_END();
