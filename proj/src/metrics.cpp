#include "adcnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "adcnn/error.hpp"

namespace adcnn {

namespace {

std::pair<std::size_t, std::size_t> class_counts(const std::vector<ScoredSample>& samples) {
    std::size_t pos = 0, neg = 0;
    for (const auto& s : samples) {
        if (!std::isfinite(s.score)) throw DataError("non-finite score");
        (s.positive ? pos : neg) += 1;
    }
    return {pos, neg};
}

} // namespace

RocCurve roc_curve(const std::vector<ScoredSample>& samples) {
    const auto [npos, nneg] = class_counts(samples);
    if (npos == 0 || nneg == 0)
        throw DataError("ROC undefined: need at least one sample of each class");

    std::vector<ScoredSample> sorted = samples;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ScoredSample& a, const ScoredSample& b) {
                         return a.score > b.score;
                     });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double score = sorted[i].score;
        while (i < sorted.size() && sorted[i].score == score) {
            (sorted[i].positive ? tp : fp) += 1;
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(nneg),
                                static_cast<double>(tp) / static_cast<double>(npos)});
    }
    return curve;
}

double auc_trapezoid(const RocCurve& curve) {
    if (curve.points.size() < 2) throw DataError("ROC curve needs at least two points");
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return area;
}

double auc_pairwise_oracle(const std::vector<ScoredSample>& samples) {
    const auto [npos, nneg] = class_counts(samples);
    if (npos == 0 || nneg == 0)
        throw DataError("AUC undefined: need at least one sample of each class");

    double wins = 0.0;
    for (const auto& p : samples) {
        if (!p.positive) continue;
        for (const auto& n : samples) {
            if (n.positive) continue;
            if (p.score > n.score)
                wins += 1.0;
            else if (p.score == n.score)
                wins += 0.5;
        }
    }
    return wins / (static_cast<double>(npos) * static_cast<double>(nneg));
}

double accuracy_at_threshold(const std::vector<ScoredSample>& samples, double threshold) {
    if (samples.empty()) throw DataError("accuracy on empty sample set");
    std::size_t correct = 0;
    for (const auto& s : samples)
        if ((s.score >= threshold) == s.positive) ++correct;
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

void write_roc_csv(const RocCurve& curve, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out << "fpr,tpr\n";
    char buf[64];
    for (const auto& p : curve.points) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", p.fpr, p.tpr);
        out << buf;
    }
    if (!out) throw FormatError(path + ": write failed");
}

} // namespace adcnn
