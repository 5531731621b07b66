#ifndef ADCNN_METRICS_HPP
#define ADCNN_METRICS_HPP

#include <string>
#include <vector>

namespace adcnn {

struct ScoredSample {
    double score = 0.0;
    bool positive = false; // true = AD
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Starts at (0,0), ends at (1,1); fpr and tpr non-decreasing.
struct RocCurve {
    std::vector<RocPoint> points;
};

/// One point per distinct score, ties consumed together (diagonal segments).
/// Throws DataError when a class is missing.
RocCurve roc_curve(const std::vector<ScoredSample>& samples);

double auc_trapezoid(const RocCurve& curve);

/// AUC as P(score+ > score-) + 0.5 P(tie) by exhaustive pair enumeration.
/// The independent route against auc_trapezoid.
double auc_pairwise_oracle(const std::vector<ScoredSample>& samples);

/// Fraction of samples with (score >= threshold) == positive.
double accuracy_at_threshold(const std::vector<ScoredSample>& samples,
                             double threshold = 0.5);

/// CSV `fpr,tpr` with a one-line header.
void write_roc_csv(const RocCurve& curve, const std::string& path);

} // namespace adcnn

#endif // ADCNN_METRICS_HPP
