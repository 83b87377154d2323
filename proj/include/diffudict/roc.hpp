#pragma once

#include <cstdint>
#include <vector>

namespace diffudict {

// One ROC sweep: thresholds in descending order with the cumulative false
// and true positive rates, (0, 0) and (1, 1) included as virtual endpoints
// of the curve. Rates are monotone non-decreasing along the sweep.
struct RocResult {
  std::vector<double> thresholds;  // descending, one per distinct scoreseen
  std::vector<double> fpr;         // same length as thresholds
  std::vector<double> tpr;
  double auc = 0.0;  // trapezoidal area under the (fpr, tpr) curve
};

// Classifies "score > threshold" across all distinct thresholds. Tied
// scores move together, which keeps the curve well defined. Throws
// std::invalid_argument unless both classes are present.
RocResult roc_and_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels);

}  // namespace diffudict
