#include "diffudict/roc.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "diffudict/errors.hpp"

namespace diffudict {

RocResult roc_and_auc(const std::vector<double>& scores,
                      const std::vector<std::uint8_t>& labels) {
  if (scores.size() != labels.size())
    throw ShapeError("roc_and_auc: one label per score required");
  if (scores.empty()) throw std::invalid_argument("roc_and_auc: empty input");

  std::size_t positives = 0;
  for (std::uint8_t l : labels) positives += l ? 1 : 0;
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0)
    throw std::invalid_argument("roc_and_auc: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocResult roc;
  double tp = 0.0, fp = 0.0;
  double area = 0.0;
  double prev_fpr = 0.0, prev_tpr = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // Advance over the whole tie group so equal scores move together.
    while (i < order.size() && scores[order[i]] == threshold) {
      if (labels[order[i]]) tp += 1.0;
      else fp += 1.0;
      ++i;
    }
    const double cur_fpr = fp / static_cast<double>(negatives);
    const double cur_tpr = tp / static_cast<double>(positives);
    area += 0.5 * (cur_fpr - prev_fpr) * (cur_tpr + prev_tpr);
    roc.thresholds.push_back(threshold);
    roc.fpr.push_back(cur_fpr);
    roc.tpr.push_back(cur_tpr);
    prev_fpr = cur_fpr;
    prev_tpr = cur_tpr;
  }
  roc.auc = area;
  return roc;
}

}  // namespace diffudict
