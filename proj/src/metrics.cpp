#include "isvd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace isvd {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (std::isnan(x)) throw std::invalid_argument(std::string(what) + " contain NaN");
}

}  // namespace

double roc_auc(const std::vector<double>& positives, const std::vector<double>& negatives) {
  if (positives.empty() || negatives.empty()) throw std::invalid_argument("roc_auc: empty score list");
  check_finite(positives, "positive scores");
  check_finite(negatives, "negative scores");

  // Mann-Whitney U with average ranks over ties.
  std::vector<std::pair<double, bool>> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.emplace_back(s, true);
  for (double s : negatives) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < all.size() && all[j].first == all[i].first) pos_in_group += all[j++].second;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    rank_sum += avg_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double np = static_cast<double>(positives.size());
  const double nn = static_cast<double>(negatives.size());
  return (rank_sum - np * (np + 1) / 2.0) / (np * nn);
}

double hits_at_k(const std::vector<double>& positives, const std::vector<double>& negatives, int K) {
  if (positives.empty()) throw std::invalid_argument("hits_at_k: no positive scores");
  if (K < 1) throw std::invalid_argument("hits_at_k: K must be >= 1");
  if (negatives.size() < static_cast<std::size_t>(K))
    throw std::invalid_argument("hits_at_k: " + std::to_string(negatives.size()) + " negatives, need at least " +
                                std::to_string(K));
  check_finite(positives, "positive scores");
  check_finite(negatives, "negative scores");
  std::vector<double> neg = negatives;
  std::nth_element(neg.begin(), neg.begin() + (K - 1), neg.end(), std::greater<>());
  const double threshold = neg[K - 1];
  const auto above = std::count_if(positives.begin(), positives.end(), [&](double s) { return s > threshold; });
  return static_cast<double>(above) / static_cast<double>(positives.size());
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth, const std::vector<Index>& mask) {
  if (pred.size() != truth.size()) throw std::invalid_argument("accuracy: prediction and truth lengths differ");
  if (mask.empty()) throw std::invalid_argument("accuracy: empty mask");
  std::size_t hits = 0;
  for (Index i : mask) {
    if (i < 0 || static_cast<std::size_t>(i) >= pred.size()) throw std::out_of_range("accuracy: mask index out of range");
    hits += pred[i] == truth[i];
  }
  return static_cast<double>(hits) / static_cast<double>(mask.size());
}

}  // namespace isvd
