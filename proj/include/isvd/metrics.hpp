#pragma once

#include "isvd/types.hpp"

#include <vector>

namespace isvd {

/// Probability that a random positive outscores a random negative; ties count 1/2.
double roc_auc(const std::vector<double>& positives, const std::vector<double>& negatives);

/// Fraction of positives scored strictly above the K-th highest negative.
double hits_at_k(const std::vector<double>& positives, const std::vector<double>& negatives, int K);

/// Fraction of entries in `mask` where pred and truth agree.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth, const std::vector<Index>& mask);

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace isvd
