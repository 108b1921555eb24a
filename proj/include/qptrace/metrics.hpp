#pragma once

#include <span>
#include <vector>

#include "qptrace/common.hpp"

namespace qptrace {

// Discrete probability distribution: entries >= 0 summing to 1.
struct ProbVector {
    std::vector<double> entries;

    size_t size() const { return entries.size(); }
    double operator[](size_t i) const { return entries[i]; }
};

// Clamps negatives to zero, then divides by the sum. An all-zero input maps
// to the uniform distribution so silent windows stay comparable.
ProbVector normalize(std::span<const double> samples);

double euclidean(std::span<const double> a, std::span<const double> b);
double rmse(std::span<const double> a, std::span<const double> b);
double sad(std::span<const double> a, std::span<const double> b);

// Relative entropy in bits, elementwise rule:
//   x*log2(x/y) if x>0, y>0;  0 if x=0;  +inf if x>0, y=0.
double kl_divergence(const ProbVector& p, const ProbVector& q);

// 0.5*KL(P||M) + 0.5*KL(Q||M) with M = (P+Q)/2; in [0, 1] with base-2 logs.
double js_divergence(const ProbVector& p, const ProbVector& q);

// sqrt(JSD): a metric on probability vectors.
double js_distance(const ProbVector& p, const ProbVector& q);

}  // namespace qptrace
