#include "qptrace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qptrace {

namespace {

void check_same_length(size_t a, size_t b) {
    if (a != b)
        throw ValidationError("length mismatch: " + std::to_string(a) + " vs " +
                              std::to_string(b));
}

}  // namespace

ProbVector normalize(std::span<const double> samples) {
    if (samples.empty()) throw ValidationError("cannot normalize an empty vector");
    ProbVector out;
    out.entries.resize(samples.size());
    double sum = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i]))
            throw ValidationError("cannot normalize non-finite samples");
        out.entries[i] = std::max(samples[i], 0.0);
        sum += out.entries[i];
    }
    if (sum <= 0.0) {
        std::fill(out.entries.begin(), out.entries.end(), 1.0 / samples.size());
        return out;
    }
    for (double& e : out.entries) e /= sum;
    return out;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    check_same_length(a.size(), b.size());
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

double rmse(std::span<const double> a, std::span<const double> b) {
    check_same_length(a.size(), b.size());
    if (a.empty()) throw ValidationError("rmse of empty vectors");
    return euclidean(a, b) / std::sqrt(static_cast<double>(a.size()));
}

double sad(std::span<const double> a, std::span<const double> b) {
    check_same_length(a.size(), b.size());
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc;
}

double kl_divergence(const ProbVector& p, const ProbVector& q) {
    check_same_length(p.size(), q.size());
    double acc = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        double x = p[i], y = q[i];
        if (x > 0.0) {
            if (y > 0.0)
                acc += x * std::log2(x / y);
            else
                return std::numeric_limits<double>::infinity();
        }
    }
    return acc;
}

double js_divergence(const ProbVector& p, const ProbVector& q) {
    check_same_length(p.size(), q.size());
    ProbVector m;
    m.entries.resize(p.size());
    for (size_t i = 0; i < p.size(); ++i) m.entries[i] = 0.5 * (p[i] + q[i]);
    double jsd = 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m);
    // guard against -0.0-scale float residue so js_distance stays real
    return std::max(jsd, 0.0);
}

double js_distance(const ProbVector& p, const ProbVector& q) {
    return std::sqrt(js_divergence(p, q));
}

}  // namespace qptrace
