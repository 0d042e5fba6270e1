#include "specscan/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specscan/kernels.hpp"

namespace specscan::classify {

const char* to_string(Scheme scheme) {
    return scheme == Scheme::cve ? "cve" : "cwe";
}

const char* to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::eucl: return "eucl";
        case MetricKind::cheb: return "cheb";
        case MetricKind::mink: return "mink";
        case MetricKind::hamming: return "hamming";
        case MetricKind::diff: return "diff";
        case MetricKind::cos: return "cos";
    }
    return "?";
}

ClusterModel train(const std::vector<std::pair<std::string, signal::FeatureVector>>& examples,
                   Scheme scheme) {
    if (examples.empty()) throw std::invalid_argument("no training examples");
    const std::size_t bins = examples.front().second.bins();
    const std::size_t window = examples.front().second.window;

    ClusterModel model;
    model.scheme = scheme;
    const auto& kernel = kernels::active();
    for (const auto& [class_id, vector] : examples) {
        if (vector.bins() != bins) {
            throw std::invalid_argument("training vectors have mixed lengths");
        }
        auto [it, inserted] = model.centroids.try_emplace(class_id);
        Centroid& centroid = it->second;
        if (inserted) {
            centroid.mean.window = window;
            centroid.mean.values.assign(bins, 0.0);
        }
        kernel.add_inplace(centroid.mean.values.data(), vector.values.data(), bins);
        ++centroid.training_count;
    }
    for (auto& [class_id, centroid] : model.centroids) {
        kernel.scale_inplace(centroid.mean.values.data(), bins,
                             1.0 / static_cast<double>(centroid.training_count));
    }
    return model;
}

double distance(const Metric& metric, const signal::FeatureVector& a,
                const signal::FeatureVector& b) {
    if (a.bins() != b.bins()) {
        throw std::invalid_argument("feature vectors have different lengths");
    }
    const std::size_t n = a.bins();
    const double* pa = a.values.data();
    const double* pb = b.values.data();
    const auto& kernel = kernels::active();

    switch (metric.kind) {
        case MetricKind::eucl:
            return std::sqrt(kernel.sum_squared_diff(pa, pb, n));
        case MetricKind::cheb:
            return kernel.max_abs_diff(pa, pb, n);
        case MetricKind::mink: {
            if (metric.minkowski_p < 1.0) {
                throw std::invalid_argument("minkowski p must be >= 1");
            }
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += std::pow(std::fabs(pa[i] - pb[i]), metric.minkowski_p);
            }
            return std::pow(acc, 1.0 / metric.minkowski_p);
        }
        case MetricKind::hamming:
            return static_cast<double>(
                kernel.count_abs_diff_above(pa, pb, n, metric.tolerance));
        case MetricKind::diff:
            return kernel.sum_abs_diff_above(pa, pb, n, metric.allowance);
        case MetricKind::cos: {
            const double norm_a = std::sqrt(kernel.dot(pa, pa, n));
            const double norm_b = std::sqrt(kernel.dot(pb, pb, n));
            if (norm_a == 0.0 || norm_b == 0.0) return 1.0;
            const double d = 1.0 - kernel.dot(pa, pb, n) / (norm_a * norm_b);
            return d < 0.0 ? 0.0 : d;  // rounding can push similarity past 1
        }
    }
    throw std::invalid_argument("unknown metric");
}

RankedResult classify(const ClusterModel& model, const signal::FeatureVector& query,
                      const Metric& metric, std::size_t top_n) {
    if (model.centroids.empty()) throw std::invalid_argument("empty cluster model");
    if (top_n < 1) throw std::invalid_argument("top_n must be >= 1");
    if (query.bins() != model.bins()) {
        throw std::invalid_argument("query length does not match model bin count");
    }

    RankedResult result;
    result.metric = to_string(metric.kind);
    result.hypotheses.reserve(model.centroids.size());
    for (const auto& [class_id, centroid] : model.centroids) {
        result.hypotheses.push_back({class_id, distance(metric, query, centroid.mean)});
    }
    // std::map iteration is already id-ordered, so a stable sort on score
    // yields the lexicographic tie-break.
    std::stable_sort(result.hypotheses.begin(), result.hypotheses.end(),
                     [](const Hypothesis& x, const Hypothesis& y) { return x.score < y.score; });
    if (result.hypotheses.size() > top_n) result.hypotheses.resize(top_n);
    return result;
}

RankedResult threshold_filter(RankedResult result, double threshold) {
    std::erase_if(result.hypotheses,
                  [threshold](const Hypothesis& h) { return h.score > threshold; });
    return result;
}

}  // namespace specscan::classify
