#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "specscan/signal.hpp"

// Nearest-centroid classification over spectral signatures. Training builds
// one arithmetic-mean vector per class; classification ranks classes by one
// of six distance measures. Every measure is normalized so that lower is
// better (cosine similarity is converted to 1 - similarity), which keeps the
// ranking contract uniform across metrics.

namespace specscan::classify {

enum class Scheme { cve, cwe };

const char* to_string(Scheme scheme);

enum class MetricKind { eucl, cheb, mink, hamming, diff, cos };

struct Metric {
    MetricKind kind = MetricKind::cheb;
    double minkowski_p = 3.0;  // mink only; must be >= 1
    double tolerance = 0.0;    // hamming: |a-b| > tolerance counts
    double allowance = 0.0;    // diff: |a-b| > allowance contributes

    static Metric eucl() { return {MetricKind::eucl}; }
    static Metric cheb() { return {MetricKind::cheb}; }
    static Metric mink(double p = 3.0) { return {MetricKind::mink, p}; }
    static Metric hamming(double tol = 0.0) { return {MetricKind::hamming, 3.0, tol}; }
    static Metric diff(double allow = 0.0) { return {MetricKind::diff, 3.0, 0.0, allow}; }
    static Metric cos() { return {MetricKind::cos}; }
};

const char* to_string(MetricKind kind);

struct Centroid {
    signal::FeatureVector mean;
    std::uint64_t training_count = 0;
};

struct ClusterModel {
    Scheme scheme = Scheme::cve;
    std::map<std::string, Centroid> centroids;  // class-id -> centroid

    std::size_t bins() const {
        return centroids.empty() ? 0 : centroids.begin()->second.mean.bins();
    }
};

struct Hypothesis {
    std::string class_id;
    double score = 0.0;  // lower is better
};

struct RankedResult {
    std::vector<Hypothesis> hypotheses;  // ascending score, tie by class-id
    std::string metric;  // metric or configuration id the scores came from
    std::string query_path;
};

// Element-wise mean per class, accumulated left to right in input order.
// Mixed vector lengths throw std::invalid_argument.
ClusterModel train(const std::vector<std::pair<std::string, signal::FeatureVector>>& examples,
                   Scheme scheme);

// The six measures; see docs/formats.md for the exact formulas. Throws
// std::invalid_argument on length mismatch or minkowski p < 1.
double distance(const Metric& metric, const signal::FeatureVector& a,
                const signal::FeatureVector& b);

// Scores the query against every centroid, returns the top_n best
// hypotheses. Ties are broken by lexicographic class-id. Empty model or
// bin-count mismatch throws std::invalid_argument.
RankedResult classify(const ClusterModel& model, const signal::FeatureVector& query,
                      const Metric& metric, std::size_t top_n);

// Retains hypotheses with score <= threshold; may leave the list empty.
RankedResult threshold_filter(RankedResult result, double threshold);

}  // namespace specscan::classify
