#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nsd/errors.hpp"
#include "nsd/preprocess.hpp"

namespace nsd::feat {

inline constexpr int kFeatureCount = 11;

/// Fixed per-channel feature order; vectors are channel-major.
const std::array<std::string, kFeatureCount>& feature_names();

struct FeatureConfig {
    int shannon_bins = 64;
    int pe_order = 3;
    int pe_delay = 1;
    int entropy_m = 2;          // template length for ApEn/SampEn
    double entropy_r_factor = 0.2;  // r = factor * std(x)
};

struct Moments {
    double mean, std, skewness, kurtosis;  // population std, excess kurtosis
};

struct Hjorth {
    double activity, mobility, complexity;
};

/// Population moments; constant input yields (c, 0, 0, 0). Throws WindowTooShort (n < 2).
Moments moments(std::span<const double> x);

/// activity = var(x), mobility = sqrt(var(dx)/var(x)), complexity =
/// mobility(dx)/mobility(x); constant input yields zeros. Throws WindowTooShort (n < 3).
Hjorth hjorth(std::span<const double> x);

/// Histogram entropy in nats over `bins` equal-width bins on [0,1] (inputs are
/// min-max scaled; values are clamped onto the support). Empty bins are skipped.
double shannon_entropy(std::span<const double> x, int bins = 64);

/// Ordinal-pattern entropy normalized by ln(m!), ties broken by earlier index.
/// Throws WindowTooShort (n < m*tau + 1).
double permutation_entropy(std::span<const double> x, int order = 3, int delay = 1);

/// ApEn(m, r) = Phi_m(r) - Phi_{m+1}(r), Chebyshev distance, self-matches
/// included. Throws WindowTooShort (n < m + 2).
double approximate_entropy(std::span<const double> x, int m, double r);

/// SampEn = -ln(A/B) with self-matches excluded; both template sets range over
/// i <= n-m-1. Zero matches fall back to ln(n-m) + ln(n-m-1) - ln 2.
/// Throws WindowTooShort (n < m + 2).
double sample_entropy(std::span<const double> x, int m, double r);

struct FeatureVector {
    std::vector<double> values;  // 11 * C, channel-major
    int label = 0;
    double t_start = 0.0;
    std::string recording_id;
};

/// All 11 features for every channel, concatenated channel-major. Zero-variance
/// channels produce the centralized degenerate values (mean, then zeros).
/// Never emits NaN or infinity.
FeatureVector extract_features(const prep::WindowInstance& window, const FeatureConfig& cfg = {});

/// Optional dump for cross-implementation diffing:
/// header `recording_id,t_start,label,f0..f{11C-1}`.
void write_feature_csv(std::ostream& out, const std::vector<FeatureVector>& rows);

}  // namespace nsd::feat
