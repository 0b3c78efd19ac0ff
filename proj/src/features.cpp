#include "nsd/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

namespace nsd::feat {

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "mean",          "std",
        "skewness",      "kurtosis",
        "hjorth_activity", "hjorth_mobility",
        "hjorth_complexity", "permutation_entropy",
        "shannon_entropy", "approximate_entropy",
        "sample_entropy"};
    return names;
}

namespace {

double population_variance(std::span<const double> x, double mean) {
    double acc = 0.0;
    for (double v : x) {
        const double d = v - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(x.size());
}

std::vector<double> first_difference(std::span<const double> x) {
    std::vector<double> d(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = x[i + 1] - x[i];
    return d;
}

bool is_constant(std::span<const double> x) {
    for (double v : x)
        if (v != x.front()) return false;
    return true;
}

}  // namespace

Moments moments(std::span<const double> x) {
    if (x.size() < 2) throw WindowTooShort("moments need at least 2 samples");
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n; m3 /= n; m4 /= n;
    if (m2 == 0.0) return {mean, 0.0, 0.0, 0.0};  // degenerate rule
    return {mean, std::sqrt(m2), m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

Hjorth hjorth(std::span<const double> x) {
    if (x.size() < 3) throw WindowTooShort("hjorth needs at least 3 samples");
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    const double var_x = population_variance(x, mean);
    if (var_x == 0.0) return {0.0, 0.0, 0.0};

    const std::vector<double> dx = first_difference(x);
    const double mean_dx = std::accumulate(dx.begin(), dx.end(), 0.0) / dx.size();
    const double var_dx = population_variance(dx, mean_dx);
    const double mobility = std::sqrt(var_dx / var_x);
    if (var_dx == 0.0) return {var_x, 0.0, 0.0};

    const std::vector<double> ddx = first_difference(dx);
    const double mean_ddx = std::accumulate(ddx.begin(), ddx.end(), 0.0) / ddx.size();
    const double var_ddx = population_variance(ddx, mean_ddx);
    const double mobility_dx = std::sqrt(var_ddx / var_dx);
    return {var_x, mobility, mobility_dx / mobility};
}

double shannon_entropy(std::span<const double> x, int bins) {
    if (x.empty() || bins < 1) return 0.0;
    std::vector<long long> counts(bins, 0);
    for (double v : x) {
        double c = std::clamp(v, 0.0, 1.0);
        int b = std::min(bins - 1, static_cast<int>(c * bins));
        ++counts[b];
    }
    const double n = static_cast<double>(x.size());
    double h = 0.0;
    for (long long c : counts) {
        if (c == 0) continue;
        const double p = c / n;
        h -= p * std::log(p);
    }
    return h;
}

double permutation_entropy(std::span<const double> x, int order, int delay) {
    if (order < 2 || delay < 1) throw Error("permutation entropy needs order >= 2, delay >= 1");
    const std::size_t span = static_cast<std::size_t>((order - 1) * delay);
    if (x.size() < span + 2)
        throw WindowTooShort("permutation entropy needs at least m*tau + 1 samples");

    std::map<std::vector<int>, long long> counts;
    const std::size_t n_patterns = x.size() - span;
    std::vector<int> rank(order);
    for (std::size_t i = 0; i < n_patterns; ++i) {
        std::iota(rank.begin(), rank.end(), 0);
        // stable sort by value: equal samples keep earlier-index-first order
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
            return x[i + static_cast<std::size_t>(a) * delay] <
                   x[i + static_cast<std::size_t>(b) * delay];
        });
        ++counts[rank];
    }

    double h = 0.0;
    for (const auto& [pattern, c] : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(n_patterns);
        h -= p * std::log(p);
    }
    double log_factorial = 0.0;
    for (int k = 2; k <= order; ++k) log_factorial += std::log(static_cast<double>(k));
    return h / log_factorial;
}

double approximate_entropy(std::span<const double> x, int m, double r) {
    const std::size_t n = x.size();
    if (n < static_cast<std::size_t>(m + 2)) throw WindowTooShort("ApEn needs at least m+2 samples");
    if (r < 0.0) throw Error("ApEn tolerance must be non-negative");

    auto phi = [&](int mm) {
        const std::size_t count = n - static_cast<std::size_t>(mm) + 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            long long matches = 0;  // self-match included
            for (std::size_t j = 0; j < count; ++j) {
                double dist = 0.0;
                for (int k = 0; k < mm; ++k)
                    dist = std::max(dist, std::abs(x[i + k] - x[j + k]));
                if (dist <= r) ++matches;
            }
            acc += std::log(static_cast<double>(matches) / static_cast<double>(count));
        }
        return acc / static_cast<double>(count);
    };
    return phi(m) - phi(m + 1);
}

double sample_entropy(std::span<const double> x, int m, double r) {
    const std::size_t n = x.size();
    if (n < static_cast<std::size_t>(m + 2)) throw WindowTooShort("SampEn needs at least m+2 samples");
    if (r < 0.0) throw Error("SampEn tolerance must be non-negative");

    // both template sets range over i <= n-m-1 so A/B normalizations cancel
    const std::size_t count = n - static_cast<std::size_t>(m);
    long long a = 0, b = 0;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            double dist = 0.0;
            for (int k = 0; k < m; ++k) dist = std::max(dist, std::abs(x[i + k] - x[j + k]));
            if (dist <= r) {
                ++b;
                if (std::abs(x[i + m] - x[j + m]) <= r) ++a;
            }
        }
    }
    if (b == 0 || a == 0) {
        // conventional finite ceiling instead of infinity
        return std::log(static_cast<double>(n - m)) +
               std::log(static_cast<double>(n - m - 1)) - std::log(2.0);
    }
    return -std::log(static_cast<double>(a) / static_cast<double>(b));
}

FeatureVector extract_features(const prep::WindowInstance& window, const FeatureConfig& cfg) {
    if (window.data.empty()) throw EmptyInput("extract_features: window has no channels");
    const std::size_t len = window.data.front().size();
    for (const auto& ch : window.data)
        if (ch.size() != len || ch.empty())
            throw ChannelLengthMismatch("extract_features: channels must be non-empty and equal length");

    FeatureVector out;
    out.label = window.label;
    out.t_start = window.t_start;
    out.recording_id = window.recording_id;
    out.values.reserve(kFeatureCount * window.data.size());

    std::vector<double> x(len);
    for (const auto& ch : window.data) {
        std::copy(ch.begin(), ch.end(), x.begin());
        if (is_constant(x)) {
            // centralized degenerate rule: every zero-variance feature is 0
            out.values.push_back(x.front());
            for (int i = 1; i < kFeatureCount; ++i) out.values.push_back(0.0);
            continue;
        }
        const Moments mo = moments(x);
        const Hjorth hj = hjorth(x);
        const double r = cfg.entropy_r_factor * mo.std;
        out.values.push_back(mo.mean);
        out.values.push_back(mo.std);
        out.values.push_back(mo.skewness);
        out.values.push_back(mo.kurtosis);
        out.values.push_back(hj.activity);
        out.values.push_back(hj.mobility);
        out.values.push_back(hj.complexity);
        out.values.push_back(permutation_entropy(x, cfg.pe_order, cfg.pe_delay));
        out.values.push_back(shannon_entropy(x, cfg.shannon_bins));
        out.values.push_back(approximate_entropy(x, cfg.entropy_m, r));
        out.values.push_back(sample_entropy(x, cfg.entropy_m, r));
    }

    for (double v : out.values)
        if (!std::isfinite(v)) throw Error("extract_features produced a non-finite value");
    return out;
}

void write_feature_csv(std::ostream& out, const std::vector<FeatureVector>& rows) {
    if (rows.empty()) return;
    const std::size_t width = rows.front().values.size();
    out << "recording_id,t_start,label";
    for (std::size_t i = 0; i < width; ++i) out << ",f" << i;
    out << "\n";
    char buf[32];
    for (const auto& row : rows) {
        out << row.recording_id << ',' << row.t_start << ',' << row.label;
        for (double v : row.values) {
            std::snprintf(buf, sizeof(buf), "%.9g", v);
            out << ',' << buf;
        }
        out << "\n";
    }
}

}  // namespace nsd::feat
