#include "embaudit/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "embaudit/error.hpp"
#include "embaudit/parallel.hpp"
#include "embaudit/random.hpp"

namespace embaudit {

namespace {

// Substream domains.
constexpr std::uint64_t kStatementDomain = 1;
constexpr std::uint64_t kCategoryDomain = 2;
constexpr std::uint64_t kNullDomain = 3;

double resampled_mean(std::span<const double> values, Xoshiro256& rng) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += values[rng.below(values.size())];
    return sum / static_cast<double>(values.size());
}

double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

std::string check_bootstrap_config(const BootstrapConfig& cfg) {
    if (cfg.resamples < kMinReportedResamples) {
        throw ValidationError("bootstrap needs at least " + std::to_string(kMinReportedResamples) +
                              " resamples, got " + std::to_string(cfg.resamples));
    }
    if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) {
        throw ValidationError("confidence must lie in (0, 1)");
    }
    if (cfg.resamples < kRecommendedResamples) {
        return "bootstrap resamples " + std::to_string(cfg.resamples) + " below recommended " +
               std::to_string(kRecommendedResamples);
    }
    return {};
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw ValidationError("quantile of empty sample");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ConfidenceInterval percentile_interval(std::span<double> samples, double confidence, double point) {
    std::sort(samples.begin(), samples.end());
    const double tail = (1.0 - confidence) / 2.0;
    return {quantile_sorted(samples, tail), quantile_sorted(samples, 1.0 - tail), point};
}

std::vector<double> bootstrap_statement_scores(std::span<const double> sims_a,
                                               std::span<const double> sims_b,
                                               const BootstrapConfig& cfg,
                                               std::uint64_t statement_key,
                                               GalleryStreams streams) {
    if (sims_a.size() < 2 || sims_b.size() < 2) {
        throw ValidationError("bootstrap needs at least two rows per gallery");
    }
    std::vector<double> scores(cfg.resamples);
    for (std::size_t r = 0; r < cfg.resamples; ++r) {
        Xoshiro256 rng_a(derive_stream(cfg.seed, {kStatementDomain, statement_key, streams.a, r}));
        Xoshiro256 rng_b(derive_stream(cfg.seed, {kStatementDomain, statement_key, streams.b, r}));
        scores[r] = resampled_mean(sims_a, rng_a) - resampled_mean(sims_b, rng_b);
    }
    return scores;
}

ConfidenceInterval bootstrap_statement_ci(std::span<const double> sims_a,
                                          std::span<const double> sims_b,
                                          const BootstrapConfig& cfg, std::uint64_t statement_key,
                                          GalleryStreams streams) {
    auto scores = bootstrap_statement_scores(sims_a, sims_b, cfg, statement_key, streams);
    const double point = bias_from_similarities({}, sims_a, sims_b).bias;
    return percentile_interval(scores, cfg.confidence, point);
}

ConfidenceInterval bootstrap_statement_ci(const StatementVector& statement,
                                          const EmbeddingMatrix& gallery_a,
                                          const EmbeddingMatrix& gallery_b,
                                          const BootstrapConfig& cfg, GalleryStreams streams) {
    const std::span<const StatementVector> one(&statement, 1);
    const auto sims = similarity_matrices(one, gallery_a, gallery_b);
    return bootstrap_statement_ci(sims.a.row(0), sims.b.row(0), cfg,
                                  fnv1a64(statement.statement_id), streams);
}

std::string_view to_string(Direction direction) {
    switch (direction) {
        case Direction::ALeaning: return "A-leaning";
        case Direction::BLeaning: return "B-leaning";
        case Direction::Indeterminate: break;
    }
    return "indeterminate";
}

Direction direction_of(const ConfidenceInterval& ci) {
    if (ci.low > 0.0) return Direction::ALeaning;
    if (ci.high < 0.0) return Direction::BLeaning;
    return Direction::Indeterminate;
}

CategoryResult bootstrap_category_ci(std::string category,
                                     std::span<const AssociationResult> results,
                                     const BootstrapConfig& cfg) {
    if (results.empty()) throw ValidationError("category '" + category + "' has no statements");
    std::vector<double> scores(results.size());
    std::transform(results.begin(), results.end(), scores.begin(),
                   [](const AssociationResult& r) { return r.bias; });

    CategoryResult out;
    out.category = std::move(category);
    out.statements = results.size();
    out.mean_bias = mean_of(scores);
    if (results.size() < 2) {
        out.ci = {out.mean_bias, out.mean_bias, out.mean_bias};
        out.direction = Direction::Indeterminate;
        out.insufficient = true;
        return out;
    }
    const std::uint64_t key = fnv1a64(out.category);
    std::vector<double> means(cfg.resamples);
    for (std::size_t r = 0; r < cfg.resamples; ++r) {
        Xoshiro256 rng(derive_stream(cfg.seed, {kCategoryDomain, key, r}));
        means[r] = resampled_mean(scores, rng);
    }
    out.ci = percentile_interval(means, cfg.confidence, out.mean_bias);
    out.direction = direction_of(out.ci);
    return out;
}

NullCalibration calibration_from_means(double observed_mean_abs_bias, double null_mean_abs_bias) {
    NullCalibration c;
    c.observed_mean_abs_bias = observed_mean_abs_bias;
    c.null_mean_abs_bias = null_mean_abs_bias;
    if (null_mean_abs_bias < kDegenerateNull) {
        c.ratio = 1.0;
        c.degenerate = true;
    } else {
        c.ratio = observed_mean_abs_bias / null_mean_abs_bias;
    }
    return c;
}

namespace {

// Mean over statements of |mean(sims | mask) - mean(sims | !mask)|, summing in
// ascending pooled order.
double mean_abs_bias(const SimilarityTable& pooled, std::span<const std::uint8_t> is_a,
                     GroupSizes sizes) {
    double total = 0.0;
    for (std::size_t s = 0; s < pooled.rows; ++s) {
        const auto row = pooled.row(s);
        double sum_a = 0.0;
        double sum_b = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (is_a[i]) {
                sum_a += row[i];
            } else {
                sum_b += row[i];
            }
        }
        const double bias = sum_a / static_cast<double>(sizes.a) -
                            sum_b / static_cast<double>(sizes.b);
        total += std::abs(bias);
    }
    return total / static_cast<double>(pooled.rows);
}

}  // namespace

NullCalibration label_swap_null(const SimilarityTable& pooled, GroupSizes sizes,
                                std::size_t trials, std::uint64_t seed,
                                std::span<const std::uint8_t> is_a, GalleryStreams streams) {
    const std::size_t n = sizes.a + sizes.b;
    if (pooled.cols != n) {
        throw ValidationError("pooled gallery has " + std::to_string(pooled.cols) +
                              " rows, sizes sum to " + std::to_string(n));
    }
    if (sizes.a == 0 || sizes.b == 0) throw ValidationError("null model needs two non-empty groups");
    if (pooled.rows == 0) throw ValidationError("null model needs at least one statement");
    if (trials == 0) throw ValidationError("null model needs at least one trial");

    std::vector<std::uint8_t> truth(is_a.begin(), is_a.end());
    if (truth.empty()) {
        truth.assign(n, 0);
        std::fill_n(truth.begin(), sizes.a, std::uint8_t{1});
    }
    if (truth.size() != n ||
        static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1)) != sizes.a) {
        throw ValidationError("group membership mask does not match group sizes");
    }

    // The leading block of each shuffle goes to whichever gallery has the
    // smaller stream key, so relabelling A and B yields the same partitions.
    const bool a_first = streams.a <= streams.b;
    const std::size_t first_size = a_first ? sizes.a : sizes.b;

    std::vector<double> null(trials);
    parallel_for(trials, [&](std::size_t t) {
        Xoshiro256 rng(derive_stream(seed, {kNullDomain, t}));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
        std::vector<std::uint8_t> mask(n, a_first ? 0 : 1);
        for (std::size_t i = 0; i < first_size; ++i) mask[order[i]] = a_first ? 1 : 0;
        null[t] = mean_abs_bias(pooled, mask, sizes);
    });

    NullCalibration c =
        calibration_from_means(mean_abs_bias(pooled, truth, sizes), mean_of(null));
    c.trials = trials;
    std::sort(null.begin(), null.end());
    c.q05 = quantile_sorted(null, 0.05);
    c.q50 = quantile_sorted(null, 0.50);
    c.q95 = quantile_sorted(null, 0.95);
    return c;
}

NullCalibration label_swap_null(const EmbeddingMatrix& pooled_gallery, GroupSizes sizes,
                                std::span<const StatementVector> statements, std::size_t trials,
                                std::uint64_t seed) {
    if (pooled_gallery.count() != sizes.a + sizes.b) {
        throw ValidationError("size mismatch: pooled gallery has " +
                              std::to_string(pooled_gallery.count()) + " rows, sizes sum to " +
                              std::to_string(sizes.a + sizes.b));
    }
    return label_swap_null(similarity_table(statements, pooled_gallery), sizes, trials, seed);
}

std::string format_fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    return buffer;
}

std::vector<NullTableRow> observed_vs_null_report(
    std::span<const std::pair<std::string, NullCalibration>> models) {
    std::vector<NullTableRow> rows;
    rows.reserve(models.size());
    for (const auto& [model, c] : models) {
        rows.push_back({model, format_fixed(c.observed_mean_abs_bias, 2),
                        format_fixed(c.null_mean_abs_bias, 2), format_fixed(c.ratio, 2),
                        c.degenerate});
    }
    return rows;
}

TopK top_k_statements(std::span<const AssociationResult> results, std::size_t k) {
    if (k == 0) throw ValidationError("top-k needs k >= 1");
    if (k > results.size()) {
        throw ValidationError("top-k: k=" + std::to_string(k) + " exceeds " +
                              std::to_string(results.size()) + " statements");
    }
    TopK out;
    out.top_a.assign(results.begin(), results.end());
    out.top_b.assign(results.begin(), results.end());
    std::partial_sort(out.top_a.begin(), out.top_a.begin() + static_cast<std::ptrdiff_t>(k),
                      out.top_a.end(), [](const auto& x, const auto& y) {
                          return x.bias != y.bias ? x.bias > y.bias
                                                  : x.statement_id < y.statement_id;
                      });
    std::partial_sort(out.top_b.begin(), out.top_b.begin() + static_cast<std::ptrdiff_t>(k),
                      out.top_b.end(), [](const auto& x, const auto& y) {
                          return x.bias != y.bias ? x.bias < y.bias
                                                  : x.statement_id < y.statement_id;
                      });
    out.top_a.resize(k);
    out.top_b.resize(k);
    return out;
}

}  // namespace embaudit
