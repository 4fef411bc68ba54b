#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "embaudit/association.hpp"

namespace embaudit {

inline constexpr std::size_t kMinReportedResamples = 100;
inline constexpr std::size_t kRecommendedResamples = 1000;
inline constexpr double kDegenerateNull = 1e-12;

struct BootstrapConfig {
    std::size_t resamples = 1000;
    double confidence = 0.95;
    std::uint64_t seed = 0;
};

// Throws ValidationError for resamples < 100 or confidence outside (0, 1).
// Returns a warning string (empty when none) for resamples below 1000.
std::string check_bootstrap_config(const BootstrapConfig& cfg);

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
    double point = 0.0;

    double width() const noexcept { return high - low; }
    bool contains(double x) const noexcept { return low <= x && x <= high; }
};

// Sample quantile with linear interpolation between order statistics
// (inclusive definition: position (n - 1) * p over the sorted sample).
double quantile_sorted(std::span<const double> sorted, double p);

// Percentile interval at (1 - confidence) / 2 and its complement. Sorts
// `samples` in place.
ConfidenceInterval percentile_interval(std::span<double> samples, double confidence, double point);

// Substream keys that tie a gallery's resampling draws to its identity rather
// than its A/B role, so swapping the roles reuses the same draws.
struct GalleryStreams {
    std::uint64_t a = 0xA;
    std::uint64_t b = 0xB;
};

// Recomputes the bias on `cfg.resamples` image resamples (with replacement,
// N_a from A and N_b from B) drawn over cached similarity rows.
std::vector<double> bootstrap_statement_scores(std::span<const double> sims_a,
                                               std::span<const double> sims_b,
                                               const BootstrapConfig& cfg,
                                               std::uint64_t statement_key,
                                               GalleryStreams streams = {});

ConfidenceInterval bootstrap_statement_ci(std::span<const double> sims_a,
                                          std::span<const double> sims_b,
                                          const BootstrapConfig& cfg, std::uint64_t statement_key,
                                          GalleryStreams streams = {});

ConfidenceInterval bootstrap_statement_ci(const StatementVector& statement,
                                          const EmbeddingMatrix& gallery_a,
                                          const EmbeddingMatrix& gallery_b,
                                          const BootstrapConfig& cfg, GalleryStreams streams = {});

enum class Direction { ALeaning, BLeaning, Indeterminate };

std::string_view to_string(Direction direction);

// A-leaning iff the whole interval is above zero, B-leaning iff below.
Direction direction_of(const ConfidenceInterval& ci);

struct CategoryResult {
    std::string category;
    std::size_t statements = 0;
    double mean_bias = 0.0;
    ConfidenceInterval ci;
    Direction direction = Direction::Indeterminate;
    // Fewer than two statements: point estimate only.
    bool insufficient = false;
};

// Mean of the statement biases with a percentile CI from resampling the
// statements themselves.
CategoryResult bootstrap_category_ci(std::string category,
                                     std::span<const AssociationResult> results,
                                     const BootstrapConfig& cfg);

struct GroupSizes {
    std::size_t a = 0;
    std::size_t b = 0;
};

struct NullCalibration {
    std::size_t trials = 0;
    double null_mean_abs_bias = 0.0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;
    double observed_mean_abs_bias = 0.0;
    double ratio = 1.0;
    // Null mean |bias| below 1e-12: ratio is reported as 1.
    bool degenerate = false;
};

// Ratio with the degeneracy convention applied.
NullCalibration calibration_from_means(double observed_mean_abs_bias, double null_mean_abs_bias);

// Label-swap null. Each trial shuffles the pooled rows and reassigns them to
// groups of exactly the original sizes, then records the mean over statements
// of |Bias(s)|. `pooled` holds statement-by-image similarities. `is_a` marks
// the true group A rows; when empty, the first sizes.a rows are group A.
NullCalibration label_swap_null(const SimilarityTable& pooled, GroupSizes sizes,
                                std::size_t trials, std::uint64_t seed,
                                std::span<const std::uint8_t> is_a = {},
                                GalleryStreams streams = {});

NullCalibration label_swap_null(const EmbeddingMatrix& pooled_gallery, GroupSizes sizes,
                                std::span<const StatementVector> statements, std::size_t trials,
                                std::uint64_t seed);

struct NullTableRow {
    std::string model;
    std::string observed;
    std::string null_mean;
    std::string ratio;
    bool degenerate = false;
};

// Two-decimal rows in the Observed / Null / Ratio layout.
std::vector<NullTableRow> observed_vs_null_report(
    std::span<const std::pair<std::string, NullCalibration>> models);

std::string format_fixed(double value, int decimals);

struct TopK {
    std::vector<AssociationResult> top_a;  // largest bias first
    std::vector<AssociationResult> top_b;  // smallest bias first
};

// Ties are broken by statement id so the ranking is deterministic.
TopK top_k_statements(std::span<const AssociationResult> results, std::size_t k);

}  // namespace embaudit
