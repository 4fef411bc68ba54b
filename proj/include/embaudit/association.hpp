#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "embaudit/embedding_io.hpp"
#include "embaudit/taxonomy.hpp"

namespace embaudit {

inline constexpr double kZeroNorm = 1e-12;
inline constexpr double kCancellationNorm = 1e-9;

// One unit-norm text vector per statement, after template averaging.
struct StatementVector {
    std::string statement_id;
    std::vector<double> vector;
    std::size_t template_count = 1;
};

// Dense row-major table of doubles; rows are statements.
struct SimilarityTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Cosine similarities of every statement against gallery A and gallery B.
struct SimilarityMatrices {
    SimilarityTable a;
    SimilarityTable b;
};

struct AssociationResult {
    std::string statement_id;
    double bias = 0.0;
    double mean_sim_a = 0.0;
    double mean_sim_b = 0.0;
};

// Rescales every row to unit L2 norm. A row with norm <= 1e-12 throws
// NumericError naming the row id (from `row_ids` when given, else its index).
EmbeddingMatrix l2_normalize(const EmbeddingMatrix& matrix,
                             std::span<const std::string> row_ids = {});

// Arithmetic mean of the per-template unit vectors, re-normalized.
StatementVector average_templates(std::string statement_id,
                                  std::span<const std::vector<double>> per_template);

// Groups normalized text rows by statement (ordered by template index) and
// averages them, returning vectors in taxonomy order. Every taxonomy statement
// must have at least one row; unknown statement ids are rejected.
std::vector<StatementVector> build_statement_vectors(const EmbeddingMatrix& texts,
                                                     const GalleryManifest& manifest,
                                                     const StatementTaxonomy& taxonomy);

// Dot product with ascending-index summation in double precision.
double dot(std::span<const double> x, std::span<const double> y);

SimilarityTable similarity_table(std::span<const StatementVector> statements,
                                 const EmbeddingMatrix& gallery);

SimilarityMatrices similarity_matrices(std::span<const StatementVector> statements,
                                       const EmbeddingMatrix& gallery_a,
                                       const EmbeddingMatrix& gallery_b);

// Bias from cached similarity rows: mean(sims_a) - mean(sims_b).
AssociationResult bias_from_similarities(std::string statement_id,
                                         std::span<const double> sims_a,
                                         std::span<const double> sims_b);

AssociationResult bias_score(const StatementVector& statement, const EmbeddingMatrix& gallery_a,
                             const EmbeddingMatrix& gallery_b);

std::vector<AssociationResult> bias_all(std::span<const StatementVector> statements,
                                        const EmbeddingMatrix& gallery_a,
                                        const EmbeddingMatrix& gallery_b);

std::vector<AssociationResult> bias_all(std::span<const StatementVector> statements,
                                        const SimilarityMatrices& sims);

}  // namespace embaudit
