#include "embaudit/association.hpp"

#include <cmath>
#include <map>

#include "embaudit/error.hpp"
#include "embaudit/parallel.hpp"

namespace embaudit {

double dot(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) sum += x[k] * y[k];
    return sum;
}

namespace {

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double mean(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

void require_dim(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        throw ValidationError(std::string("dimension mismatch in ") + what + ": " +
                              std::to_string(expected) + " vs " + std::to_string(got));
    }
}

}  // namespace

EmbeddingMatrix l2_normalize(const EmbeddingMatrix& matrix, std::span<const std::string> row_ids) {
    std::vector<double> out(matrix.data().begin(), matrix.data().end());
    const std::size_t dim = matrix.dim();
    for (std::size_t r = 0; r < matrix.count(); ++r) {
        const double n = norm(matrix.row(r));
        if (n <= kZeroNorm) {
            const std::string id = r < row_ids.size() ? row_ids[r] : "#" + std::to_string(r);
            throw NumericError("zero-norm embedding at row '" + id + "'");
        }
        for (std::size_t k = 0; k < dim; ++k) out[r * dim + k] /= n;
    }
    return EmbeddingMatrix(matrix.count(), dim, std::move(out));
}

StatementVector average_templates(std::string statement_id,
                                  std::span<const std::vector<double>> per_template) {
    if (per_template.empty()) {
        throw ValidationError("no template vectors for statement '" + statement_id + "'");
    }
    const std::size_t dim = per_template.front().size();
    std::vector<double> sum(dim, 0.0);
    for (const auto& v : per_template) {
        require_dim(dim, v.size(), "template averaging");
        for (std::size_t k = 0; k < dim; ++k) sum[k] += v[k];
    }
    const double count = static_cast<double>(per_template.size());
    for (double& x : sum) x /= count;
    const double n = norm(sum);
    if (n < kCancellationNorm) {
        throw NumericError("template vectors cancel for statement '" + statement_id + "'");
    }
    for (double& x : sum) x /= n;
    return {std::move(statement_id), std::move(sum), per_template.size()};
}

std::vector<StatementVector> build_statement_vectors(const EmbeddingMatrix& texts,
                                                     const GalleryManifest& manifest,
                                                     const StatementTaxonomy& taxonomy) {
    if (manifest.role != ManifestRole::Text) {
        throw ValidationError("text embeddings need a text manifest");
    }
    if (manifest.items.size() != texts.count()) {
        throw ValidationError("manifest/matrix count mismatch");
    }
    // statement id -> (template index -> row)
    std::map<std::string, std::map<std::size_t, std::size_t>> rows;
    for (std::size_t r = 0; r < manifest.items.size(); ++r) {
        const auto& item = manifest.items[r];
        if (!taxonomy.find(*item.statement_id)) {
            throw ValidationError("text row '" + item.id + "' references unknown statement '" +
                                  *item.statement_id + "'");
        }
        if (*item.template_index >= taxonomy.templates().size()) {
            throw ValidationError("text row '" + item.id + "' has template_index " +
                                  std::to_string(*item.template_index) + " outside the " +
                                  std::to_string(taxonomy.templates().size()) + " templates");
        }
        if (!rows[*item.statement_id].emplace(*item.template_index, r).second) {
            throw ValidationError("duplicate template_index for statement '" +
                                  *item.statement_id + "'");
        }
    }

    std::vector<StatementVector> out;
    out.reserve(taxonomy.statements().size());
    for (const auto& s : taxonomy.statements()) {
        auto it = rows.find(s.id);
        if (it == rows.end()) {
            throw ValidationError("statement '" + s.id + "' has no text embedding");
        }
        std::vector<std::vector<double>> vectors;
        for (const auto& [template_index, r] : it->second) {
            auto row = texts.row(r);
            vectors.emplace_back(row.begin(), row.end());
        }
        out.push_back(average_templates(s.id, vectors));
    }
    return out;
}

SimilarityTable similarity_table(std::span<const StatementVector> statements,
                                 const EmbeddingMatrix& gallery) {
    SimilarityTable table{statements.size(), gallery.count(),
                          std::vector<double>(statements.size() * gallery.count())};
    for (const auto& s : statements) require_dim(gallery.dim(), s.vector.size(), "similarity");
    parallel_for(statements.size(), [&](std::size_t s) {
        for (std::size_t i = 0; i < gallery.count(); ++i) {
            table.values[s * table.cols + i] = dot(statements[s].vector, gallery.row(i));
        }
    });
    return table;
}

SimilarityMatrices similarity_matrices(std::span<const StatementVector> statements,
                                       const EmbeddingMatrix& gallery_a,
                                       const EmbeddingMatrix& gallery_b) {
    require_dim(gallery_a.dim(), gallery_b.dim(), "gallery pair");
    return {similarity_table(statements, gallery_a), similarity_table(statements, gallery_b)};
}

AssociationResult bias_from_similarities(std::string statement_id, std::span<const double> sims_a,
                                         std::span<const double> sims_b) {
    if (sims_a.empty() || sims_b.empty()) throw ValidationError("empty gallery");
    AssociationResult r;
    r.statement_id = std::move(statement_id);
    r.mean_sim_a = mean(sims_a);
    r.mean_sim_b = mean(sims_b);
    r.bias = r.mean_sim_a - r.mean_sim_b;
    return r;
}

AssociationResult bias_score(const StatementVector& statement, const EmbeddingMatrix& gallery_a,
                             const EmbeddingMatrix& gallery_b) {
    if (gallery_a.empty() || gallery_b.empty()) throw ValidationError("empty gallery");
    require_dim(gallery_a.dim(), statement.vector.size(), "bias score");
    require_dim(gallery_b.dim(), statement.vector.size(), "bias score");
    std::vector<double> a(gallery_a.count());
    std::vector<double> b(gallery_b.count());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = dot(statement.vector, gallery_a.row(i));
    for (std::size_t j = 0; j < b.size(); ++j) b[j] = dot(statement.vector, gallery_b.row(j));
    return bias_from_similarities(statement.statement_id, a, b);
}

std::vector<AssociationResult> bias_all(std::span<const StatementVector> statements,
                                        const SimilarityMatrices& sims) {
    if (sims.a.rows != statements.size() || sims.b.rows != statements.size()) {
        throw ValidationError("similarity matrices do not match the statement list");
    }
    std::vector<AssociationResult> out;
    out.reserve(statements.size());
    for (std::size_t s = 0; s < statements.size(); ++s) {
        out.push_back(bias_from_similarities(statements[s].statement_id, sims.a.row(s),
                                             sims.b.row(s)));
    }
    return out;
}

std::vector<AssociationResult> bias_all(std::span<const StatementVector> statements,
                                        const EmbeddingMatrix& gallery_a,
                                        const EmbeddingMatrix& gallery_b) {
    if (gallery_a.empty() || gallery_b.empty()) throw ValidationError("empty gallery");
    return bias_all(statements, similarity_matrices(statements, gallery_a, gallery_b));
}

}  // namespace embaudit
