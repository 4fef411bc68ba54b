#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "embaudit/association.hpp"
#include "embaudit/embedding_io.hpp"
#include "embaudit/error.hpp"
#include "embaudit/report.hpp"
#include "embaudit/resampling.hpp"
#include "embaudit/taxonomy.hpp"

namespace py = pybind11;
using namespace embaudit;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

EmbeddingMatrix to_matrix(const Array& array) {
    if (array.ndim() == 1) {
        return EmbeddingMatrix(1, static_cast<std::size_t>(array.shape(0)),
                               std::vector<double>(array.data(), array.data() + array.size()));
    }
    if (array.ndim() != 2) throw ValidationError("expected a 2-D array");
    return EmbeddingMatrix(static_cast<std::size_t>(array.shape(0)),
                           static_cast<std::size_t>(array.shape(1)),
                           std::vector<double>(array.data(), array.data() + array.size()));
}

Array from_matrix(const EmbeddingMatrix& m) {
    Array out({m.count(), m.dim()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

Array from_table(const SimilarityTable& t) {
    Array out({t.rows, t.cols});
    std::copy(t.values.begin(), t.values.end(), out.mutable_data());
    return out;
}

std::vector<StatementVector> to_statements(const Array& array) {
    const auto m = to_matrix(array);
    std::vector<StatementVector> out;
    for (std::size_t r = 0; r < m.count(); ++r) {
        auto row = m.row(r);
        out.push_back({"s" + std::to_string(r), {row.begin(), row.end()}, 1});
    }
    return out;
}

py::dict manifest_to_dict(const GalleryManifest& m) {
    py::list items;
    for (const auto& item : m.items) {
        py::dict d;
        d["id"] = item.id;
        if (item.group) d["group"] = *item.group;
        if (item.statement_id) d["statement_id"] = *item.statement_id;
        if (item.template_index) d["template_index"] = *item.template_index;
        items.append(d);
    }
    py::dict d;
    d["version"] = m.version;
    d["role"] = std::string(to_string(m.role));
    d["model_id"] = m.model_id;
    d["dtype"] = m.dtype_tag;
    d["data_file"] = m.data_file;
    if (m.claims_normalized) d["normalized"] = *m.claims_normalized;
    d["items"] = items;
    return d;
}

GalleryManifest manifest_from_dict(const py::dict& d) {
    GalleryManifest m;
    if (d.contains("version")) m.version = d["version"].cast<std::string>();
    m.role = parse_role(d["role"].cast<std::string>());
    if (d.contains("model_id")) m.model_id = d["model_id"].cast<std::string>();
    if (d.contains("data_file")) m.data_file = d["data_file"].cast<std::string>();
    if (d.contains("normalized")) m.claims_normalized = d["normalized"].cast<bool>();
    for (auto handle : d["items"].cast<py::list>()) {
        auto item = handle.cast<py::dict>();
        ItemRecord r;
        r.id = item["id"].cast<std::string>();
        if (item.contains("group")) r.group = item["group"].cast<std::string>();
        if (item.contains("statement_id")) r.statement_id = item["statement_id"].cast<std::string>();
        if (item.contains("template_index")) r.template_index = item["template_index"].cast<std::size_t>();
        m.items.push_back(std::move(r));
    }
    return m;
}

py::dict null_to_dict(const NullCalibration& c) {
    py::dict d;
    d["trials"] = c.trials;
    d["observed_mean_abs_bias"] = c.observed_mean_abs_bias;
    d["null_mean_abs_bias"] = c.null_mean_abs_bias;
    d["q05"] = c.q05;
    d["q50"] = c.q50;
    d["q95"] = c.q95;
    d["ratio"] = c.ratio;
    d["degenerate"] = c.degenerate;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Group-association audit for contrastive image-text embeddings";
    m.attr("__version__") = std::string(kToolVersion);

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def("load_embeddings", [](const std::filesystem::path& path) {
        auto [matrix, manifest] = load_embeddings(path);
        return py::make_tuple(from_matrix(matrix), manifest_to_dict(manifest));
    }, py::arg("path"));

    m.def("save_embeddings", [](const Array& data, const py::dict& manifest,
                                const std::filesystem::path& path) {
        save_embeddings(to_matrix(data), manifest_from_dict(manifest), path);
    }, py::arg("data"), py::arg("manifest"), py::arg("path"));

    m.def("expand_prompts", [](const std::filesystem::path& taxonomy_path) {
        std::vector<std::tuple<std::string, std::size_t, std::string>> out;
        for (auto& p : expand_prompts(load_taxonomy(taxonomy_path))) {
            out.emplace_back(p.statement_id, p.template_index, p.text);
        }
        return out;
    }, py::arg("taxonomy_path"));

    m.def("l2_normalize", [](const Array& data) { return from_matrix(l2_normalize(to_matrix(data))); },
          py::arg("data"));

    m.def("average_templates", [](const Array& per_template) {
        const auto mat = to_matrix(per_template);
        std::vector<std::vector<double>> rows;
        for (std::size_t r = 0; r < mat.count(); ++r) rows.emplace_back(mat.row(r).begin(), mat.row(r).end());
        const auto v = average_templates("statement", rows);
        Array out(static_cast<py::ssize_t>(v.vector.size()));
        std::copy(v.vector.begin(), v.vector.end(), out.mutable_data());
        return out;
    }, py::arg("per_template"));

    m.def("similarity_matrices", [](const Array& statements, const Array& gallery_a, const Array& gallery_b) {
        const auto sims = similarity_matrices(to_statements(statements), to_matrix(gallery_a), to_matrix(gallery_b));
        return py::make_tuple(from_table(sims.a), from_table(sims.b));
    }, py::arg("statements"), py::arg("gallery_a"), py::arg("gallery_b"));

    m.def("bias_all", [](const Array& statements, const Array& gallery_a, const Array& gallery_b) {
        const auto results = bias_all(to_statements(statements), to_matrix(gallery_a), to_matrix(gallery_b));
        Array bias(static_cast<py::ssize_t>(results.size()));
        for (std::size_t i = 0; i < results.size(); ++i) bias.mutable_data()[i] = results[i].bias;
        return bias;
    }, py::arg("statements"), py::arg("gallery_a"), py::arg("gallery_b"),
       "Mean similarity to gallery A minus mean similarity to gallery B, per statement row.");

    m.def("bootstrap_statement_ci", [](const Array& statement, const Array& gallery_a, const Array& gallery_b,
                                       std::size_t resamples, double confidence, std::uint64_t seed) {
        const auto s = to_statements(statement);
        const auto ci = bootstrap_statement_ci(s.at(0), to_matrix(gallery_a), to_matrix(gallery_b),
                                               {resamples, confidence, seed});
        return py::make_tuple(ci.low, ci.high, ci.point);
    }, py::arg("statement"), py::arg("gallery_a"), py::arg("gallery_b"), py::arg("resamples") = 1000,
       py::arg("confidence") = 0.95, py::arg("seed") = 0);

    m.def("bootstrap_category_ci", [](const std::vector<double>& biases, std::size_t resamples,
                                      double confidence, std::uint64_t seed, const std::string& category) {
        std::vector<AssociationResult> results;
        for (std::size_t i = 0; i < biases.size(); ++i) results.push_back({"s" + std::to_string(i), biases[i], 0, 0});
        const auto c = bootstrap_category_ci(category, results, {resamples, confidence, seed});
        py::dict d;
        d["category"] = c.category;
        d["mean_bias"] = c.mean_bias;
        d["ci"] = py::make_tuple(c.ci.low, c.ci.high);
        d["direction"] = std::string(to_string(c.direction));
        d["insufficient"] = c.insufficient;
        return d;
    }, py::arg("biases"), py::arg("resamples") = 1000, py::arg("confidence") = 0.95,
       py::arg("seed") = 0, py::arg("category") = "category");

    m.def("label_swap_null", [](const Array& pooled, std::size_t n_a, std::size_t n_b,
                                const Array& statements, std::size_t trials, std::uint64_t seed) {
        return null_to_dict(label_swap_null(to_matrix(pooled), {n_a, n_b}, to_statements(statements), trials, seed));
    }, py::arg("pooled"), py::arg("n_a"), py::arg("n_b"), py::arg("statements"),
       py::arg("trials") = 1000, py::arg("seed") = 0,
       "Rows [0, n_a) of `pooled` are group A, the rest group B.");

    m.def("ratio_table", [](const std::vector<std::tuple<std::string, double, double>>& models) {
        std::vector<std::pair<std::string, NullCalibration>> in;
        for (const auto& [name, observed, null] : models) in.emplace_back(name, calibration_from_means(observed, null));
        std::vector<std::tuple<std::string, std::string, std::string, std::string, bool>> out;
        for (const auto& r : observed_vs_null_report(in)) out.emplace_back(r.model, r.observed, r.null_mean, r.ratio, r.degenerate);
        return out;
    }, py::arg("models"), "(model, observed, null) triples -> two-decimal table rows.");

    m.def("top_k", [](const std::vector<std::string>& ids, const std::vector<double>& biases, std::size_t k) {
        if (ids.size() != biases.size()) throw ValidationError("ids and biases differ in length");
        std::vector<AssociationResult> results;
        for (std::size_t i = 0; i < ids.size(); ++i) results.push_back({ids[i], biases[i], 0, 0});
        const auto top = top_k_statements(results, k);
        std::vector<std::string> a, b;
        for (const auto& r : top.top_a) a.push_back(r.statement_id);
        for (const auto& r : top.top_b) b.push_back(r.statement_id);
        return py::make_tuple(a, b);
    }, py::arg("ids"), py::arg("biases"), py::arg("k"));

    m.def("run_audit", [](const std::filesystem::path& images, const std::filesystem::path& texts,
                          const std::filesystem::path& taxonomy, const std::string& group_a,
                          const std::string& group_b, std::size_t bootstrap, std::size_t null_trials,
                          double confidence, std::size_t top_k, std::uint64_t seed,
                          const std::string& out_dir, const std::string& formats) {
        AuditConfig config;
        config.image_path = images;
        config.text_path = texts;
        config.taxonomy_path = taxonomy;
        config.group_a_label = group_a;
        config.group_b_label = group_b;
        config.bootstrap = {bootstrap, confidence, seed};
        config.null_trials = null_trials;
        config.top_k = top_k;
        config.output_dir = out_dir;
        config.formats = parse_formats(formats);
        AuditReport report;
        {
            py::gil_scoped_release release;
            report = run_audit(config);
            if (!out_dir.empty()) write_report(report);
        }
        return report_json(report);
    }, py::arg("images"), py::arg("texts"), py::arg("taxonomy"), py::arg("group_a"), py::arg("group_b"),
       py::arg("bootstrap") = 1000, py::arg("null_trials") = 1000, py::arg("confidence") = 0.95,
       py::arg("top_k") = 25, py::arg("seed") = 0, py::arg("out_dir") = "", py::arg("formats") = "json,csv,md",
       "Runs an audit and returns the report JSON text; writes files when out_dir is given.");

    m.def("validate", [](const std::vector<std::filesystem::path>& paths) {
        const auto summary = cmd_validate(paths);
        return py::make_tuple(summary.all_valid(), summary.render());
    }, py::arg("paths"));
}
