#include "embaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "embaudit/embedding_io.hpp"
#include "embaudit/error.hpp"
#include "embaudit/json_writer.hpp"
#include "embaudit/parallel.hpp"
#include "embaudit/random.hpp"

namespace embaudit {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<ReportFormat> parse_formats(std::string_view list) {
    std::vector<ReportFormat> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto end = std::min(list.find(',', start), list.size());
        const auto name = list.substr(start, end - start);
        ReportFormat f;
        if (name == "json") f = ReportFormat::Json;
        else if (name == "csv") f = ReportFormat::Csv;
        else if (name == "md") f = ReportFormat::Markdown;
        else throw ValidationError("unknown report format '" + std::string(name) + "'");
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
        start = end + 1;
    }
    return out;
}

namespace {

std::vector<std::string> item_ids(const GalleryManifest& manifest) {
    std::vector<std::string> ids;
    ids.reserve(manifest.items.size());
    for (const auto& item : manifest.items) ids.push_back(item.id);
    return ids;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string direction_label(Direction d, const AuditConfig& config) {
    switch (d) {
        case Direction::ALeaning: return config.group_a_label;
        case Direction::BLeaning: return config.group_b_label;
        case Direction::Indeterminate: break;
    }
    return "indeterminate";
}

void check_config(const AuditConfig& config, std::vector<std::string>& warnings) {
    if (config.group_a_label.empty() || config.group_b_label.empty()) {
        throw ValidationError("both --group-a and --group-b are required");
    }
    if (config.group_a_label == config.group_b_label) {
        throw ValidationError("group A and group B labels must differ");
    }
    if (auto w = check_bootstrap_config(config.bootstrap); !w.empty()) warnings.push_back(w);
    if (config.null_trials < kMinReportedResamples) {
        throw ValidationError("null model needs at least " +
                              std::to_string(kMinReportedResamples) + " trials");
    }
    if (config.top_k == 0) throw ValidationError("top-k must be positive");
}

}  // namespace

AuditReport run_audit(const AuditConfig& config) {
    AuditReport report;
    report.config = config;
    check_config(config, report.warnings);

    const auto taxonomy = load_taxonomy(config.taxonomy_path);
    auto [images_raw, image_manifest] = load_embeddings(config.image_path);
    auto [texts_raw, text_manifest] = load_embeddings(config.text_path);
    if (image_manifest.role != ManifestRole::Image) {
        throw ValidationError("'" + config.image_path.string() + "' is not an image manifest");
    }
    if (text_manifest.role != ManifestRole::Text) {
        throw ValidationError("'" + config.text_path.string() + "' is not a text manifest");
    }
    if (images_raw.dim() != texts_raw.dim()) {
        throw ValidationError("image dim " + std::to_string(images_raw.dim()) +
                              " != text dim " + std::to_string(texts_raw.dim()));
    }

    // split_by_group enforces exactly two groups with >=2 rows each.
    split_by_group(images_raw, image_manifest);
    const auto groups = group_rows(image_manifest);
    for (const auto* label : {&config.group_a_label, &config.group_b_label}) {
        if (!groups.contains(*label)) {
            std::vector<std::string> found;
            for (const auto& [name, rows] : groups) found.push_back(name);
            throw ValidationError("group label '" + *label + "' not in image manifest (found: " +
                                  join(found, ", ") + ")");
        }
    }
    const auto& rows_a = groups.at(config.group_a_label);
    const auto& rows_b = groups.at(config.group_b_label);
    if (rows_a.size() != rows_b.size()) {
        report.warnings.push_back("group imbalance: " + config.group_a_label + "=" +
                                  std::to_string(rows_a.size()) + ", " + config.group_b_label +
                                  "=" + std::to_string(rows_b.size()));
    }

    const auto image_ids = item_ids(image_manifest);
    const auto text_ids = item_ids(text_manifest);
    const EmbeddingMatrix images = l2_normalize(images_raw, image_ids);
    const EmbeddingMatrix texts = l2_normalize(texts_raw, text_ids);
    const EmbeddingMatrix gallery_a = images.select_rows(rows_a);
    const EmbeddingMatrix gallery_b = images.select_rows(rows_b);
    const auto vectors = build_statement_vectors(texts, text_manifest, taxonomy);

    report.image_model_id = image_manifest.model_id;
    report.text_model_id = text_manifest.model_id;
    report.dim = images.dim();
    report.n_a = gallery_a.count();
    report.n_b = gallery_b.count();

    const auto sims = similarity_matrices(vectors, gallery_a, gallery_b);
    const auto results = bias_all(vectors, sims);
    const GalleryStreams streams{fnv1a64(config.group_a_label), fnv1a64(config.group_b_label)};

    std::vector<ConfidenceInterval> cis(vectors.size());
    parallel_for(vectors.size(), [&](std::size_t s) {
        cis[s] = bootstrap_statement_ci(sims.a.row(s), sims.b.row(s), config.bootstrap,
                                        fnv1a64(vectors[s].statement_id), streams);
    });

    // Pool both galleries in file order; the mask carries the true labels.
    std::vector<std::size_t> pooled_rows;
    std::vector<std::uint8_t> is_a;
    for (std::size_t r = 0; r < image_manifest.items.size(); ++r) {
        const auto& g = *image_manifest.items[r].group;
        if (g == config.group_a_label || g == config.group_b_label) {
            pooled_rows.push_back(r);
            is_a.push_back(g == config.group_a_label ? 1 : 0);
        }
    }
    const auto pooled = similarity_table(vectors, images.select_rows(pooled_rows));
    report.null = label_swap_null(pooled, {rows_a.size(), rows_b.size()}, config.null_trials,
                                  config.bootstrap.seed, is_a, streams);

    const auto& statements = taxonomy.statements();
    for (std::size_t s = 0; s < statements.size(); ++s) {
        StatementRow row;
        row.statement = statements[s];
        row.template_count = vectors[s].template_count;
        row.association = results[s];
        row.ci = cis[s];
        row.null_standardized = report.null.degenerate
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : results[s].bias / report.null.null_mean_abs_bias;
        report.statements.push_back(std::move(row));
    }

    for (const auto& category : taxonomy.categories()) {
        std::vector<AssociationResult> members;
        for (std::size_t idx : taxonomy.members(category)) members.push_back(results[idx]);
        report.categories.push_back(bootstrap_category_ci(category, members, config.bootstrap));
        if (report.categories.back().insufficient) {
            report.warnings.push_back("category '" + category +
                                      "' has fewer than 2 statements; point estimate only");
        }
    }

    report.top_k = std::min(config.top_k, results.size());
    if (report.top_k < config.top_k) {
        report.warnings.push_back("top-k clamped from " + std::to_string(config.top_k) + " to " +
                                  std::to_string(report.top_k));
    }
    report.top = top_k_statements(results, report.top_k);
    return report;
}

std::string report_json(const AuditReport& r) {
    const auto& c = r.config;
    JsonWriter w;
    w.begin_object();
    w.field("format", kReportVersion);
    w.field("tool", kToolName);
    w.field("tool_version", kToolVersion);
    w.field("seed", static_cast<std::size_t>(c.bootstrap.seed));

    w.key("config").begin_object();
    w.field("images", c.image_path.generic_string());
    w.field("texts", c.text_path.generic_string());
    w.field("taxonomy", c.taxonomy_path.generic_string());
    w.field("group_a", c.group_a_label);
    w.field("group_b", c.group_b_label);
    w.field("bootstrap_resamples", c.bootstrap.resamples);
    w.field("confidence", c.bootstrap.confidence);
    w.field("null_trials", c.null_trials);
    w.field("top_k", c.top_k);
    w.field("template_averaging", "arithmetic mean, re-normalized to unit length");
    w.field("ci_method", "percentile bootstrap");
    w.field("percentile_definition", "linear interpolation between order statistics, inclusive");
    w.field("null_aggregation", "mean |bias| over statements, then mean over trials");
    w.field("rng", "xoshiro256** with splitmix64-derived substreams");
    w.end_object();

    w.key("inputs").begin_object();
    w.field("image_model_id", r.image_model_id);
    w.field("text_model_id", r.text_model_id);
    w.field("dim", r.dim);
    w.field("n_a", r.n_a);
    w.field("n_b", r.n_b);
    w.field("statements", r.statements.size());
    w.field("categories", r.categories.size());
    w.end_object();

    w.key("statements").begin_array();
    for (const auto& s : r.statements) {
        w.begin_object();
        w.field("id", s.statement.id);
        w.field("text", s.statement.text);
        w.field("category", s.statement.category);
        w.field("kind", to_string(s.statement.kind));
        w.field("template_count", s.template_count);
        w.field("bias", s.association.bias);
        w.field("mean_sim_a", s.association.mean_sim_a);
        w.field("mean_sim_b", s.association.mean_sim_b);
        w.field("ci_low", s.ci.low);
        w.field("ci_high", s.ci.high);
        w.field("null_standardized", s.null_standardized);
        w.end_object();
    }
    w.end_array();

    w.key("categories").begin_array();
    for (const auto& cat : r.categories) {
        w.begin_object();
        w.field("category", cat.category);
        w.field("statements", cat.statements);
        w.field("mean_bias", cat.mean_bias);
        w.field("ci_low", cat.ci.low);
        w.field("ci_high", cat.ci.high);
        w.field("direction", to_string(cat.direction));
        w.field("direction_label", direction_label(cat.direction, c));
        w.field("insufficient", cat.insufficient);
        w.end_object();
    }
    w.end_array();

    w.key("null").begin_object();
    w.field("trials", r.null.trials);
    w.field("observed_mean_abs_bias", r.null.observed_mean_abs_bias);
    w.field("null_mean_abs_bias", r.null.null_mean_abs_bias);
    w.field("q05", r.null.q05);
    w.field("q50", r.null.q50);
    w.field("q95", r.null.q95);
    w.field("ratio", r.null.ratio);
    w.field("degenerate", r.null.degenerate);
    w.end_object();

    auto ranked = [&](std::string_view name, const std::vector<AssociationResult>& list) {
        w.key(name).begin_array();
        for (std::size_t i = 0; i < list.size(); ++i) {
            w.begin_object();
            w.field("rank", i + 1);
            w.field("id", list[i].statement_id);
            const auto it = std::find_if(r.statements.begin(), r.statements.end(), [&](const auto& s) {
                return s.statement.id == list[i].statement_id;
            });
            w.field("text", it->statement.text);
            w.field("bias", list[i].bias);
            w.end_object();
        }
        w.end_array();
    };
    w.key("top_k").begin_object();
    w.field("k", r.top_k);
    ranked("a", r.top.top_a);
    ranked("b", r.top.top_b);
    w.end_object();

    w.key("warnings").begin_array();
    for (const auto& warning : r.warnings) w.value(warning);
    w.end_array();
    w.end_object();
    return w.str();
}

std::string statements_csv(const AuditReport& r) {
    std::string out = "id,text,category,kind,template_count,bias,mean_sim_a,mean_sim_b,ci_low,ci_high,"
                      "null_standardized\n";
    for (const auto& s : r.statements) {
        out += csv_field(s.statement.id) + ',' + csv_field(s.statement.text) + ',' +
               csv_field(s.statement.category) + ',' + std::string(to_string(s.statement.kind)) +
               ',' + std::to_string(s.template_count) + ',' + format_g17(s.association.bias) +
               ',' + format_g17(s.association.mean_sim_a) + ',' +
               format_g17(s.association.mean_sim_b) + ',' + format_g17(s.ci.low) + ',' +
               format_g17(s.ci.high) + ',' +
               (std::isfinite(s.null_standardized) ? format_g17(s.null_standardized) : "") + '\n';
    }
    return out;
}

std::string categories_csv(const AuditReport& r) {
    std::string out = "category,statements,mean_bias,ci_low,ci_high,direction,direction_label\n";
    for (const auto& c : r.categories) {
        out += csv_field(c.category) + ',' + std::to_string(c.statements) + ',' +
               format_g17(c.mean_bias) + ',' + format_g17(c.ci.low) + ',' +
               format_g17(c.ci.high) + ',' + std::string(to_string(c.direction)) + ',' +
               csv_field(direction_label(c.direction, r.config)) + '\n';
    }
    return out;
}

std::string report_markdown(const AuditReport& r) {
    const auto& c = r.config;
    const auto pct = format_fixed(c.bootstrap.confidence * 100.0, 0);
    std::ostringstream md;
    md << "# Embedding association audit\n\n";
    md << "- Image model: `" << r.image_model_id << "` (" << c.group_a_label << ": " << r.n_a
       << ", " << c.group_b_label << ": " << r.n_b << ")\n";
    md << "- Text model: `" << r.text_model_id << "`, " << r.statements.size() << " statements in "
       << r.categories.size() << " categories\n";
    md << "- Bias = mean similarity to " << c.group_a_label << " minus mean similarity to "
       << c.group_b_label << " (positive = " << c.group_a_label << "-leaning)\n";
    md << "- Bootstrap: " << c.bootstrap.resamples << " resamples, " << pct
       << "% percentile intervals; null: " << c.null_trials << " label-swap trials; seed "
       << c.bootstrap.seed << "\n\n";

    md << "## Observed vs. null model bias\n\n";
    md << "| Model | Observed | Null | Ratio |\n|---|---|---|---|\n";
    const std::pair<std::string, NullCalibration> model{r.image_model_id, r.null};
    for (const auto& row : observed_vs_null_report(std::span(&model, 1))) {
        md << "| " << row.model << " | " << row.observed << " | " << row.null_mean << " | "
           << row.ratio << (row.degenerate ? " (degenerate)" : "") << " |\n";
    }
    md << "\nNull distribution of mean |bias|: q05 " << format_fixed(r.null.q05, 4) << ", q50 "
       << format_fixed(r.null.q50, 4) << ", q95 " << format_fixed(r.null.q95, 4) << ".\n\n";

    md << "## Category-level bias\n\n";
    md << "| Category | Bias | " << pct << "% CI | Direction |\n|---|---|---|---|\n";
    for (const auto& cat : r.categories) {
        md << "| " << cat.category << " | " << format_fixed(cat.mean_bias, 3) << " | ["
           << format_fixed(cat.ci.low, 3) << ", " << format_fixed(cat.ci.high, 3) << "] | "
           << direction_label(cat.direction, c) << (cat.insufficient ? " (n<2)" : "") << " |\n";
    }

    auto ranked = [&](const std::string& label, const std::vector<AssociationResult>& list) {
        md << "\n## Top " << list.size() << " " << label << "-associated statements\n\n";
        md << "| Rank | Statement | Bias |\n|---|---|---|\n";
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto it = std::find_if(r.statements.begin(), r.statements.end(), [&](const auto& s) {
                return s.statement.id == list[i].statement_id;
            });
            md << "| " << i + 1 << " | " << it->statement.text << " | "
               << format_fixed(list[i].bias, 4) << " |\n";
        }
    };
    ranked(c.group_a_label, r.top.top_a);
    ranked(c.group_b_label, r.top.top_b);

    if (!r.warnings.empty()) {
        md << "\n## Warnings\n\n";
        for (const auto& warning : r.warnings) md << "- " << warning << "\n";
    }
    return md.str();
}

std::vector<fs::path> write_report(const AuditReport& report) {
    const auto& dir = report.config.output_dir;
    std::vector<std::pair<fs::path, std::string>> outputs;
    for (auto f : report.config.formats) {
        switch (f) {
            case ReportFormat::Json:
                outputs.emplace_back(dir / "report.json", report_json(report));
                break;
            case ReportFormat::Csv:
                outputs.emplace_back(dir / "statements.csv", statements_csv(report));
                outputs.emplace_back(dir / "categories.csv", categories_csv(report));
                break;
            case ReportFormat::Markdown:
                outputs.emplace_back(dir / "report.md", report_markdown(report));
                break;
        }
    }

    std::vector<fs::path> written;
    try {
        if (!dir.empty()) fs::create_directories(dir);
        for (const auto& [path, text] : outputs) {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            written.push_back(path);
            out << text;
            out.close();
            if (!out) throw ValidationError("failed writing '" + path.string() + "'");
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& path : written) fs::remove(path, ec);
        throw;
    }
    return written;
}

AuditReport cmd_run(const AuditConfig& config) {
    AuditReport report = run_audit(config);
    write_report(report);
    return report;
}

// --- validate ---------------------------------------------------------------

bool FileValidation::valid() const {
    return std::none_of(lines.begin(), lines.end(),
                        [](const ValidationLine& l) { return l.severity == Severity::Error; });
}

bool ValidationSummary::all_valid() const {
    return std::all_of(files.begin(), files.end(), [](const auto& f) { return f.valid(); });
}

std::string ValidationSummary::render() const {
    std::string out;
    for (const auto& f : files) {
        for (const auto& line : f.lines) {
            const char* tag = line.severity == Severity::Ok     ? "OK   "
                              : line.severity == Severity::Warn ? "WARN "
                                                                : "ERROR";
            out += std::string(tag) + " " + f.path.generic_string() + ": " + line.message + "\n";
        }
    }
    return out;
}

namespace {

void validate_embedding_file(const fs::path& path, FileValidation& fv) {
    auto [matrix, manifest] = load_embeddings(path);
    fv.lines.push_back({Severity::Ok, std::string(kFormatVersion) + " " +
                                          std::string(to_string(manifest.role)) + " model=" +
                                          manifest.model_id + " count=" +
                                          std::to_string(matrix.count()) +
                                          " dim=" + std::to_string(matrix.dim())});

    std::vector<std::string> off_unit;
    std::vector<std::string> zero;
    for (std::size_t r = 0; r < matrix.count(); ++r) {
        const double n = matrix.row_norm(r);
        if (n <= kZeroNorm) zero.push_back(manifest.items[r].id);
        if (std::abs(n - 1.0) > kStoredNormTolerance) off_unit.push_back(manifest.items[r].id);
    }
    if (!zero.empty()) {
        fv.lines.push_back({Severity::Error, "zero-norm rows: " + join(zero, ", ")});
    }
    if (manifest.claims_normalized.value_or(false)) {
        if (off_unit.empty()) {
            fv.lines.push_back({Severity::Ok, "norms within 1e-4 of 1"});
        } else {
            fv.lines.push_back({Severity::Warn, "norm violation in " +
                                                    std::to_string(off_unit.size()) +
                                                    " rows: " + join(off_unit, ", ")});
        }
    } else if (!off_unit.empty()) {
        fv.lines.push_back({Severity::Ok, std::to_string(off_unit.size()) +
                                              " rows not unit-norm; normalized at audit time"});
    }

    if (manifest.role == ManifestRole::Image) {
        const auto groups = group_rows(manifest);
        std::vector<std::string> parts;
        std::size_t smallest = matrix.count();
        std::size_t largest = 0;
        for (const auto& [label, rows] : groups) {
            parts.push_back(label + "=" + std::to_string(rows.size()));
            smallest = std::min(smallest, rows.size());
            largest = std::max(largest, rows.size());
        }
        const auto summary = join(parts, ", ");
        if (groups.size() != 2 || smallest < 2) {
            fv.lines.push_back({Severity::Error,
                                "need exactly two groups with >=2 items (" + summary + ")"});
        } else if (smallest != largest) {
            fv.lines.push_back({Severity::Warn, "group imbalance (" + summary + ")"});
        } else {
            fv.lines.push_back({Severity::Ok, "groups balanced (" + summary + ")"});
        }
    } else {
        std::map<std::string, std::size_t> per_statement;
        for (const auto& item : manifest.items) ++per_statement[*item.statement_id];
        fv.lines.push_back({Severity::Ok, std::to_string(per_statement.size()) + " statements"});
    }
}

void validate_taxonomy_file(const fs::path& path, FileValidation& fv) {
    const auto taxonomy = load_taxonomy(path);
    std::vector<std::string> parts;
    for (const auto& c : taxonomy.categories()) {
        parts.push_back(c + "=" + std::to_string(taxonomy.members(c).size()));
    }
    fv.lines.push_back({Severity::Ok, std::string(kTaxonomyVersion) + " " +
                                          std::to_string(taxonomy.statements().size()) +
                                          " statements, " +
                                          std::to_string(taxonomy.templates().size()) +
                                          " templates (" + join(parts, ", ") + ")"});
}

}  // namespace

ValidationSummary cmd_validate(const std::vector<fs::path>& paths) {
    ValidationSummary summary;
    for (const auto& path : paths) {
        FileValidation fv{path, {}};
        try {
            if (path.extension() == ".csv") {
                validate_embedding_file(path, fv);
            } else {
                std::ifstream in(path);
                if (!in) throw ValidationError("cannot open file");
                json doc;
                try {
                    doc = json::parse(in);
                } catch (const json::exception& e) {
                    throw ValidationError(std::string("not valid JSON: ") + e.what());
                }
                if (doc.contains("statements") && doc.contains("categories")) {
                    validate_taxonomy_file(path, fv);
                } else if (doc.contains("items")) {
                    validate_embedding_file(path, fv);
                } else {
                    throw ValidationError("neither an embedding manifest nor a taxonomy");
                }
            }
        } catch (const std::exception& e) {
            fv.lines.push_back({Severity::Error, e.what()});
        }
        summary.files.push_back(std::move(fv));
    }
    return summary;
}

// --- plotdata / compare -----------------------------------------------------

namespace {

json read_report(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open report '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("corrupt report '" + path.string() + "': " + e.what());
    }
}

const json& section(const json& doc, const char* name) {
    if (!doc.contains(name) || doc[name].empty()) {
        throw ValidationError(std::string("report missing ") + name);
    }
    return doc[name];
}

double number_or_nan(const json& j) {
    return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

PlotKind parse_plot_kind(std::string_view kind) {
    if (kind == "category") return PlotKind::Category;
    if (kind == "topk") return PlotKind::TopK;
    throw ValidationError("unknown plot kind '" + std::string(kind) + "'");
}

std::string cmd_plotdata(const fs::path& report_path, PlotKind kind) {
    const json doc = read_report(report_path);
    std::string out;
    if (kind == PlotKind::Category) {
        out = "category,mean_bias,ci_low,ci_high\n";
        for (const auto& c : section(doc, "categories")) {
            out += csv_field(c.at("category").get<std::string>()) + ',' +
                   format_g17(number_or_nan(c.at("mean_bias"))) + ',' +
                   format_g17(number_or_nan(c.at("ci_low"))) + ',' +
                   format_g17(number_or_nan(c.at("ci_high"))) + '\n';
        }
        return out;
    }
    const auto& top = section(doc, "top_k");
    const auto& config = section(doc, "config");
    out = "rank,statement,bias,direction\n";
    for (const auto& [side, label_key] : {std::pair{"a", "group_a"}, std::pair{"b", "group_b"}}) {
        const auto label = config.at(label_key).get<std::string>();
        for (const auto& e : top.at(side)) {
            out += std::to_string(e.at("rank").get<std::size_t>()) + ',' +
                   csv_field(e.at("text").get<std::string>()) + ',' +
                   format_g17(number_or_nan(e.at("bias"))) + ',' + csv_field(label) + '\n';
        }
    }
    return out;
}

ComparisonTable cmd_compare(const std::vector<fs::path>& report_paths) {
    if (report_paths.size() < 2) throw ValidationError("compare needs at least two reports");
    ComparisonTable table;
    std::vector<std::pair<std::string, std::string>> reference;
    for (std::size_t i = 0; i < report_paths.size(); ++i) {
        const json doc = read_report(report_paths[i]);
        const auto& statements = section(doc, "statements");
        const auto& categories = section(doc, "categories");

        std::vector<std::pair<std::string, std::string>> shape;
        double abs_sum = 0.0;
        for (const auto& s : statements) {
            shape.emplace_back(s.at("id").get<std::string>(), s.at("category").get<std::string>());
            abs_sum += std::abs(s.at("bias").get<double>());
        }
        if (i == 0) {
            reference = shape;
            table.group_a_label = section(doc, "config").at("group_a").get<std::string>();
            table.group_b_label = section(doc, "config").at("group_b").get<std::string>();
        } else if (shape != reference) {
            throw ValidationError("taxonomy mismatch between '" + report_paths[0].string() +
                                  "' and '" + report_paths[i].string() + "'");
        }

        ComparisonRow row;
        row.model = doc.contains("inputs") ? doc["inputs"].value("image_model_id", std::string{})
                                           : std::string{};
        if (row.model.empty()) row.model = report_paths[i].stem().string();
        row.average_abs_bias = abs_sum / static_cast<double>(statements.size());

        bool first = true;
        for (const auto& c : categories) {
            const auto name = c.at("category").get<std::string>();
            const double bias = c.at("mean_bias").get<double>();
            if (first || bias > row.most_a_bias || (bias == row.most_a_bias && name < row.most_a_category)) {
                row.most_a_category = name;
                row.most_a_bias = bias;
            }
            if (first || bias < row.most_b_bias || (bias == row.most_b_bias && name < row.most_b_category)) {
                row.most_b_category = name;
                row.most_b_bias = bias;
            }
            first = false;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

std::string signed2(double v) { return (v >= 0 ? "+" : "") + format_fixed(v, 2); }

}  // namespace

std::string ComparisonTable::markdown() const {
    std::string out = "| Model | Avg. Bias | Most " + group_a_label + " | Most " + group_b_label +
                      " |\n|---|---|---|---|\n";
    for (const auto& r : rows) {
        out += "| " + r.model + " | " + format_fixed(r.average_abs_bias, 2) + " | " +
               r.most_a_category + " (" + signed2(r.most_a_bias) + ") | " + r.most_b_category +
               " (" + signed2(r.most_b_bias) + ") |\n";
    }
    return out;
}

std::string ComparisonTable::csv() const {
    std::string out = "model,average_abs_bias,most_a_category,most_a_bias,most_b_category,most_b_bias\n";
    for (const auto& r : rows) {
        out += csv_field(r.model) + ',' + format_g17(r.average_abs_bias) + ',' +
               csv_field(r.most_a_category) + ',' + format_g17(r.most_a_bias) + ',' +
               csv_field(r.most_b_category) + ',' + format_g17(r.most_b_bias) + '\n';
    }
    return out;
}

}  // namespace embaudit
