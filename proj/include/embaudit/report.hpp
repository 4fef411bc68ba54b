#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "embaudit/association.hpp"
#include "embaudit/resampling.hpp"
#include "embaudit/taxonomy.hpp"

namespace embaudit {

inline constexpr std::string_view kToolName = "embed-audit";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kReportVersion = "embed-audit-report/1";

enum class ReportFormat { Json, Csv, Markdown };

std::vector<ReportFormat> parse_formats(std::string_view list);

struct AuditConfig {
    std::filesystem::path image_path;
    std::filesystem::path text_path;
    std::filesystem::path taxonomy_path;
    std::string group_a_label;
    std::string group_b_label;
    BootstrapConfig bootstrap;
    std::size_t null_trials = 1000;
    std::size_t top_k = 25;
    std::filesystem::path output_dir;
    std::vector<ReportFormat> formats{ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown};
};

struct StatementRow {
    Statement statement;
    std::size_t template_count = 1;
    AssociationResult association;
    ConfidenceInterval ci;
    // bias / null mean |bias|; NaN when the null is degenerate.
    double null_standardized = 0.0;
};

struct AuditReport {
    AuditConfig config;
    std::string image_model_id;
    std::string text_model_id;
    std::size_t dim = 0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    std::vector<StatementRow> statements;
    std::vector<CategoryResult> categories;
    NullCalibration null;
    TopK top;
    std::size_t top_k = 0;
    std::vector<std::string> warnings;
};

// Loads and validates every input, then computes the full audit. Touches no
// output files.
AuditReport run_audit(const AuditConfig& config);

std::string report_json(const AuditReport& report);
std::string report_markdown(const AuditReport& report);
std::string statements_csv(const AuditReport& report);
std::string categories_csv(const AuditReport& report);

// Writes the requested formats into config.output_dir and returns the paths.
// On failure, files written so far are removed before rethrowing.
std::vector<std::filesystem::path> write_report(const AuditReport& report);

// run_audit + write_report.
AuditReport cmd_run(const AuditConfig& config);

enum class Severity { Ok, Warn, Error };

struct ValidationLine {
    Severity severity = Severity::Ok;
    std::string message;
};

struct FileValidation {
    std::filesystem::path path;
    std::vector<ValidationLine> lines;

    bool valid() const;
};

struct ValidationSummary {
    std::vector<FileValidation> files;

    bool all_valid() const;
    std::string render() const;
};

// Checks each file independently (embedding manifest, CSV fixture, or
// taxonomy); a failure in one file never stops the others.
ValidationSummary cmd_validate(const std::vector<std::filesystem::path>& paths);

enum class PlotKind { Category, TopK };

PlotKind parse_plot_kind(std::string_view kind);

// Tidy CSV series from a report JSON file.
std::string cmd_plotdata(const std::filesystem::path& report_path, PlotKind kind);

struct ComparisonRow {
    std::string model;
    double average_abs_bias = 0.0;
    std::string most_a_category;
    double most_a_bias = 0.0;
    std::string most_b_category;
    double most_b_bias = 0.0;
};

struct ComparisonTable {
    std::string group_a_label;
    std::string group_b_label;
    std::vector<ComparisonRow> rows;

    std::string markdown() const;
    std::string csv() const;
};

// Average |bias| over statements and the most A- and B-leaning categories
// per report. Reports must share the same statements and categories.
ComparisonTable cmd_compare(const std::vector<std::filesystem::path>& report_paths);

}  // namespace embaudit
