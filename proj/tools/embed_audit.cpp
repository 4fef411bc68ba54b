// embed-audit: command-line front end for the association audit.
//
//   embed-audit run --images I --texts T --taxonomy X --group-a A --group-b B --out DIR
//   embed-audit validate FILE...
//   embed-audit plotdata --report R --kind category|topk
//   embed-audit compare R1 R2 ...
//   embed-audit convert IN.csv OUT.json
//
// Exit codes: 0 success, 2 validation failure, 3 runtime/numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "embaudit/embedding_io.hpp"
#include "embaudit/error.hpp"
#include "embaudit/report.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

void fail_line(std::string_view kind, std::string message) {
    for (char& c : message) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    std::cerr << "embed-audit: error: " << kind << ": " << message << '\n';
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw embaudit::ValidationError("failed writing '" + out_path + "'");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace embaudit;

    CLI::App app{"Group-association audit for contrastive image-text embeddings"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    AuditConfig config;
    std::string formats = "json,csv,md";
    std::string images, texts, taxonomy, out_dir;
    auto* run = app.add_subcommand("run", "Run an end-to-end audit and write reports");
    run->add_option("--images", images, "Image embedding manifest (.json) or CSV")->required();
    run->add_option("--texts", texts, "Text embedding manifest (.json) or CSV")->required();
    run->add_option("--taxonomy", taxonomy, "Statement taxonomy JSON")->required();
    run->add_option("--group-a", config.group_a_label, "Group label in the positive (A) role")
        ->required();
    run->add_option("--group-b", config.group_b_label, "Group label in the negative (B) role")
        ->required();
    run->add_option("--bootstrap", config.bootstrap.resamples, "Bootstrap resamples")
        ->capture_default_str();
    run->add_option("--null-trials", config.null_trials, "Label-swap null trials")
        ->capture_default_str();
    run->add_option("--confidence", config.bootstrap.confidence, "Confidence level")
        ->capture_default_str();
    run->add_option("--top-k", config.top_k, "Statements listed per direction")
        ->capture_default_str();
    run->add_option("--seed", config.bootstrap.seed, "RNG seed")->capture_default_str();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--format", formats, "Comma-separated subset of json,csv,md")
        ->capture_default_str();

    std::vector<std::string> validate_paths;
    auto* validate = app.add_subcommand("validate", "Check embedding and taxonomy files");
    validate->add_option("files", validate_paths, "Files to check")->required();

    std::string report_path, plot_kind, plot_out;
    auto* plotdata = app.add_subcommand("plotdata", "Emit plot-ready CSV from a report");
    plotdata->add_option("--report", report_path, "report.json from a run")->required();
    plotdata->add_option("--kind", plot_kind, "category or topk")->required();
    plotdata->add_option("--out", plot_out, "Write to file instead of stdout");

    std::vector<std::string> compare_paths;
    std::string compare_format = "md", compare_out;
    auto* compare = app.add_subcommand("compare", "Compare reports from several models");
    compare->add_option("reports", compare_paths, "report.json files")->required();
    compare->add_option("--format", compare_format, "md or csv")->capture_default_str();
    compare->add_option("--out", compare_out, "Write to file instead of stdout");

    std::string convert_in, convert_out, convert_model;
    auto* convert = app.add_subcommand("convert", "Convert a CSV fixture to the binary format");
    convert->add_option("input", convert_in, "CSV file")->required();
    convert->add_option("output", convert_out, "Manifest path (.json)")->required();
    convert->add_option("--model-id", convert_model, "model_id to record");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*run) {
            config.image_path = images;
            config.text_path = texts;
            config.taxonomy_path = taxonomy;
            config.output_dir = out_dir;
            config.formats = parse_formats(formats);
            const auto report = run_audit(config);
            const auto written = write_report(report);
            for (const auto& w : report.warnings) std::cerr << "embed-audit: warning: " << w << '\n';
            for (const auto& p : written) std::cout << p.generic_string() << '\n';
        } else if (*validate) {
            std::vector<std::filesystem::path> paths(validate_paths.begin(), validate_paths.end());
            const auto summary = cmd_validate(paths);
            std::cout << summary.render();
            return summary.all_valid() ? 0 : kExitValidation;
        } else if (*plotdata) {
            emit(cmd_plotdata(report_path, parse_plot_kind(plot_kind)), plot_out);
        } else if (*compare) {
            if (compare_format != "md" && compare_format != "csv") {
                throw ValidationError("unknown compare format '" + compare_format + "'");
            }
            std::vector<std::filesystem::path> paths(compare_paths.begin(), compare_paths.end());
            const auto table = cmd_compare(paths);
            emit(compare_format == "md" ? table.markdown() : table.csv(), compare_out);
        } else if (*convert) {
            auto [matrix, manifest] = load_embeddings_csv(convert_in);
            if (!convert_model.empty()) manifest.model_id = convert_model;
            manifest.data_file.clear();
            save_embeddings(matrix, manifest, convert_out);
        }
    } catch (const ValidationError& e) {
        fail_line("validation", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        fail_line("runtime", e.what());
        return kExitRuntime;
    }
    return 0;
}
