#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "embaudit/error.hpp"
#include "embaudit/report.hpp"
#include "test_support.hpp"

using namespace embaudit;
using namespace embaudit::testing;
using nlohmann::json;

namespace {

AuditConfig sample_config(const fs::path& out) {
    AuditConfig c;
    const fs::path data = data_dir();
    c.image_path = data / "sample" / "images.csv";
    c.text_path = data / "sample" / "texts.csv";
    c.taxonomy_path = data / "sample" / "taxonomy.json";
    c.group_a_label = "male";
    c.group_b_label = "female";
    c.bootstrap = {1000, 0.95, 7};
    c.null_trials = 1000;
    c.output_dir = out;
    return c;
}

// Synthetic audit over `statements` statements in `categories` categories,
// with per-category offsets along one axis.
struct Synthetic {
    fs::path images, texts, taxonomy;
};

Synthetic write_synthetic(const TempDir& dir, const std::string& tag, std::size_t statements,
                          const std::vector<std::string>& categories,
                          const std::vector<double>& category_offset, std::uint64_t seed,
                          std::size_t per_group = 10) {
    std::mt19937_64 rng(seed);
    const std::size_t dim = 8;
    std::vector<double> axis(dim, 0.0);
    axis[0] = 1.0;

    Rows images;
    std::vector<std::string> groups;
    for (std::size_t i = 0; i < 2 * per_group; ++i) {
        const bool a = i % 2 == 0;
        std::vector<double> mean(dim, 0.0);
        mean[0] = a ? 1.0 : -1.0;
        images.push_back(unit(gaussian_vector(rng, dim, 0.3, mean)));
        groups.push_back(a ? "a" : "b");
    }
    Rows texts;
    std::vector<std::string> ids;
    std::vector<std::size_t> category_of;
    for (std::size_t s = 0; s < statements; ++s) {
        const std::size_t c = s % categories.size();
        std::vector<double> mean(dim, 0.0);
        mean[0] = category_offset[c];
        texts.push_back(unit(gaussian_vector(rng, dim, 0.2, mean)));
        ids.push_back("st" + std::to_string(s));
        category_of.push_back(c);
    }
    Synthetic out{dir / (tag + "_images.csv"), dir / (tag + "_texts.csv"), dir / (tag + "_taxonomy.json")};
    write_image_csv(out.images, images, groups);
    write_text_csv(out.texts, texts, ids);
    write_taxonomy(out.taxonomy, ids, categories, category_of);
    return out;
}

AuditConfig synthetic_config(const Synthetic& s, const fs::path& out) {
    AuditConfig c;
    c.image_path = s.images;
    c.text_path = s.texts;
    c.taxonomy_path = s.taxonomy;
    c.group_a_label = "a";
    c.group_b_label = "b";
    c.bootstrap = {200, 0.95, 1};
    c.null_trials = 200;
    c.output_dir = out;
    return c;
}

}  // namespace

TEST_CASE("sample fixture audit has the expected shape") {
    TempDir dir;
    const auto report = cmd_run(sample_config(dir.path()));
    CHECK(report.statements.size() == 6);
    CHECK(report.categories.size() == 2);
    CHECK(report.n_a == 4);
    CHECK(report.n_b == 4);
    CHECK(report.null.trials == 1000);
    CHECK(report.top_k == 6);
    for (const auto& name : {"report.json", "report.md", "statements.csv", "categories.csv"}) {
        CHECK(fs::exists(dir / name));
    }
    const auto doc = json::parse(read_text(dir / "report.json"));
    CHECK(doc["statements"].size() == 6);
    CHECK(doc["categories"].size() == 2);
    CHECK(doc["null"]["trials"] == 1000);
    CHECK(doc["config"]["ci_method"] == "percentile bootstrap");
    CHECK(doc["seed"] == 7);
    // The fixture places care statements toward "female" and trades toward "male".
    CHECK(doc["categories"][0]["mean_bias"].get<double>() < 0.0);
    CHECK(doc["categories"][1]["mean_bias"].get<double>() > 0.0);
}

TEST_CASE("report JSON is byte-identical across runs") {
    TempDir dir;
    const auto cfg = sample_config(dir.path());
    const auto first = report_json(run_audit(cfg));
    const auto second = report_json(run_audit(cfg));
    CHECK(first == second);
}

TEST_CASE("swapping the group roles flips every sign") {
    TempDir dir;
    auto cfg = sample_config(dir.path());
    const auto ab = run_audit(cfg);
    std::swap(cfg.group_a_label, cfg.group_b_label);
    const auto ba = run_audit(cfg);
    for (std::size_t s = 0; s < ab.statements.size(); ++s) {
        CHECK(ab.statements[s].association.bias == -ba.statements[s].association.bias);
        CHECK(std::abs(ab.statements[s].ci.low + ba.statements[s].ci.high) < 1e-12);
    }
    for (std::size_t c = 0; c < ab.categories.size(); ++c) {
        CHECK(std::abs(ab.categories[c].mean_bias + ba.categories[c].mean_bias) < 1e-12);
    }
    CHECK(ab.null.null_mean_abs_bias == ba.null.null_mean_abs_bias);
    CHECK(ab.null.observed_mean_abs_bias == ba.null.observed_mean_abs_bias);
}

TEST_CASE("report rows are internally consistent") {
    TempDir dir;
    const auto syn = write_synthetic(dir, "x", 30, {"c0", "c1", "c2"}, {0.5, -0.5, 0.0}, 3);
    auto cfg = synthetic_config(syn, dir / "out");
    cfg.top_k = 5;
    const auto report = cmd_run(cfg);
    const auto doc = json::parse(read_text(dir / "out" / "report.json"));

    for (const auto& cat : doc["categories"]) {
        double sum = 0.0;
        int n = 0;
        for (const auto& s : doc["statements"]) {
            if (s["category"] == cat["category"]) {
                sum += s["bias"].get<double>();
                ++n;
            }
        }
        CHECK(std::abs(cat["mean_bias"].get<double>() - sum / n) < 1e-9);
        const double lo = cat["ci_low"].get<double>();
        const double hi = cat["ci_high"].get<double>();
        const std::string expected = lo > 0 ? "A-leaning" : (hi < 0 ? "B-leaning" : "indeterminate");
        CHECK(cat["direction"] == expected);
    }
    CHECK(doc["categories"][0]["direction"] == "A-leaning");
    CHECK(doc["categories"][1]["direction"] == "B-leaning");
    CHECK(doc["categories"][0]["direction_label"] == "a");

    std::vector<std::pair<double, std::string>> order;
    for (const auto& s : doc["statements"]) order.emplace_back(-s["bias"].get<double>(), s["id"]);
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < 5; ++i) CHECK(doc["top_k"]["a"][i]["id"] == order[i].second);
    CHECK(report.null.ratio > 1.0);
}

TEST_CASE("run rejects bad configurations before writing anything") {
    TempDir dir;
    auto cfg = sample_config(dir / "out");
    SUBCASE("unknown group label") {
        cfg.group_a_label = "unknown";
        CHECK_THROWS_WITH_AS(cmd_run(cfg), doctest::Contains("not in image manifest"), ValidationError);
    }
    SUBCASE("identical labels") {
        cfg.group_b_label = cfg.group_a_label;
        CHECK_THROWS_AS(cmd_run(cfg), ValidationError);
    }
    SUBCASE("too few resamples") {
        cfg.bootstrap.resamples = 50;
        CHECK_THROWS_AS(cmd_run(cfg), ValidationError);
    }
    SUBCASE("too few null trials") {
        cfg.null_trials = 10;
        CHECK_THROWS_AS(cmd_run(cfg), ValidationError);
    }
    SUBCASE("swapped modalities") {
        std::swap(cfg.image_path, cfg.text_path);
        CHECK_THROWS_AS(cmd_run(cfg), ValidationError);
    }
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("partial outputs are removed when writing fails") {
    TempDir dir;
    auto cfg = sample_config(dir / "out");
    fs::create_directories(dir / "out" / "report.md");  // a directory where a file must go
    CHECK_THROWS(cmd_run(cfg));
    CHECK_FALSE(fs::exists(dir / "out" / "report.json"));
    CHECK_FALSE(fs::exists(dir / "out" / "statements.csv"));
}

TEST_CASE("format list parsing") {
    CHECK(parse_formats("json") == std::vector<ReportFormat>{ReportFormat::Json});
    CHECK(parse_formats("md,json,md").size() == 2);
    CHECK_THROWS_AS(parse_formats("json,xml"), ValidationError);
    CHECK_THROWS_AS(parse_formats(""), ValidationError);
}

TEST_CASE("validate reports every file without stopping at the first failure") {
    TempDir dir;
    const fs::path data = data_dir();
    std::ofstream(dir / "broken.json") << "{";
    std::ofstream(dir / "single.csv") << "id,group,v0\na,m,1\nb,m,1\nc,m,1\n";

    const auto summary = cmd_validate({dir / "broken.json", data / "sample" / "images.csv",
                                       data / "sample" / "texts.csv", data / "sample" / "taxonomy.json",
                                       dir / "single.csv"});
    REQUIRE(summary.files.size() == 5);
    CHECK_FALSE(summary.files[0].valid());
    CHECK(summary.files[1].valid());
    CHECK(summary.files[2].valid());
    CHECK(summary.files[3].valid());
    CHECK_FALSE(summary.files[4].valid());
    CHECK_FALSE(summary.all_valid());
    const auto text = summary.render();
    CHECK(text.find("OK    " + (data / "sample" / "images.csv").generic_string()) != std::string::npos);
    CHECK(text.find("groups balanced (female=4, male=4)") != std::string::npos);
}

TEST_CASE("validate warns on norm violations and group imbalance") {
    TempDir dir;
    std::vector<std::string> groups;
    for (int i = 0; i < 100; ++i) groups.push_back(i < 70 ? "m" : "f");
    std::mt19937_64 rng(71);
    auto rows = unit_rows(rng, 100, 4);
    for (double& x : rows[3]) x *= 2.0;
    const auto matrix = to_matrix(rows);
    GalleryManifest manifest;
    manifest.role = ManifestRole::Image;
    manifest.claims_normalized = true;
    for (int i = 0; i < 100; ++i) manifest.items.push_back({"img" + std::to_string(i), groups[i], {}, {}});
    save_embeddings(matrix, manifest, dir / "faces.json");

    const auto summary = cmd_validate({dir / "faces.json"});
    CHECK(summary.all_valid());
    const auto text = summary.render();
    CHECK(text.find("WARN") != std::string::npos);
    CHECK(text.find("norm violation in 1 rows: img3") != std::string::npos);
    CHECK(text.find("group imbalance (f=30, m=70)") != std::string::npos);
}

TEST_CASE("plotdata series") {
    TempDir dir;
    cmd_run(sample_config(dir.path()));
    const auto category = cmd_plotdata(dir / "report.json", PlotKind::Category);
    CHECK(category.rfind("category,mean_bias,ci_low,ci_high\n", 0) == 0);
    CHECK(std::count(category.begin(), category.end(), '\n') == 3);

    const auto syn = write_synthetic(dir, "big", 60, {"c0", "c1"}, {0.3, -0.3}, 5);
    auto cfg = synthetic_config(syn, dir / "big");
    cfg.top_k = 25;
    cmd_run(cfg);
    const auto topk = cmd_plotdata(dir / "big" / "report.json", PlotKind::TopK);
    CHECK(topk.rfind("rank,statement,bias,direction\n", 0) == 0);
    CHECK(std::count(topk.begin(), topk.end(), '\n') == 51);
    CHECK(topk.find("\n25,") != std::string::npos);

    auto doc = json::parse(read_text(dir / "report.json"));
    doc["categories"] = json::array();
    std::ofstream(dir / "empty.json") << doc.dump();
    CHECK_THROWS_WITH_AS(cmd_plotdata(dir / "empty.json", PlotKind::Category),
                         doctest::Contains("report missing categories"), ValidationError);
    CHECK_THROWS_AS(parse_plot_kind("histogram"), ValidationError);
}

TEST_CASE("compare summarizes each report") {
    TempDir dir;
    const std::vector<std::string> cats{"alpha", "beta", "gamma"};
    const auto one = write_synthetic(dir, "one", 12, cats, {0.6, -0.6, 0.0}, 11);
    const auto two = write_synthetic(dir, "two", 12, cats, {-0.6, 0.0, 0.6}, 12);
    cmd_run(synthetic_config(one, dir / "r1"));
    cmd_run(synthetic_config(two, dir / "r2"));

    const auto table = cmd_compare({dir / "r1" / "report.json", dir / "r2" / "report.json"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].most_a_category == "alpha");
    CHECK(table.rows[0].most_b_category == "beta");
    CHECK(table.rows[1].most_a_category == "gamma");
    CHECK(table.rows[1].most_b_category == "alpha");
    CHECK(table.markdown().find("| Model | Avg. Bias | Most a | Most b |") != std::string::npos);

    // All-zero biases: average 0.00 and ties resolved by category name.
    auto doc = json::parse(read_text(dir / "r1" / "report.json"));
    for (auto& s : doc["statements"]) s["bias"] = 0.0;
    for (auto& c : doc["categories"]) c["mean_bias"] = 0.0;
    std::ofstream(dir / "zero.json") << doc.dump();
    const auto zero = cmd_compare({dir / "zero.json", dir / "r2" / "report.json"});
    CHECK(format_fixed(zero.rows[0].average_abs_bias, 2) == "0.00");
    CHECK(zero.rows[0].most_a_category == "alpha");
    CHECK(zero.rows[0].most_b_category == "alpha");

    const auto other = write_synthetic(dir, "other", 9, cats, {0.1, 0.2, 0.3}, 13);
    cmd_run(synthetic_config(other, dir / "r3"));
    CHECK_THROWS_WITH_AS(cmd_compare({dir / "r1" / "report.json", dir / "r3" / "report.json"}),
                         doctest::Contains("taxonomy mismatch"), ValidationError);
    CHECK_THROWS_AS(cmd_compare({dir / "r1" / "report.json"}), ValidationError);
}
