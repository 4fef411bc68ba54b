// Acceptance suite: prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "embaudit/association.hpp"
#include "embaudit/error.hpp"
#include "embaudit/random.hpp"
#include "embaudit/report.hpp"
#include "embaudit/resampling.hpp"
#include "test_support.hpp"

using namespace embaudit;
using namespace embaudit::testing;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

StatementVector statement(std::string id, std::vector<double> v) {
    return StatementVector{std::move(id), std::move(v), 1};
}

void set_threads(const char* value) {
    if (value) {
        ::setenv("EMBED_AUDIT_THREADS", value, 1);
    } else {
        ::unsetenv("EMBED_AUDIT_THREADS");
    }
}

Outcome oracle_equivalence() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    for (int instance = 0; instance < 100; ++instance) {
        const std::size_t dim = std::uniform_int_distribution<std::size_t>(2, 16)(rng);
        const std::size_t na = std::uniform_int_distribution<std::size_t>(4, 20)(rng);
        const std::size_t nb = std::uniform_int_distribution<std::size_t>(4, 20)(rng);
        const std::size_t ns = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
        const Rows a = unit_rows(rng, na, dim);
        const Rows b = unit_rows(rng, nb, dim);
        std::vector<StatementVector> statements;
        for (std::size_t s = 0; s < ns; ++s) statements.push_back(statement("s" + std::to_string(s), random_unit(rng, dim)));
        const auto results = bias_all(statements, to_matrix(a), to_matrix(b));
        for (std::size_t s = 0; s < ns; ++s) {
            worst = std::max(worst, std::abs(results[s].bias - naive_bias(statements[s].vector, a, b)));
        }
    }
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << "max |diff| " << worst << ", " << elapsed << " s";
    return {worst <= 1e-6 && elapsed < 5.0, d.str()};
}

AuditConfig fixture_config(const fs::path& out) {
    AuditConfig c;
    const fs::path data = data_dir();
    c.image_path = data / "sample" / "images.csv";
    c.text_path = data / "sample" / "texts.csv";
    c.taxonomy_path = data / "sample" / "taxonomy.json";
    c.group_a_label = "male";
    c.group_b_label = "female";
    c.bootstrap = {1000, 0.95, 42};
    c.null_trials = 1000;
    c.output_dir = out;
    return c;
}

Outcome antisymmetry() {
    const auto start = Clock::now();
    TempDir dir;
    auto cfg = fixture_config(dir / "ab");
    const auto ab = cmd_run(cfg);
    std::swap(cfg.group_a_label, cfg.group_b_label);
    cfg.output_dir = dir / "ba";
    const auto ba = cmd_run(cfg);

    const auto ja = json::parse(read_text(dir / "ab" / "report.json"));
    const auto jb = json::parse(read_text(dir / "ba" / "report.json"));
    double worst = 0.0;
    bool consistent = ja["statements"].size() == jb["statements"].size();
    for (std::size_t s = 0; consistent && s < ja["statements"].size(); ++s) {
        const auto& x = ja["statements"][s];
        const auto& y = jb["statements"][s];
        const double bx = x["bias"].get<double>();
        const double by = y["bias"].get<double>();
        worst = std::max(worst, std::abs(bx + by));
        consistent = consistent && (bx == 0.0 || std::signbit(bx) != std::signbit(by));
        consistent = consistent && x["id"] == y["id"] && x["mean_sim_a"] == y["mean_sim_b"];
        worst = std::max(worst, std::abs(x["ci_low"].get<double>() + y["ci_high"].get<double>()));
    }
    for (std::size_t c = 0; consistent && c < ja["categories"].size(); ++c) {
        worst = std::max(worst, std::abs(ja["categories"][c]["mean_bias"].get<double>() +
                                         jb["categories"][c]["mean_bias"].get<double>()));
    }
    consistent = consistent && ja["null"] == jb["null"];
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << "max |bias_ab + bias_ba| " << worst << ", null section equal: " << (ja["null"] == jb["null"])
      << ", " << elapsed << " s";
    (void)ab;
    (void)ba;
    return {consistent && worst <= 1e-12 && elapsed < 10.0, d.str()};
}

Outcome determinism() {
    TempDir dir;
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "8", "1", "8"}) {
        set_threads(threads);
        auto cfg = fixture_config(dir / ("t" + std::to_string(outputs.size())));
        cmd_run(cfg);
        outputs.push_back(read_text(cfg.output_dir / "report.json"));
    }
    set_threads(nullptr);
    const bool same = std::all_of(outputs.begin(), outputs.end(),
                                  [&](const std::string& s) { return s == outputs.front(); });
    return {same && !outputs.front().empty(),
            same ? "4 runs (threads 1, 8, 1, 8) byte-identical" : "reports differ"};
}

// Gallery rows ~ normalize(mean_g + noise * N(0, I)).
Rows draw_gallery(std::mt19937_64& rng, std::size_t n, const std::vector<double>& mean, double noise) {
    Rows rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(unit(gaussian_vector(rng, mean.size(), noise, mean)));
    return rows;
}

double mean_similarity(const std::vector<double>& t, const Rows& rows) {
    double sum = 0.0;
    for (const auto& r : rows) sum += dot(t, r);
    return sum / static_cast<double>(rows.size());
}

Outcome bootstrap_coverage() {
    const auto start = Clock::now();
    const std::size_t dim = 8;
    const double noise = 0.8;
    std::vector<double> mean_a(dim, 0.0);
    std::vector<double> mean_b(dim, 0.0);
    mean_a[0] = 0.5;
    mean_b[0] = -0.5;
    std::vector<double> t(dim, 0.0);
    t[0] = 0.8;
    t[1] = 0.6;

    // Large-sample estimate of the true bias for this generator.
    std::mt19937_64 big(5150);
    const std::size_t large = 400000;
    const double truth = mean_similarity(t, draw_gallery(big, large, mean_a, noise)) -
                         mean_similarity(t, draw_gallery(big, large, mean_b, noise));

    std::mt19937_64 rng(77);
    int covered = 0;
    const int replicates = 200;
    for (int rep = 0; rep < replicates; ++rep) {
        const auto a = draw_gallery(rng, 30, mean_a, noise);
        const auto b = draw_gallery(rng, 30, mean_b, noise);
        const BootstrapConfig cfg{1000, 0.95, static_cast<std::uint64_t>(rep)};
        const auto ci = bootstrap_statement_ci(statement("t", t), to_matrix(a), to_matrix(b), cfg);
        covered += ci.contains(truth);
    }
    const double rate = static_cast<double>(covered) / replicates;
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << "coverage " << covered << "/" << replicates << " (true bias " << truth << "), " << elapsed << " s";
    return {rate >= 0.90 && rate <= 0.99 && elapsed < 120.0, d.str()};
}

struct NullFamilyCounts {
    int in_range = 0;
    int above = 0;
};

NullFamilyCounts null_family(bool structured, std::uint64_t seed) {
    const std::size_t dim = 8;
    std::mt19937_64 rng(seed);
    NullFamilyCounts counts;
    for (int dataset = 0; dataset < 100; ++dataset) {
        std::vector<StatementVector> statements;
        for (int s = 0; s < 20; ++s) statements.push_back(statement("s" + std::to_string(s), random_unit(rng, dim)));
        Rows pooled;
        if (structured) {
            auto u = random_unit(rng, dim);
            std::vector<double> plus(dim), minus(dim);
            for (std::size_t k = 0; k < dim; ++k) {
                plus[k] = 0.25 * u[k];
                minus[k] = -0.25 * u[k];
            }
            pooled = draw_gallery(rng, 30, plus, 0.3);
            const auto b = draw_gallery(rng, 30, minus, 0.3);
            pooled.insert(pooled.end(), b.begin(), b.end());
        } else {
            pooled = unit_rows(rng, 60, dim);
        }
        const auto c = label_swap_null(to_matrix(pooled), {30, 30}, statements, 500,
                                       static_cast<std::uint64_t>(dataset));
        counts.in_range += c.ratio >= 0.7 && c.ratio <= 1.4;
        counts.above += c.ratio > 1.5;
    }
    return counts;
}

Outcome null_exchangeable() {
    const auto start = Clock::now();
    const auto counts = null_family(false, 20240601);
    std::ostringstream d;
    d << "ratio in [0.7, 1.4] for " << counts.in_range << "/100 (need >= 90), " << seconds_since(start) << " s";
    return {counts.in_range >= 90, d.str()};
}

Outcome null_structured() {
    const auto start = Clock::now();
    const auto counts = null_family(true, 20240602);
    std::ostringstream d;
    d << "ratio > 1.5 for " << counts.above << "/100 (need >= 95), " << seconds_since(start) << " s";
    return {counts.above >= 95, d.str()};
}

Outcome ratio_arithmetic() {
    const std::vector<std::pair<std::string, NullCalibration>> models{
        {"model-1", calibration_from_means(0.42, 0.21)},
        {"model-2", calibration_from_means(0.39, 0.20)},
        {"model-3", calibration_from_means(0.37, 0.20)},
        {"model-4", calibration_from_means(0.35, 0.19)},
    };
    const std::vector<std::string> expected{"2.00", "1.95", "1.85", "1.84"};
    const auto rows = observed_vs_null_report(models);
    bool ok = rows.size() == expected.size();
    std::string got;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        got += (i ? ", " : "") + rows[i].ratio;
        ok = ok && rows[i].ratio == expected[i];
    }
    return {ok, "ratios " + got};
}

Outcome degenerate_suite() {
    std::vector<std::string> failures;
    std::mt19937_64 rng(31);

    // Identical galleries: every bias exactly zero.
    {
        const auto g = to_matrix(unit_rows(rng, 12, 8));
        std::vector<StatementVector> statements;
        for (int s = 0; s < 20; ++s) statements.push_back(statement("s" + std::to_string(s), random_unit(rng, 8)));
        for (const auto& r : bias_all(statements, g, g)) {
            if (r.bias != 0.0) {
                failures.push_back("identical galleries gave nonzero bias");
                break;
            }
        }
    }
    // Constant galleries: zero-width CIs.
    {
        const auto va = random_unit(rng, 8);
        const auto vb = random_unit(rng, 8);
        const auto a = to_matrix(Rows(9, va));
        const auto b = to_matrix(Rows(7, vb));
        for (int s = 0; s < 10; ++s) {
            const auto ci = bootstrap_statement_ci(statement("s" + std::to_string(s), random_unit(rng, 8)), a, b,
                                                   {1000, 0.95, 3});
            if (ci.width() != 0.0) {
                failures.push_back("constant galleries gave nonzero CI width");
                break;
            }
        }
    }
    // Zero-norm row: rejected naming the row id.
    {
        TempDir dir;
        auto rows = unit_rows(rng, 6, 4);
        rows[4] = std::vector<double>(4, 0.0);
        write_image_csv(dir / "images.csv", rows, {"a", "b", "a", "b", "a", "b"});
        write_text_csv(dir / "texts.csv", unit_rows(rng, 2, 4), {"s0", "s1"});
        write_taxonomy(dir / "taxonomy.json", {"s0", "s1"}, {"c"}, {0, 0});
        AuditConfig cfg;
        cfg.image_path = dir / "images.csv";
        cfg.text_path = dir / "texts.csv";
        cfg.taxonomy_path = dir / "taxonomy.json";
        cfg.group_a_label = "a";
        cfg.group_b_label = "b";
        cfg.bootstrap = {100, 0.95, 0};
        cfg.null_trials = 100;
        cfg.output_dir = dir / "out";
        try {
            cmd_run(cfg);
            failures.push_back("zero-norm row accepted");
        } catch (const Error& e) {
            if (std::string(e.what()).find("img4") == std::string::npos) {
                failures.push_back(std::string("zero-norm error lacks row id: ") + e.what());
            }
        }
        // Single-group manifest: rejected.
        write_image_csv(dir / "images.csv", unit_rows(rng, 6, 4), {"a", "a", "a", "a", "a", "a"});
        try {
            cmd_run(cfg);
            failures.push_back("single-group manifest accepted");
        } catch (const ValidationError&) {
        }
        if (fs::exists(dir / "out")) failures.push_back("rejected run left output files");
    }
    std::string detail = failures.empty() ? "identical, constant, zero-norm, single-group all handled" : "";
    for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
    return {failures.empty(), detail};
}

Outcome category_consistency() {
    TempDir dir;
    std::mt19937_64 rng(909);
    int reports = 0;
    int checked = 0;
    std::vector<std::string> failures;
    auto check_report = [&](const fs::path& path) {
        const auto doc = json::parse(read_text(path));
        ++reports;
        for (const auto& cat : doc["categories"]) {
            double sum = 0.0;
            int n = 0;
            for (const auto& s : doc["statements"]) {
                if (s["category"] == cat["category"]) {
                    sum += s["bias"].get<double>();
                    ++n;
                }
            }
            ++checked;
            if (n == 0 || std::abs(cat["mean_bias"].get<double>() - sum / n) > 1e-9) {
                failures.push_back("mean mismatch in " + cat["category"].get<std::string>());
            }
            const double lo = cat["ci_low"].get<double>();
            const double hi = cat["ci_high"].get<double>();
            const std::string expected = lo > 0 ? "A-leaning" : (hi < 0 ? "B-leaning" : "indeterminate");
            if (cat["direction"] != expected) {
                failures.push_back("direction rule violated in " + cat["category"].get<std::string>());
            }
        }
    };

    cmd_run(fixture_config(dir / "fixture"));
    check_report(dir / "fixture" / "report.json");

    const std::vector<std::string> categories{"c0", "c1", "c2", "c3", "c4"};
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t ns = 25 + 5 * rep;
        std::vector<std::string> ids;
        std::vector<std::size_t> category_of;
        Rows texts;
        for (std::size_t s = 0; s < ns; ++s) {
            ids.push_back("st" + std::to_string(s));
            category_of.push_back(s % categories.size());
            std::vector<double> mean(8, 0.0);
            mean[0] = 0.3 * (static_cast<double>(s % categories.size()) - 2.0);
            texts.push_back(unit(gaussian_vector(rng, 8, 0.5, mean)));
        }
        Rows images;
        std::vector<std::string> groups;
        for (int i = 0; i < 24; ++i) {
            std::vector<double> mean(8, 0.0);
            mean[0] = i % 2 ? -0.4 : 0.4;
            images.push_back(unit(gaussian_vector(rng, 8, 0.6, mean)));
            groups.push_back(i % 2 ? "b" : "a");
        }
        const auto sub = dir / ("syn" + std::to_string(rep));
        fs::create_directories(sub);
        write_image_csv(sub / "images.csv", images, groups);
        write_text_csv(sub / "texts.csv", texts, ids);
        write_taxonomy(sub / "taxonomy.json", ids, categories, category_of);
        AuditConfig cfg;
        cfg.image_path = sub / "images.csv";
        cfg.text_path = sub / "texts.csv";
        cfg.taxonomy_path = sub / "taxonomy.json";
        cfg.group_a_label = "a";
        cfg.group_b_label = "b";
        cfg.bootstrap = {1000, 0.95, static_cast<std::uint64_t>(rep)};
        cfg.null_trials = 200;
        cfg.output_dir = sub / "out";
        cmd_run(cfg);
        check_report(sub / "out" / "report.json");
    }
    std::ostringstream d;
    d << reports << " reports, " << checked << " categories checked";
    for (const auto& f : failures) d << "; " << f;
    return {failures.empty(), d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"bias oracle equivalence", oracle_equivalence},
        {"group-swap antisymmetry", antisymmetry},
        {"deterministic reports", determinism},
        {"bootstrap coverage", bootstrap_coverage},
        {"null calibration (exchangeable)", null_exchangeable},
        {"null calibration (structured)", null_structured},
        {"ratio arithmetic", ratio_arithmetic},
        {"degenerate inputs", degenerate_suite},
        {"category consistency", category_consistency},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome outcome;
        try {
            outcome = run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        failed += !outcome.pass;
        std::cout << (outcome.pass ? "PASS" : "FAIL") << "  " << name << ": " << outcome.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
