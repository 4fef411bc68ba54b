#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace embaudit {

inline constexpr std::string_view kTaxonomyVersion = "taxonomy/1";
inline constexpr std::string_view kPlaceholder = "{x}";

enum class StatementKind { Activity, Occupation };

std::string_view to_string(StatementKind kind);

struct Statement {
    std::string id;
    std::string text;
    std::string category;
    StatementKind kind = StatementKind::Occupation;
};

// Prompt templates, each with exactly one "{x}" placeholder.
class TemplateSet {
public:
    TemplateSet() = default;
    explicit TemplateSet(std::vector<std::string> templates);

    // "A person performing {x}", "An occupation that involves {x}", "{x}".
    static TemplateSet defaults();

    const std::vector<std::string>& templates() const noexcept { return templates_; }
    std::size_t size() const noexcept { return templates_.size(); }

    std::string apply(std::size_t index, std::string_view text) const;

private:
    std::vector<std::string> templates_;
};

class StatementTaxonomy {
public:
    StatementTaxonomy() = default;
    StatementTaxonomy(std::vector<Statement> statements, std::vector<std::string> categories,
                      TemplateSet templates);

    const std::vector<Statement>& statements() const noexcept { return statements_; }
    const std::vector<std::string>& categories() const noexcept { return categories_; }
    const TemplateSet& templates() const noexcept { return templates_; }

    // Statement indices belonging to `category`, in taxonomy order.
    std::vector<std::size_t> members(std::string_view category) const;
    const Statement* find(std::string_view id) const;

private:
    std::vector<Statement> statements_;
    std::vector<std::string> categories_;
    TemplateSet templates_;
};

StatementTaxonomy load_taxonomy(const std::filesystem::path& path);
StatementTaxonomy parse_taxonomy(std::string_view json_text);

struct Prompt {
    std::string statement_id;
    std::size_t template_index = 0;
    std::string text;

    friend bool operator==(const Prompt&, const Prompt&) = default;
};

// Statement-major, then template index.
std::vector<Prompt> expand_prompts(const StatementTaxonomy& taxonomy);

}  // namespace embaudit
