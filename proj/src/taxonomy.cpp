#include "embaudit/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include <json.hpp>

#include "embaudit/error.hpp"

namespace embaudit {

using nlohmann::json;

std::string_view to_string(StatementKind kind) {
    return kind == StatementKind::Activity ? "activity" : "occupation";
}

namespace {

StatementKind parse_kind(std::string_view text) {
    if (text == "activity") return StatementKind::Activity;
    if (text == "occupation") return StatementKind::Occupation;
    throw ValidationError("unknown statement kind '" + std::string(text) + "'");
}

std::size_t count_placeholders(std::string_view text) {
    std::size_t n = 0;
    for (auto pos = text.find(kPlaceholder); pos != std::string_view::npos;
         pos = text.find(kPlaceholder, pos + kPlaceholder.size())) {
        ++n;
    }
    return n;
}

}  // namespace

TemplateSet::TemplateSet(std::vector<std::string> templates) : templates_(std::move(templates)) {
    if (templates_.empty()) throw ValidationError("template set is empty");
    for (const auto& t : templates_) {
        const auto n = count_placeholders(t);
        if (n == 0) throw ValidationError("template missing {x}: '" + t + "'");
        if (n > 1) throw ValidationError("template has more than one {x}: '" + t + "'");
    }
}

TemplateSet TemplateSet::defaults() {
    return TemplateSet({"A person performing {x}", "An occupation that involves {x}", "{x}"});
}

std::string TemplateSet::apply(std::size_t index, std::string_view text) const {
    std::string out = templates_.at(index);
    out.replace(out.find(kPlaceholder), kPlaceholder.size(), text);
    return out;
}

StatementTaxonomy::StatementTaxonomy(std::vector<Statement> statements,
                                     std::vector<std::string> categories, TemplateSet templates)
    : statements_(std::move(statements)),
      categories_(std::move(categories)),
      templates_(std::move(templates)) {
    if (templates_.size() == 0) throw ValidationError("template set is empty");
    if (statements_.empty()) throw ValidationError("taxonomy has no statements");

    std::set<std::string_view> cats;
    for (const auto& c : categories_) {
        if (c.empty()) throw ValidationError("empty category name");
        if (!cats.insert(c).second) throw ValidationError("duplicate category '" + c + "'");
    }
    std::set<std::string_view> ids;
    std::set<std::string_view> used;
    for (const auto& s : statements_) {
        if (s.id.empty()) throw ValidationError("statement with empty id");
        if (s.text.empty()) throw ValidationError("statement '" + s.id + "' has empty text");
        if (!ids.insert(s.id).second) throw ValidationError("duplicate statement id '" + s.id + "'");
        if (!cats.contains(s.category)) {
            throw ValidationError("statement '" + s.id + "' references unknown category '" +
                                  s.category + "'");
        }
        used.insert(s.category);
    }
    for (const auto& c : categories_) {
        if (!used.contains(c)) throw ValidationError("category '" + c + "' has no statements");
    }
}

std::vector<std::size_t> StatementTaxonomy::members(std::string_view category) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < statements_.size(); ++i) {
        if (statements_[i].category == category) out.push_back(i);
    }
    return out;
}

const Statement* StatementTaxonomy::find(std::string_view id) const {
    auto it = std::find_if(statements_.begin(), statements_.end(),
                           [&](const Statement& s) { return s.id == id; });
    return it == statements_.end() ? nullptr : &*it;
}

StatementTaxonomy parse_taxonomy(std::string_view json_text) {
    try {
        const json doc = json::parse(json_text);
        const auto version = doc.at("version").get<std::string>();
        if (version != kTaxonomyVersion) {
            throw ValidationError("unsupported taxonomy version '" + version + "'");
        }
        auto categories = doc.at("categories").get<std::vector<std::string>>();
        TemplateSet templates = doc.contains("templates")
                                    ? TemplateSet(doc["templates"].get<std::vector<std::string>>())
                                    : TemplateSet::defaults();
        std::vector<Statement> statements;
        for (const auto& s : doc.at("statements")) {
            Statement st;
            st.id = s.at("id").get<std::string>();
            st.text = s.at("text").get<std::string>();
            st.category = s.at("category").get<std::string>();
            st.kind = parse_kind(s.value("kind", std::string{"occupation"}));
            statements.push_back(std::move(st));
        }
        return StatementTaxonomy(std::move(statements), std::move(categories), std::move(templates));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("corrupt taxonomy: ") + e.what());
    }
}

StatementTaxonomy load_taxonomy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open taxonomy '" + path.string() + "'");
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_taxonomy(text);
}

std::vector<Prompt> expand_prompts(const StatementTaxonomy& taxonomy) {
    std::vector<Prompt> prompts;
    prompts.reserve(taxonomy.statements().size() * taxonomy.templates().size());
    for (const auto& s : taxonomy.statements()) {
        for (std::size_t t = 0; t < taxonomy.templates().size(); ++t) {
            prompts.push_back({s.id, t, taxonomy.templates().apply(t, s.text)});
        }
    }
    return prompts;
}

}  // namespace embaudit
