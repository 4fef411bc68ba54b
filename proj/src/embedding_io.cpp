#include "embaudit/embedding_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "embaudit/error.hpp"

namespace embaudit {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

EmbeddingMatrix::EmbeddingMatrix(std::size_t count, std::size_t dim, std::vector<double> data)
    : count_(count), dim_(dim), data_(std::move(data)) {
    if (count_ == 0 || dim_ == 0) {
        throw ValidationError("embedding matrix needs positive count and dim");
    }
    if (data_.size() != count_ * dim_) {
        throw ValidationError("embedding matrix data size " + std::to_string(data_.size()) +
                              " != count*dim " + std::to_string(count_ * dim_));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw ValidationError("non-finite value at row " + std::to_string(i / dim_));
        }
    }
    normalized_ = true;
    for (std::size_t r = 0; r < count_ && normalized_; ++r) {
        normalized_ = std::abs(row_norm(r) - 1.0) <= kStoredNormTolerance;
    }
}

double EmbeddingMatrix::row_norm(std::size_t i) const {
    double sum = 0.0;
    for (double v : row(i)) sum += v * v;
    return std::sqrt(sum);
}

EmbeddingMatrix EmbeddingMatrix::select_rows(std::span<const std::size_t> rows) const {
    std::vector<double> out;
    out.reserve(rows.size() * dim_);
    for (std::size_t r : rows) {
        if (r >= count_) throw ValidationError("row index out of range");
        auto src = row(r);
        out.insert(out.end(), src.begin(), src.end());
    }
    return EmbeddingMatrix(rows.size(), dim_, std::move(out));
}

std::string_view to_string(ManifestRole role) {
    return role == ManifestRole::Image ? "image" : "text";
}

ManifestRole parse_role(std::string_view text) {
    if (text == "image") return ManifestRole::Image;
    if (text == "text") return ManifestRole::Text;
    throw ValidationError("unknown manifest role '" + std::string(text) + "'");
}

void validate_manifest(const GalleryManifest& manifest, const EmbeddingMatrix& matrix) {
    if (manifest.version != kFormatVersion) {
        throw ValidationError("unsupported format version '" + manifest.version + "'");
    }
    if (manifest.dtype_tag != kDtypeTag) {
        throw ValidationError("unsupported dtype '" + manifest.dtype_tag + "'");
    }
    if (manifest.items.size() != matrix.count()) {
        throw ValidationError("manifest/matrix count mismatch: " +
                              std::to_string(manifest.items.size()) + " items, " +
                              std::to_string(matrix.count()) + " rows");
    }
    std::set<std::string_view> seen;
    for (const auto& item : manifest.items) {
        if (item.id.empty()) throw ValidationError("item with empty id");
        if (!seen.insert(item.id).second) {
            throw ValidationError("duplicate item id '" + item.id + "'");
        }
        if (manifest.role == ManifestRole::Image) {
            if (!item.group || item.group->empty()) {
                throw ValidationError("image item '" + item.id + "' has no group label");
            }
            if (item.statement_id || item.template_index) {
                throw ValidationError("image item '" + item.id + "' carries statement fields");
            }
        } else {
            if (!item.statement_id || item.statement_id->empty() || !item.template_index) {
                throw ValidationError("text item '" + item.id +
                                      "' needs statement_id and template_index");
            }
            if (item.group) {
                throw ValidationError("text item '" + item.id + "' carries a group label");
            }
        }
    }
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ItemRecord item_from_json(const json& j) {
    ItemRecord item;
    item.id = j.at("id").get<std::string>();
    if (j.contains("group")) item.group = j["group"].get<std::string>();
    if (j.contains("statement_id")) item.statement_id = j["statement_id"].get<std::string>();
    if (j.contains("template_index")) {
        auto v = j["template_index"].get<std::int64_t>();
        if (v < 0) throw ValidationError("negative template_index for item '" + item.id + "'");
        item.template_index = static_cast<std::size_t>(v);
    }
    return item;
}

ordered_json item_to_json(const ItemRecord& item) {
    ordered_json j;
    j["id"] = item.id;
    if (item.group) j["group"] = *item.group;
    if (item.statement_id) j["statement_id"] = *item.statement_id;
    if (item.template_index) j["template_index"] = *item.template_index;
    return j;
}

std::vector<double> decode_f32le(const std::string& bytes) {
    std::vector<double> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 3; b >= 0; --b) {
            bits = (bits << 8) | static_cast<unsigned char>(bytes[i * 4 + b]);
        }
        out[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    return out;
}

std::string encode_f32le(std::span<const double> values) {
    std::string out(values.size() * 4, '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
        for (int b = 0; b < 4; ++b) {
            out[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
        }
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        while (!field.empty() && field.front() == ' ') field.erase(field.begin());
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ValidationError("bad numeric value '" + text + "' on line " +
                              std::to_string(line_no));
    }
    return value;
}

}  // namespace

std::pair<EmbeddingMatrix, GalleryManifest> load_embeddings_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty CSV file '" + path.string() + "'");
    const auto header = split_csv_line(line);

    GalleryManifest manifest;
    manifest.model_id = "csv:" + path.filename().string();
    manifest.data_file = path.filename().string();
    std::size_t value_offset = 0;
    if (header.size() >= 2 && header[0] == "id" && header[1] == "group") {
        manifest.role = ManifestRole::Image;
        value_offset = 2;
    } else if (header.size() >= 3 && header[0] == "id" && header[1] == "statement_id" &&
               header[2] == "template_index") {
        manifest.role = ManifestRole::Text;
        value_offset = 3;
    } else {
        throw ValidationError("CSV header must start with 'id,group' or "
                              "'id,statement_id,template_index'");
    }
    const std::size_t dim = header.size() - value_offset;
    if (dim == 0) throw ValidationError("CSV has no value columns");

    std::vector<double> data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ValidationError("CSV line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(header.size()));
        }
        ItemRecord item;
        item.id = fields[0];
        if (manifest.role == ManifestRole::Image) {
            item.group = fields[1];
        } else {
            item.statement_id = fields[1];
            double idx = parse_double(fields[2], line_no);
            if (idx < 0 || idx != std::floor(idx)) {
                throw ValidationError("bad template_index on line " + std::to_string(line_no));
            }
            item.template_index = static_cast<std::size_t>(idx);
        }
        manifest.items.push_back(std::move(item));
        for (std::size_t c = value_offset; c < fields.size(); ++c) {
            data.push_back(static_cast<double>(static_cast<float>(parse_double(fields[c], line_no))));
        }
    }
    const std::size_t count = manifest.items.size();
    EmbeddingMatrix matrix(count, dim, std::move(data));
    validate_manifest(manifest, matrix);
    return {std::move(matrix), std::move(manifest)};
}

std::pair<EmbeddingMatrix, GalleryManifest> load_embeddings(const fs::path& path) {
    if (path.extension() == ".csv") return load_embeddings_csv(path);

    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ValidationError("corrupt manifest '" + path.string() + "': " + e.what());
    }

    GalleryManifest manifest;
    std::size_t dim = 0;
    std::size_t count = 0;
    try {
        manifest.version = doc.at("version").get<std::string>();
        if (manifest.version != kFormatVersion) {
            throw ValidationError("unsupported format version '" + manifest.version + "'");
        }
        manifest.role = parse_role(doc.at("role").get<std::string>());
        manifest.model_id = doc.value("model_id", std::string{});
        manifest.dtype_tag = doc.at("dtype").get<std::string>();
        manifest.data_file = doc.at("data_file").get<std::string>();
        if (doc.contains("normalized")) manifest.claims_normalized = doc["normalized"].get<bool>();
        dim = doc.at("dim").get<std::size_t>();
        count = doc.at("count").get<std::size_t>();
        for (const auto& item : doc.at("items")) manifest.items.push_back(item_from_json(item));
    } catch (const json::exception& e) {
        throw ValidationError("corrupt manifest '" + path.string() + "': " + e.what());
    }
    if (manifest.dtype_tag != kDtypeTag) {
        throw ValidationError("unsupported dtype '" + manifest.dtype_tag + "'");
    }

    const fs::path data_path = path.parent_path() / manifest.data_file;
    const std::string bytes = read_file(data_path);
    if (bytes.size() != count * dim * 4) {
        throw ValidationError("payload size mismatch: '" + data_path.string() + "' has " +
                              std::to_string(bytes.size()) + " bytes, header implies " +
                              std::to_string(count * dim * 4));
    }
    EmbeddingMatrix matrix(count, dim, decode_f32le(bytes));
    validate_manifest(manifest, matrix);
    return {std::move(matrix), std::move(manifest)};
}

void save_embeddings(const EmbeddingMatrix& matrix, GalleryManifest manifest, const fs::path& path) {
    if (matrix.empty()) throw ValidationError("cannot save an empty matrix");
    validate_manifest(manifest, matrix);
    if (manifest.data_file.empty()) manifest.data_file = path.stem().string() + ".f32";

    ordered_json doc;
    doc["version"] = manifest.version;
    doc["role"] = std::string(to_string(manifest.role));
    doc["model_id"] = manifest.model_id;
    doc["dim"] = matrix.dim();
    doc["count"] = matrix.count();
    doc["dtype"] = manifest.dtype_tag;
    doc["data_file"] = manifest.data_file;
    if (manifest.claims_normalized) doc["normalized"] = *manifest.claims_normalized;
    doc["items"] = ordered_json::array();
    for (const auto& item : manifest.items) doc["items"].push_back(item_to_json(item));

    const fs::path data_path = path.parent_path() / manifest.data_file;
    {
        std::ofstream out(data_path, std::ios::binary | std::ios::trunc);
        const auto bytes = encode_f32le(matrix.data());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw ValidationError("failed writing '" + data_path.string() + "'");
    }
    std::ofstream out(path, std::ios::trunc);
    out << doc.dump(2) << '\n';
    if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

std::map<std::string, std::vector<std::size_t>> group_rows(const GalleryManifest& manifest) {
    if (manifest.role != ManifestRole::Image) {
        throw ValidationError("group split needs an image manifest");
    }
    std::map<std::string, std::vector<std::size_t>> rows;
    for (std::size_t i = 0; i < manifest.items.size(); ++i) {
        const auto& item = manifest.items[i];
        if (!item.group || item.group->empty()) {
            throw ValidationError("missing group label for item '" + item.id + "'");
        }
        rows[*item.group].push_back(i);
    }
    return rows;
}

std::map<std::string, EmbeddingMatrix> split_by_group(const EmbeddingMatrix& matrix,
                                                      const GalleryManifest& manifest) {
    if (manifest.items.size() != matrix.count()) {
        throw ValidationError("manifest/matrix count mismatch");
    }
    const auto rows = group_rows(manifest);
    const bool ok = rows.size() == 2 &&
                    std::all_of(rows.begin(), rows.end(),
                                [](const auto& kv) { return kv.second.size() >= 2; });
    if (!ok) throw ValidationError("need exactly two groups with >=2 items");

    std::map<std::string, EmbeddingMatrix> out;
    for (const auto& [label, idx] : rows) out.emplace(label, matrix.select_rows(idx));
    return out;
}

}  // namespace embaudit
