#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace embaudit {

inline constexpr std::string_view kFormatVersion = "emba/1";
inline constexpr std::string_view kDtypeTag = "f32le";
inline constexpr double kStoredNormTolerance = 1e-4;

// Dense row-major matrix of embedding vectors.
//
// Values are held in double precision for computation; the on-disk payload is
// 32-bit, so any matrix that came from a file round-trips bit-exactly.
// Immutable after construction.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;

    // Throws ValidationError on a size mismatch, a zero dimension or count,
    // or any non-finite entry.
    EmbeddingMatrix(std::size_t count, std::size_t dim, std::vector<double> data);

    std::size_t count() const noexcept { return count_; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return count_ == 0; }

    // True iff every row has L2 norm within 1e-4 of 1.
    bool normalized() const noexcept { return normalized_; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }
    std::span<const double> data() const noexcept { return data_; }

    double row_norm(std::size_t i) const;

    EmbeddingMatrix select_rows(std::span<const std::size_t> rows) const;

private:
    std::size_t count_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
    bool normalized_ = false;
};

enum class ManifestRole { Image, Text };

std::string_view to_string(ManifestRole role);
ManifestRole parse_role(std::string_view text);

// One manifest entry. Image rows carry a group label, text rows carry the
// statement id and template index they were encoded from.
struct ItemRecord {
    std::string id;
    std::optional<std::string> group;
    std::optional<std::string> statement_id;
    std::optional<std::size_t> template_index;

    friend bool operator==(const ItemRecord&, const ItemRecord&) = default;
};

struct GalleryManifest {
    std::string version{kFormatVersion};
    ManifestRole role = ManifestRole::Image;
    std::string model_id;
    std::string dtype_tag{kDtypeTag};
    std::string data_file;
    // Set when the producer claims rows are unit-norm; checked by validation.
    std::optional<bool> claims_normalized;
    std::vector<ItemRecord> items;

    friend bool operator==(const GalleryManifest&, const GalleryManifest&) = default;
};

// Checks the manifest against its own invariants and against the matrix
// (row count, unique ids, role-specific fields).
void validate_manifest(const GalleryManifest& manifest, const EmbeddingMatrix& matrix);

// Loads a manifest (.json) and its payload, or a CSV fixture (.csv).
std::pair<EmbeddingMatrix, GalleryManifest> load_embeddings(const std::filesystem::path& path);

// CSV layout: header `id,group,<values...>` for images or
// `id,statement_id,template_index,<values...>` for texts. Values are rounded
// to 32-bit floats, matching what the binary payload would hold.
std::pair<EmbeddingMatrix, GalleryManifest> load_embeddings_csv(const std::filesystem::path& path);

// Writes the payload next to the manifest. `manifest.data_file` names the
// payload (relative to the manifest); when empty, `<stem>.f32` is used.
// All invariants are checked before anything touches the filesystem.
void save_embeddings(const EmbeddingMatrix& matrix, GalleryManifest manifest,
                     const std::filesystem::path& path);

// Partitions image rows by group label, preserving row order inside each
// group. Requires exactly two groups with at least two rows each.
std::map<std::string, EmbeddingMatrix> split_by_group(const EmbeddingMatrix& matrix,
                                                      const GalleryManifest& manifest);

// Row indices per group, in file order.
std::map<std::string, std::vector<std::size_t>> group_rows(const GalleryManifest& manifest);

}  // namespace embaudit
