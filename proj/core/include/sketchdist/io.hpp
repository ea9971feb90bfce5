#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sketchdist/raster.hpp"

namespace sketchdist {

struct AnnotationSet;

namespace io {

// SKF container layout:
//   "SKF1" | u8 dtype | u8 rank | rank x u32 LE dims (outermost first) | payload
// Payload is row-major little-endian. A VectorField is stored as [2, H, W].
enum class DType : std::uint8_t { kF32 = 1, kF64 = 2, kU8 = 3, kU16 = 4, kI32 = 5 };

std::size_t dtype_size(DType dtype);

/// Untyped SKF array: the payload bytes are kept verbatim.
struct SkfArray {
  DType dtype = DType::kF64;
  std::vector<std::uint32_t> dims;
  std::vector<std::byte> payload;

  std::size_t element_count() const;
  friend bool operator==(const SkfArray&, const SkfArray&) = default;
};

std::vector<std::byte> encode_skf(const SkfArray& array);
SkfArray decode_skf(const std::vector<std::byte>& bytes);

SkfArray read_skf(const std::filesystem::path& path);
void write_skf(const SkfArray& array, const std::filesystem::path& path);

SkfArray to_skf(const ScalarField& field, DType dtype = DType::kF64);
SkfArray to_skf(const VectorField& field, DType dtype = DType::kF64);
SkfArray to_skf(const LabelField& labels);

/// Conversions accept any numeric dtype; values are widened to double or int32.
ScalarField to_scalar_field(const SkfArray& array);
VectorField to_vector_field(const SkfArray& array);
LabelField to_label_field(const SkfArray& array);

ScalarField read_scalar_field(const std::filesystem::path& path);
VectorField read_vector_field(const std::filesystem::path& path);
void write_array(const ScalarField& field, const std::filesystem::path& path);
void write_array(const VectorField& field, const std::filesystem::path& path);
void write_array(const LabelField& labels, const std::filesystem::path& path);

/// Edge sets are stored as i32 [n, 4] arrays of (ax, ay, bx, by) rows in
/// canonical order, so re-serialization is byte-identical.
SkfArray edges_to_skf(const EdgeSet& edges);
EdgeSet edges_from_skf(const SkfArray& array);
EdgeSet read_edges(const std::filesystem::path& path);
void write_edges(const EdgeSet& edges, const std::filesystem::path& path);

// Single-channel PNG. Labels are written as 16-bit, masks and stroke codes
// as 8-bit.
struct GrayImage {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> values;
};

GrayImage read_gray_png(const std::filesystem::path& path);
void write_gray_png(const GrayImage& image, const std::filesystem::path& path);

LabelField read_label_png(const std::filesystem::path& path);
void write_label_png(const LabelField& labels, const std::filesystem::path& path);

PixelSet read_mask_png(const std::filesystem::path& path);
void write_mask_png(const PixelSet& mask, const std::filesystem::path& path);

// Stroke code table.
inline constexpr std::uint8_t kStrokeNone = 0;
inline constexpr std::uint8_t kStrokeBackground = 1;
inline constexpr std::uint8_t kStrokeForeground = 2;
inline constexpr std::uint8_t kStrokeBoundary = 3;

/// Decodes a stroke raster. Manual boundary edges are not representable in
/// the raster and come back empty.
AnnotationSet strokes_from_codes(const GrayImage& image);
GrayImage strokes_to_codes(const AnnotationSet& ann);
AnnotationSet read_stroke_png(const std::filesystem::path& path);
void write_stroke_png(const AnnotationSet& ann, const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::byte>& bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::vector<std::byte> read_file(const std::filesystem::path& path);

}  // namespace io
}  // namespace sketchdist
