#include "sketchdist/io.hpp"

#include <png.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <system_error>

#include "sketchdist/supervision.hpp"

namespace sketchdist::io {

namespace {

static_assert(std::endian::native == std::endian::little,
              "SKF payloads are memcpy'd; a big-endian host needs byte swapping");

constexpr char kMagic[4] = {'S', 'K', 'F', '1'};
constexpr std::size_t kMaxElements = std::size_t{1} << 34;

std::string describe(const std::filesystem::path& path) { return "'" + path.string() + "'"; }

template <typename T>
std::vector<std::byte> pack(std::span<const T> values) {
  std::vector<std::byte> out(values.size_bytes());
  if (!values.empty()) std::memcpy(out.data(), values.data(), out.size());
  return out;
}

template <typename T>
T load(const std::byte* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

// Element i of any numeric payload, widened to double.
double element_as_double(const SkfArray& a, std::size_t i) {
  const std::byte* p = a.payload.data() + i * dtype_size(a.dtype);
  switch (a.dtype) {
    case DType::kF32: return static_cast<double>(load<float>(p));
    case DType::kF64: return load<double>(p);
    case DType::kU8: return static_cast<double>(load<std::uint8_t>(p));
    case DType::kU16: return static_cast<double>(load<std::uint16_t>(p));
    case DType::kI32: return static_cast<double>(load<std::int32_t>(p));
  }
  return 0.0;
}

std::vector<double> as_doubles(const SkfArray& a) {
  std::vector<double> out(a.element_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = element_as_double(a, i);
  return out;
}

int checked_dim(std::uint32_t d) {
  if (d > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw Error(ErrorCode::kDimensionOverflow, "dimension exceeds the supported range");
  }
  return static_cast<int>(d);
}

}  // namespace

std::size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::kF32: return 4;
    case DType::kF64: return 8;
    case DType::kU8: return 1;
    case DType::kU16: return 2;
    case DType::kI32: return 4;
  }
  throw Error(ErrorCode::kUnknownDtype, "unknown dtype");
}

std::size_t SkfArray::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > kMaxElements / d) {
      throw Error(ErrorCode::kDimensionOverflow, "array element count overflows");
    }
    n *= d;
  }
  return n;
}

std::vector<std::byte> encode_skf(const SkfArray& array) {
  if (array.dims.size() > 255) throw Error(ErrorCode::kDimensionOverflow, "rank exceeds 255");
  const std::size_t expected = array.element_count() * dtype_size(array.dtype);
  if (array.payload.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch, "payload size does not match dims");
  }
  std::vector<std::byte> out;
  out.reserve(6 + 4 * array.dims.size() + array.payload.size());
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  out.push_back(static_cast<std::byte>(array.dtype));
  out.push_back(static_cast<std::byte>(array.dims.size()));
  for (auto d : array.dims) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::byte>((d >> (8 * k)) & 0xFFu));
  }
  out.insert(out.end(), array.payload.begin(), array.payload.end());
  return out;
}

SkfArray decode_skf(const std::vector<std::byte>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an SKF container (bad magic)");
  }
  if (bytes.size() < 6) throw Error(ErrorCode::kTruncated, "SKF header truncated");
  const auto code = static_cast<std::uint8_t>(bytes[4]);
  if (code < 1 || code > 5) {
    throw Error(ErrorCode::kUnknownDtype, "unknown SKF dtype code " + std::to_string(code));
  }
  SkfArray a;
  a.dtype = static_cast<DType>(code);
  const std::size_t rank = static_cast<std::uint8_t>(bytes[5]);
  if (bytes.size() < 6 + 4 * rank) throw Error(ErrorCode::kTruncated, "SKF dims truncated");
  for (std::size_t k = 0; k < rank; ++k) {
    std::uint32_t d = 0;
    for (int b = 0; b < 4; ++b) {
      d |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[6 + 4 * k + b])) << (8 * b);
    }
    a.dims.push_back(d);
  }
  const std::size_t payload = a.element_count() * dtype_size(a.dtype);
  const std::size_t offset = 6 + 4 * rank;
  if (bytes.size() - offset < payload) throw Error(ErrorCode::kTruncated, "SKF payload truncated");
  if (bytes.size() - offset > payload) throw Error(ErrorCode::kFormat, "trailing bytes after SKF payload");
  a.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
  return a;
}

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + describe(path));
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    throw Error(ErrorCode::kIo, "cannot read " + describe(path));
  }
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, const std::vector<std::byte>& bytes) {
  thread_local std::mt19937_64 salt{std::random_device{}()};
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(salt() & 0xFFFFFFu);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot create " + describe(tmp));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out.flush()) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::kIo, "cannot write " + describe(tmp));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move output into place at " + describe(path));
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::vector<std::byte> bytes(text.size());
  std::memcpy(bytes.data(), text.data(), text.size());
  write_file_atomic(path, bytes);
}

SkfArray read_skf(const std::filesystem::path& path) {
  try {
    return decode_skf(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), std::string(e.what()) + " in " + describe(path));
  }
}

void write_skf(const SkfArray& array, const std::filesystem::path& path) {
  write_file_atomic(path, encode_skf(array));
}

SkfArray to_skf(const ScalarField& field, DType dtype) {
  SkfArray a;
  a.dtype = dtype;
  a.dims = {static_cast<std::uint32_t>(field.height()), static_cast<std::uint32_t>(field.width())};
  if (dtype == DType::kF64) {
    a.payload = pack(field.values());
  } else if (dtype == DType::kF32) {
    std::vector<float> f(field.values().begin(), field.values().end());
    a.payload = pack(std::span<const float>(f));
  } else {
    throw Error(ErrorCode::kInvalidArgument, "scalar fields are stored as f32 or f64");
  }
  return a;
}

SkfArray to_skf(const VectorField& field, DType dtype) {
  const auto x = to_skf(field.vx, dtype);
  const auto y = to_skf(field.vy, dtype);
  SkfArray a;
  a.dtype = dtype;
  a.dims = {2, static_cast<std::uint32_t>(field.height()), static_cast<std::uint32_t>(field.width())};
  a.payload = x.payload;
  a.payload.insert(a.payload.end(), y.payload.begin(), y.payload.end());
  return a;
}

SkfArray to_skf(const LabelField& labels) {
  SkfArray a;
  a.dtype = DType::kI32;
  a.dims = {static_cast<std::uint32_t>(labels.height()), static_cast<std::uint32_t>(labels.width())};
  a.payload = pack(labels.values());
  return a;
}

ScalarField to_scalar_field(const SkfArray& array) {
  if (array.dims.size() != 2) throw Error(ErrorCode::kFormat, "scalar field must be rank 2 [H, W]");
  return ScalarField(checked_dim(array.dims[1]), checked_dim(array.dims[0]), as_doubles(array));
}

VectorField to_vector_field(const SkfArray& array) {
  if (array.dims.size() != 3 || array.dims[0] != 2) {
    throw Error(ErrorCode::kFormat, "vector field must be rank 3 [2, H, W]");
  }
  const int h = checked_dim(array.dims[1]);
  const int w = checked_dim(array.dims[2]);
  auto all = as_doubles(array);
  const auto plane = static_cast<std::ptrdiff_t>(all.size() / 2);
  std::vector<double> vx(all.begin(), all.begin() + plane);
  std::vector<double> vy(all.begin() + plane, all.end());
  return VectorField(Grid<double>(w, h, std::move(vx)), Grid<double>(w, h, std::move(vy)));
}

LabelField to_label_field(const SkfArray& array) {
  if (array.dims.size() != 2) throw Error(ErrorCode::kFormat, "label field must be rank 2 [H, W]");
  if (array.dtype == DType::kF32 || array.dtype == DType::kF64) {
    throw Error(ErrorCode::kFormat, "label field must have an integer dtype");
  }
  const auto values = as_doubles(array);
  std::vector<std::int32_t> labels(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw Error(ErrorCode::kFormat, "negative label");
    labels[i] = static_cast<std::int32_t>(values[i]);
  }
  return LabelField(checked_dim(array.dims[1]), checked_dim(array.dims[0]), std::move(labels));
}

ScalarField read_scalar_field(const std::filesystem::path& path) { return to_scalar_field(read_skf(path)); }
VectorField read_vector_field(const std::filesystem::path& path) { return to_vector_field(read_skf(path)); }
void write_array(const ScalarField& field, const std::filesystem::path& path) { write_skf(to_skf(field), path); }
void write_array(const VectorField& field, const std::filesystem::path& path) { write_skf(to_skf(field), path); }
void write_array(const LabelField& labels, const std::filesystem::path& path) { write_skf(to_skf(labels), path); }

SkfArray edges_to_skf(const EdgeSet& edges) {
  std::vector<std::int32_t> rows;
  rows.reserve(4 * edges.size());
  for (const auto& e : edges) rows.insert(rows.end(), {e.a.x, e.a.y, e.b.x, e.b.y});
  SkfArray a;
  a.dtype = DType::kI32;
  a.dims = {static_cast<std::uint32_t>(edges.size()), 4};
  a.payload = pack(std::span<const std::int32_t>(rows));
  return a;
}

EdgeSet edges_from_skf(const SkfArray& array) {
  if (array.dtype != DType::kI32 || array.dims.size() != 2 || array.dims[1] != 4) {
    throw Error(ErrorCode::kFormat, "edge file must be an i32 [n, 4] array");
  }
  std::vector<Edge> edges(array.dims[0]);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::byte* p = array.payload.data() + 16 * i;
    edges[i] = {{load<std::int32_t>(p), load<std::int32_t>(p + 4)},
                {load<std::int32_t>(p + 8), load<std::int32_t>(p + 12)}};
  }
  try {
    return EdgeSet(std::move(edges));
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormat, e.what());
  }
}

EdgeSet read_edges(const std::filesystem::path& path) { return edges_from_skf(read_skf(path)); }
void write_edges(const EdgeSet& edges, const std::filesystem::path& path) {
  write_skf(edges_to_skf(edges), path);
}

// ---------------------------------------------------------------------------
// PNG

namespace {

struct PngReadState {
  const std::vector<std::byte>* bytes;
  std::size_t offset = 0;
};

[[noreturn]] void png_fail(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  *text = message;
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

void png_read_mem(png_structp png, png_bytep out, png_size_t length) {
  auto* s = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (s->offset + length > s->bytes->size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, s->bytes->data() + s->offset, length);
  s->offset += length;
}

void png_write_mem(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::byte>*>(png_get_io_ptr(png));
  const auto* p = reinterpret_cast<const std::byte*>(data);
  out->insert(out->end(), p, p + length);
}

void png_flush_mem(png_structp) {}

}  // namespace

GrayImage read_gray_png(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    throw Error(ErrorCode::kFormat, describe(path) + " is not a PNG file");
  }
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_fail, png_warn);
  if (!png) throw Error(ErrorCode::kIo, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  GrayImage image;
  PngReadState state{&bytes};
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> buffer;
  int color_type = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kFormat, "cannot decode " + describe(path) + ": " + message);
  }
  png_set_read_fn(png, &state, png_read_mem);
  png_read_info(png, info);
  color_type = png_get_color_type(png, info);
  if (color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kMultiChannel, describe(path) + " is not a single-channel grayscale PNG");
  }
  int depth = png_get_bit_depth(png, info);
  if (depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    depth = 8;
  }
  if (depth == 16) png_set_swap(png);  // native little-endian u16
  png_read_update_info(png, info);
  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  image.bit_depth = depth;
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * static_cast<std::size_t>(image.height));
  rows.resize(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) rows[static_cast<std::size_t>(y)] = buffer.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  image.values.resize(static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height));
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    if (depth == 16) {
      std::uint16_t v;
      std::memcpy(&v, buffer.data() + 2 * i, 2);
      image.values[i] = v;
    } else {
      image.values[i] = buffer[i];
    }
  }
  return image;
}

void write_gray_png(const GrayImage& image, const std::filesystem::path& path) {
  if (image.bit_depth != 8 && image.bit_depth != 16) {
    throw Error(ErrorCode::kInvalidArgument, "PNG bit depth must be 8 or 16");
  }
  if (image.width <= 0 || image.height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "PNG images must be non-empty");
  }
  std::vector<std::byte> out;
  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_fail, png_warn);
  if (!png) throw Error(ErrorCode::kIo, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  const std::size_t bpp = image.bit_depth == 16 ? 2 : 1;
  std::vector<std::uint8_t> buffer(image.values.size() * bpp);
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    if (bpp == 2) {
      buffer[2 * i] = static_cast<std::uint8_t>(image.values[i] >> 8);  // PNG is big-endian
      buffer[2 * i + 1] = static_cast<std::uint8_t>(image.values[i] & 0xFF);
    } else {
      buffer[i] = static_cast<std::uint8_t>(image.values[i]);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  const std::size_t stride = static_cast<std::size_t>(image.width) * bpp;
  for (int y = 0; y < image.height; ++y) rows[static_cast<std::size_t>(y)] = buffer.data() + stride * y;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "cannot encode " + describe(path) + ": " + message);
  }
  png_set_write_fn(png, &out, png_write_mem, png_flush_mem);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height),
               image.bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  write_file_atomic(path, out);
}

LabelField read_label_png(const std::filesystem::path& path) {
  const auto image = read_gray_png(path);
  std::vector<std::int32_t> labels(image.values.begin(), image.values.end());
  return compact_labels(LabelField(image.width, image.height, std::move(labels)));
}

void write_label_png(const LabelField& labels, const std::filesystem::path& path) {
  GrayImage image{labels.width(), labels.height(), 16, {}};
  image.values.reserve(labels.size());
  for (auto l : labels.values()) {
    if (l < 0 || l > 0xFFFF) throw Error(ErrorCode::kInvalidArgument, "label does not fit a 16-bit PNG");
    image.values.push_back(static_cast<std::uint16_t>(l));
  }
  write_gray_png(image, path);
}

PixelSet read_mask_png(const std::filesystem::path& path) {
  const auto image = read_gray_png(path);
  PixelSet mask(image.width, image.height, 0);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = image.values[i] != 0 ? 1 : 0;
  return mask;
}

void write_mask_png(const PixelSet& mask, const std::filesystem::path& path) {
  GrayImage image{mask.width(), mask.height(), 8, {}};
  image.values.reserve(mask.size());
  for (auto v : mask.values()) image.values.push_back(v ? 255 : 0);
  write_gray_png(image, path);
}

AnnotationSet strokes_from_codes(const GrayImage& image) {
  AnnotationSet ann(image.width, image.height);
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    switch (image.values[i]) {
      case kStrokeNone: break;
      case kStrokeBackground: ann.s0[i] = 1; break;
      case kStrokeForeground: ann.s1[i] = 1; break;
      case kStrokeBoundary: ann.manual[i] = 1; break;
      default:
        throw Error(ErrorCode::kUnknownStrokeCode,
                    "unknown stroke code " + std::to_string(image.values[i]) + " at pixel (" +
                        std::to_string(i % static_cast<std::size_t>(image.width)) + ", " +
                        std::to_string(i / static_cast<std::size_t>(image.width)) + ")");
    }
  }
  return ann;
}

GrayImage strokes_to_codes(const AnnotationSet& ann) {
  check_annotation_form(ann);
  GrayImage image{ann.width(), ann.height(), 8, std::vector<std::uint16_t>(ann.s0.size(), kStrokeNone)};
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    if (ann.s0[i]) image.values[i] = kStrokeBackground;
    if (ann.s1[i]) image.values[i] = kStrokeForeground;
    if (ann.manual[i]) image.values[i] = kStrokeBoundary;
  }
  return image;
}

AnnotationSet read_stroke_png(const std::filesystem::path& path) {
  try {
    return strokes_from_codes(read_gray_png(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnknownStrokeCode) throw;
    throw Error(e.code(), std::string(e.what()) + " in " + describe(path));
  }
}

void write_stroke_png(const AnnotationSet& ann, const std::filesystem::path& path) {
  write_gray_png(strokes_to_codes(ann), path);
}

}  // namespace sketchdist::io
