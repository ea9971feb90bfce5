#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "tempdir.hpp"
#include "sketchdist/io.hpp"
#include "sketchdist/supervision.hpp"

using namespace sketchdist;
namespace fs = std::filesystem;
namespace st = sketchdist::testing;
using st::TempDir;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(Skf, F32RoundTripIsBitExact) {
  ScalarField f(3, 3, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.1 * static_cast<double>(i) - 0.35;
  const auto a = io::to_skf(f, io::DType::kF32);
  const auto bytes = io::encode_skf(a);
  const auto back = io::decode_skf(bytes);
  EXPECT_EQ(back, a);
  EXPECT_EQ(io::encode_skf(back), bytes);
}

TEST(Skf, AllDtypesRoundTrip) {
  for (auto dt : {io::DType::kF32, io::DType::kF64, io::DType::kU8, io::DType::kU16, io::DType::kI32}) {
    io::SkfArray a;
    a.dtype = dt;
    a.dims = {2, 3, 4};
    a.payload.resize(24 * io::dtype_size(dt));
    for (std::size_t i = 0; i < a.payload.size(); ++i) a.payload[i] = std::byte(i * 37 % 251);
    EXPECT_EQ(io::decode_skf(io::encode_skf(a)), a);
  }
}

TEST(Skf, HeaderLayout) {
  LabelField l(3, 2, 7);
  const auto bytes = io::encode_skf(io::to_skf(l));
  ASSERT_EQ(bytes.size(), 4u + 1 + 1 + 8 + 24);
  EXPECT_EQ(std::memcmp(bytes.data(), "SKF1", 4), 0);
  EXPECT_EQ(bytes[4], std::byte{5});
  EXPECT_EQ(bytes[5], std::byte{2});
  EXPECT_EQ(bytes[6], std::byte{2});  // H, little-endian
  EXPECT_EQ(bytes[10], std::byte{3});  // W
  EXPECT_EQ(bytes[14], std::byte{7});
}

TEST(Skf, DistinctErrors) {
  const auto good = io::encode_skf(io::to_skf(ScalarField(2, 2, 1.0)));
  auto bad_magic = good;
  bad_magic[0] = std::byte{'X'};
  EXPECT_EQ(code_of([&] { io::decode_skf(bad_magic); }), ErrorCode::kBadMagic);
  auto bad_dtype = good;
  bad_dtype[4] = std::byte{9};
  EXPECT_EQ(code_of([&] { io::decode_skf(bad_dtype); }), ErrorCode::kUnknownDtype);
  auto truncated = good;
  truncated.pop_back();
  EXPECT_EQ(code_of([&] { io::decode_skf(truncated); }), ErrorCode::kTruncated);
  auto header = io::encode_skf(io::SkfArray{io::DType::kF64, {0, 0}, {}});
  std::memset(header.data() + 6, 0xFF, 8);
  EXPECT_EQ(code_of([&] { io::decode_skf(header); }), ErrorCode::kDimensionOverflow);
}

TEST(Skf, VectorFieldPlanes) {
  VectorField v(3, 2);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v.vx[i] = static_cast<double>(i);
    v.vy[i] = -static_cast<double>(i);
  }
  const auto a = io::to_skf(v);
  EXPECT_EQ(a.dims, (std::vector<std::uint32_t>{2, 2, 3}));
  EXPECT_EQ(io::to_vector_field(a), v);
}

TEST(Skf, FileRoundTrip) {
  TempDir dir;
  st::Rng rng(3);
  std::normal_distribution<double> n;
  ScalarField f(17, 9, 0.0);
  for (auto& x : f.values()) x = n(rng);
  io::write_array(f, dir / "f.skf");
  EXPECT_EQ(io::read_scalar_field(dir / "f.skf"), f);
}

TEST(Edges, ReserializationIsByteIdentical) {
  TempDir dir;
  st::Rng rng(4);
  const auto e = boundary_edges(st::random_scene(rng, 20, 20));
  io::write_edges(e, dir / "a.skf");
  const auto back = io::read_edges(dir / "a.skf");
  EXPECT_EQ(back, e);
  io::write_edges(back, dir / "b.skf");
  EXPECT_EQ(io::read_file(dir / "a.skf"), io::read_file(dir / "b.skf"));
}

TEST(Png, LabelRoundTrip16Bit) {
  TempDir dir;
  LabelField l(4, 3, 0);
  l(1, 1) = 1;
  l(2, 1) = 2;
  l(3, 2) = 2;
  io::write_label_png(l, dir / "l.png");
  EXPECT_EQ(io::read_gray_png(dir / "l.png").bit_depth, 16);
  EXPECT_EQ(io::read_label_png(dir / "l.png"), l);
}

TEST(Png, LabelsCompactedOnRead) {
  TempDir dir;
  io::GrayImage img{3, 1, 16, {0, 500, 20}};
  io::write_gray_png(img, dir / "l.png");
  EXPECT_EQ(io::read_label_png(dir / "l.png"), LabelField(3, 1, std::vector<std::int32_t>{0, 1, 2}));
}

TEST(Png, StrokeCodes) {
  TempDir dir;
  io::GrayImage img{4, 1, 8, {0, 1, 2, 3}};
  io::write_gray_png(img, dir / "s.png");
  const auto ann = io::read_stroke_png(dir / "s.png");
  EXPECT_EQ(ann.s0(1, 0), 1);
  EXPECT_EQ(ann.s1(2, 0), 1);
  EXPECT_EQ(ann.manual(3, 0), 1);
  EXPECT_EQ(count(ann.strokes()), 2u);
}

TEST(Png, UnknownStrokeCode) {
  TempDir dir;
  io::write_gray_png(io::GrayImage{2, 1, 8, {0, 7}}, dir / "s.png");
  EXPECT_EQ(code_of([&] { io::read_stroke_png(dir / "s.png"); }), ErrorCode::kUnknownStrokeCode);
}

TEST(Png, EmptyStrokes) {
  TempDir dir;
  io::write_gray_png(io::GrayImage{3, 3, 8, std::vector<std::uint16_t>(9, 0)}, dir / "s.png");
  const auto ann = io::read_stroke_png(dir / "s.png");
  EXPECT_EQ(count(ann.strokes()), 0u);
  EXPECT_EQ(count(ann.manual), 0u);
}

TEST(Png, RejectsMultiChannel) {
  // 1x1 RGB PNG
  const unsigned char rgb[] = {
      0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A, 0x00, 0x00, 0x00, 0x0D, 0x49, 0x48, 0x44,
      0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x02, 0x00, 0x00, 0x00, 0x90,
      0x77, 0x53, 0xDE, 0x00, 0x00, 0x00, 0x0C, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9C, 0x63, 0xF8,
      0xCF, 0xC0, 0x00, 0x00, 0x03, 0x01, 0x01, 0x00, 0xC9, 0xFE, 0x92, 0xEF, 0x00, 0x00, 0x00,
      0x00, 0x49, 0x45, 0x4E, 0x44, 0xAE, 0x42, 0x60, 0x82};
  TempDir dir;
  {
    std::ofstream out(dir / "rgb.png", std::ios::binary);
    out.write(reinterpret_cast<const char*>(rgb), sizeof(rgb));
  }
  EXPECT_EQ(code_of([&] { io::read_label_png(dir / "rgb.png"); }), ErrorCode::kMultiChannel);
}

TEST(Png, MaskRoundTrip) {
  TempDir dir;
  st::Rng rng(5);
  const auto m = st::random_mask(rng, 13, 7, 0.4);
  io::write_mask_png(m, dir / "m.png");
  const auto back = io::read_mask_png(dir / "m.png");
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(back[i] != 0, m[i] != 0);
}

TEST(AtomicWrite, LeavesNoTempFiles) {
  TempDir dir;
  io::write_text_atomic(dir / "r.json", "{}\n");
  int n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++n;
  EXPECT_EQ(n, 1);
}
