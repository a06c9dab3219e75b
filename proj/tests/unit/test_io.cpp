#include <gtest/gtest.h>

#include <cstring>
#include <limits>

#include "jlsh/errors.hpp"
#include "jlsh/io.hpp"
#include "oracles.hpp"

using namespace jlsh;

namespace {

using Bytes = std::vector<unsigned char>;

void put_i32(Bytes& b, std::int32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>((static_cast<std::uint32_t>(v) >> (8 * i)) & 0xff));
}

void put_f32(Bytes& b, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  put_i32(b, static_cast<std::int32_t>(u));
}

std::uint64_t format_offset(const std::filesystem::path& p, bool bvecs = false) {
  try {
    if (bvecs) {
      read_bvecs(p);
    } else {
      read_fvecs(p);
    }
  } catch (const FormatError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "no FormatError for " << p;
  return ~0ull;
}

}  // namespace

TEST(Fvecs, ConstructedFixture) {
  const auto dir = oracle::scratch_dir("fvecs_fixture");
  oracle::write_bytes(dir / "a.fvecs", {0x02, 0x00, 0x00, 0x00, 0x00, 0x00, 0x80, 0x3F,
                                        0x00, 0x00, 0x00, 0x40});
  const auto v = read_fvecs(dir / "a.fvecs");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], (RealVector{1.0, 2.0}));
}

TEST(Fvecs, EmptyFile) {
  const auto dir = oracle::scratch_dir("fvecs_empty");
  oracle::write_bytes(dir / "e.fvecs", {});
  EXPECT_TRUE(read_fvecs(dir / "e.fvecs").empty());
  EXPECT_TRUE(read_bvecs(dir / "e.fvecs").empty());
}

TEST(Fvecs, TruncationOffsets) {
  const auto dir = oracle::scratch_dir("fvecs_trunc");
  Bytes b;
  put_i32(b, 2);
  put_f32(b, 1.0f);
  put_f32(b, 2.0f);
  Bytes body = b;
  put_i32(body, 2);
  put_f32(body, 3.0f);  // second record is missing a component
  oracle::write_bytes(dir / "t.fvecs", body);
  EXPECT_EQ(format_offset(dir / "t.fvecs"), 12u);

  Bytes header = b;
  header.push_back(0x02);  // partial dimension field
  oracle::write_bytes(dir / "h.fvecs", header);
  EXPECT_EQ(format_offset(dir / "h.fvecs"), 12u);
}

TEST(Fvecs, DimensionMismatchOffset) {
  const auto dir = oracle::scratch_dir("fvecs_dim");
  Bytes b;
  for (int rec = 0; rec < 2; ++rec) {
    put_i32(b, 2);
    put_f32(b, 1.0f);
    put_f32(b, 1.0f);
  }
  put_i32(b, 3);
  for (int i = 0; i < 3; ++i) put_f32(b, 0.5f);
  oracle::write_bytes(dir / "m.fvecs", b);
  EXPECT_EQ(format_offset(dir / "m.fvecs"), 24u);
}

TEST(Fvecs, BadDimensionAndNonFinite) {
  const auto dir = oracle::scratch_dir("fvecs_bad");
  Bytes zero;
  put_i32(zero, 0);
  oracle::write_bytes(dir / "z.fvecs", zero);
  EXPECT_EQ(format_offset(dir / "z.fvecs"), 0u);
  Bytes nan;
  put_i32(nan, 1);
  put_f32(nan, 1.0f);
  put_i32(nan, 1);
  put_f32(nan, std::numeric_limits<float>::quiet_NaN());
  oracle::write_bytes(dir / "n.fvecs", nan);
  EXPECT_EQ(format_offset(dir / "n.fvecs"), 8u);
}

TEST(Fvecs, MissingFileIsIoError) {
  EXPECT_THROW(read_fvecs("/nonexistent/jlsh/x.fvecs"), IoError);
}

TEST(Fvecs, WriteReadRoundTrip) {
  const auto dir = oracle::scratch_dir("fvecs_rt");
  const std::vector<RealVector> v{RealVector{0.5, -1.25, 3}, RealVector{0.001953125, 7, -0.0625}};
  write_fvecs(dir / "r.fvecs", v);
  EXPECT_EQ(read_fvecs(dir / "r.fvecs"), v);  // all components exact in float32
  EXPECT_EQ(read_vectors(dir / "r.fvecs").size(), 2u);
}

TEST(Bvecs, FixtureAndOffsets) {
  const auto dir = oracle::scratch_dir("bvecs");
  oracle::write_bytes(dir / "a.bvecs", {0x03, 0, 0, 0, 0, 7, 255, 0x03, 0, 0, 0, 1, 2, 3});
  const auto v = read_bvecs(dir / "a.bvecs");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], (RealVector{0, 7, 255}));
  EXPECT_EQ(v[1], (RealVector{1, 2, 3}));
  oracle::write_bytes(dir / "t.bvecs", {0x03, 0, 0, 0, 0, 7, 255, 0x03, 0, 0, 0, 1});
  EXPECT_EQ(format_offset(dir / "t.bvecs", true), 7u);
  oracle::write_bytes(dir / "m.bvecs", {0x01, 0, 0, 0, 9, 0x02, 0, 0, 0, 1, 2});
  EXPECT_EQ(format_offset(dir / "m.bvecs", true), 5u);
}

TEST(Bvecs, WriterRoundTripAndValidation) {
  const auto dir = oracle::scratch_dir("bvecs_rt");
  const std::vector<RealVector> v{RealVector{0, 128, 255}};
  write_bvecs(dir / "r.bvecs", v);
  EXPECT_EQ(read_bvecs(dir / "r.bvecs"), v);
  EXPECT_EQ(read_vectors(dir / "r.bvecs"), v);
  EXPECT_THROW(write_bvecs(dir / "x.bvecs", std::vector<RealVector>{RealVector{0.5}}), DomainError);
  EXPECT_THROW(write_bvecs(dir / "x.bvecs", std::vector<RealVector>{RealVector{256}}), DomainError);
}

TEST(NormalizeAll, UnitRowsAndZeroRow) {
  const auto n = normalize_all({RealVector{3, 4}, RealVector{0, 2}});
  EXPECT_EQ(n[1], (RealVector{0, 1}));
  EXPECT_NEAR(norm(n[0]), 1.0, 1e-15);
  EXPECT_THROW(normalize_all({RealVector{1, 0}, RealVector{0, 0}}), ZeroNormError);
}

TEST(GroundTruth, RoundTrip) {
  const auto dir = oracle::scratch_dir("gt");
  const std::vector<GroundTruthEntry> gt{
      {0, {{4, 0.0}, {2, 0.125}, {9, 1.0 / 3.0}}},
      {1, {}},
      {7, {{1, 2.0}}},
  };
  write_ground_truth(dir / "g.bin", gt);
  EXPECT_EQ(read_ground_truth(dir / "g.bin"), gt);
  oracle::write_bytes(dir / "bad.bin", {1, 0, 0, 0, 0, 0, 0, 0, 5, 0, 0, 0});
  EXPECT_THROW(read_ground_truth(dir / "bad.bin"), FormatError);
}
