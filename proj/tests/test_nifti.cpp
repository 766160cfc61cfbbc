#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <numeric>
#include <random>

#include "harmbench/nifti.hpp"
#include "oracles.hpp"

using namespace harmbench;

namespace {

VoxelGrid ramp_grid() {
  std::vector<double> v(8);
  std::iota(v.begin(), v.end(), 0.0);
  return VoxelGrid({2, 2, 2}, {}, v);
}

void put_float(std::vector<std::uint8_t>& b, std::size_t off, float v) {
  std::memcpy(b.data() + off, &v, 4);  // test host is little-endian, as is encode's default
}

void put_i16(std::vector<std::uint8_t>& b, std::size_t off, std::int16_t v) { std::memcpy(b.data() + off, &v, 2); }

Errc decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    (void)nifti::decode(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode unexpectedly succeeded";
  return Errc::InvalidArgument;
}

}  // namespace

static_assert(std::endian::native == std::endian::little, "fixtures assume a little-endian host");

TEST(Nifti, LoadsFloat32RampWithIdentityScaling) {
  auto bytes = nifti::encode(ramp_grid(), {.scl_slope = 0.0f});
  const auto g = nifti::decode(bytes);
  EXPECT_EQ(g.dims(), (Dims3{2, 2, 2}));
  ASSERT_EQ(g.values().size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(g.values()[i], double(i));
}

TEST(Nifti, AppliesSlopeAndIntercept) {
  auto bytes = nifti::encode(ramp_grid(), {.scl_slope = 0.0f});
  put_float(bytes, 112, 2.0f);
  put_float(bytes, 116, 1.0f);
  std::vector<std::string> warnings;
  auto prev = set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
  const auto g = nifti::decode(bytes);
  set_warning_sink(prev);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(g.values()[i], 2.0 * double(i) + 1.0);
  EXPECT_EQ(warnings.size(), 1u) << "slope outside {0,1} is logged";
}

TEST(Nifti, SingleVoxelFileLayout) {
  const auto bytes = nifti::encode(VoxelGrid({1, 1, 1}, {}, {0.0}));
  ASSERT_EQ(bytes.size(), 352u + 4u);
  const auto h = nifti::parse_header(bytes);
  EXPECT_EQ(h.sizeof_hdr, 348);
  EXPECT_EQ(h.vox_offset, 352.0f);
  EXPECT_EQ(h.datatype, 16);
  EXPECT_EQ(h.bitpix, 32);
  EXPECT_EQ(h.scl_slope, 1.0f);
  EXPECT_EQ(h.scl_inter, 0.0f);
  EXPECT_EQ(std::memcmp(bytes.data() + 344, "n+1\0", 4), 0);
  for (std::size_t k = 348; k < 356; ++k) EXPECT_EQ(bytes[k], 0) << k;
}

TEST(Nifti, RoundTripIsBitwiseForFloat32RepresentableValues) {
  oracle::TempDir tmp;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<float> u(-100.0f, 100.0f);
  std::vector<double> v(5 * 4 * 3);
  for (auto& x : v) x = u(rng);
  const VoxelGrid g({5, 4, 3}, {0.5, 0.75, 2.0}, v);
  write_volume(g, tmp / "a.nii");
  const auto back = load_volume(tmp / "a.nii");
  EXPECT_EQ(back.dims(), g.dims());
  EXPECT_EQ(back.spacing(), g.spacing());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(back.values()[i], v[i]);
}

TEST(Nifti, RoundTripRandomGridWithinFloat32Quantization) {
  oracle::TempDir tmp;
  std::mt19937_64 rng(11);
  const auto g = oracle::random_grid(rng, {8, 8, 8}, 0.2, 0.0, 1000.0);
  write_volume(g, tmp / "r.nii.gz");
  const auto back = load_volume(tmp / "r.nii.gz");
  const double quantum = 1000.0 * std::numeric_limits<float>::epsilon();
  for (std::size_t i = 0; i < g.values().size(); ++i) EXPECT_NEAR(back.values()[i], g.values()[i], quantum);
}

TEST(Nifti, PreservesAnisotropicSpacing) {
  oracle::TempDir tmp;
  const VoxelGrid g({2, 2, 2}, {0.41, 0.41, 0.6}, std::vector<double>(8, 1.0));
  write_volume(g, tmp / "s.nii");
  const auto back = load_volume(tmp / "s.nii");
  EXPECT_EQ(back.spacing().sx, double(0.41f));
  EXPECT_EQ(back.spacing().sy, double(0.41f));
  EXPECT_EQ(back.spacing().sz, double(0.6f));
}

TEST(Nifti, ByteSwappedFileLoadsIdentically) {
  std::mt19937_64 rng(3);
  const auto g = oracle::random_grid(rng, {4, 3, 5}, 0.3, 0.0, 50.0);
  for (auto dt : {nifti::Datatype::Int16, nifti::Datatype::Int32, nifti::Datatype::Float32, nifti::Datatype::Float64}) {
    const auto le = nifti::encode(g, {.datatype = dt, .scl_slope = 0.01f, .scl_inter = -2.0f});
    const auto be_encoded = nifti::encode(g, {.datatype = dt, .byte_order = std::endian::big,
                                              .scl_slope = 0.01f, .scl_inter = -2.0f});
    const auto swapped = oracle::byte_swap_nifti(le, nifti::bits_per_voxel(dt), 352);
    EXPECT_EQ(swapped, be_encoded) << "encoder and field-wise swap agree";
    const auto a = nifti::decode(le);
    const auto b = nifti::decode(swapped);
    EXPECT_EQ(nifti::parse_header(swapped).byte_order, std::endian::big);
    ASSERT_EQ(a.values().size(), b.values().size());
    for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_EQ(a.values()[i], b.values()[i]);
    EXPECT_EQ(a.spacing(), b.spacing());
  }
}

TEST(Nifti, GzipDetectedByContentNotName) {
  oracle::TempDir tmp;
  const auto bytes = gzip::compress(nifti::encode(ramp_grid()));
  nifti::write_file_bytes(tmp / "plain-name.nii", bytes);
  const auto g = load_volume(tmp / "plain-name.nii");
  EXPECT_EQ(g.values()[7], 7.0);
}

TEST(Nifti, MultichannelVolumesKeepChannelBlocks) {
  std::vector<double> v(16);
  std::iota(v.begin(), v.end(), 1.0);
  const VoxelGrid g({2, 2, 2}, {}, v, 2);
  const auto back = nifti::decode(nifti::encode(g));
  EXPECT_EQ(back.channels(), 2u);
  EXPECT_EQ(back.channel(1).values()[0], 9.0);
}

TEST(Nifti, OrientationIsCarriedThrough) {
  Orientation o;
  o.sform_code = 4;
  o.srow = {1, 0, 0, -90, 0, 1, 0, -126, 0, 0, 1, -72};
  const VoxelGrid g({2, 2, 2}, {}, std::vector<double>(8, 1.0), 1, o);
  EXPECT_EQ(nifti::decode(nifti::encode(g)).orientation(), o);
}

TEST(Nifti, RejectsWrongHeaderSize) {
  auto b = nifti::encode(ramp_grid());
  b[0] = 0x5D;
  EXPECT_EQ(decode_error(b), Errc::MalformedHeader);
}

TEST(Nifti, RejectsPairedHeaderMagic) {
  auto b = nifti::encode(ramp_grid());
  std::memcpy(b.data() + 344, "ni1\0", 4);
  EXPECT_EQ(decode_error(b), Errc::MalformedHeader);
}

TEST(Nifti, RejectsBadMagic) {
  auto b = nifti::encode(ramp_grid());
  std::memcpy(b.data() + 344, "abcd", 4);
  EXPECT_EQ(decode_error(b), Errc::MalformedHeader);
}

TEST(Nifti, RejectsUnsupportedDatatype) {
  auto b = nifti::encode(ramp_grid());
  put_i16(b, 70, 128);  // RGB24
  put_i16(b, 72, 24);
  EXPECT_EQ(decode_error(b), Errc::UnsupportedDatatype);
}

TEST(Nifti, RejectsInconsistentBitpix) {
  auto b = nifti::encode(ramp_grid());
  put_i16(b, 72, 64);
  EXPECT_EQ(decode_error(b), Errc::MalformedHeader);
}

TEST(Nifti, RejectsNonPositiveSpacingAndExtent) {
  auto b = nifti::encode(ramp_grid());
  put_float(b, 80, 0.0f);
  EXPECT_EQ(decode_error(b), Errc::MalformedHeader);
  b = nifti::encode(ramp_grid());
  put_i16(b, 44, 0);
  EXPECT_EQ(decode_error(b), Errc::MalformedHeader);
}

TEST(Nifti, RejectsTruncatedData) {
  auto b = nifti::encode(ramp_grid());
  b.resize(b.size() - 1);
  EXPECT_EQ(decode_error(b), Errc::TruncatedData);
  auto gz = gzip::compress(nifti::encode(ramp_grid()));
  gz.resize(gz.size() / 2);
  EXPECT_EQ(decode_error(gz), Errc::TruncatedData);
}

TEST(Nifti, RejectsShortHeader) {
  std::vector<std::uint8_t> b(100, 0);
  EXPECT_EQ(decode_error(b), Errc::MalformedHeader);
}

TEST(Nifti, RejectsNonFiniteVoxels) {
  auto b = nifti::encode(ramp_grid());
  put_float(b, 352 + 4 * 3, std::numeric_limits<float>::quiet_NaN());
  EXPECT_EQ(decode_error(b), Errc::NonFiniteVoxel);
  b = nifti::encode(ramp_grid());
  put_float(b, 352, std::numeric_limits<float>::infinity());
  EXPECT_EQ(decode_error(b), Errc::NonFiniteVoxel);
}

TEST(Nifti, MissingFileIsIoFailure) {
  try {
    (void)load_volume("/nonexistent/harmbench/none.nii");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IoFailure);
  }
}

TEST(Nifti, LabelVolumesRoundTripAsIntegers) {
  oracle::TempDir tmp;
  const LabelVolume seg({2, 2, 2}, {1, 1, 1}, {0, 1, 1, 2, 2, 2, 0, 0}, {{1, "GM"}, {2, "WM"}});
  write_label_volume(seg, tmp / "seg.nii.gz");
  const auto back = load_label_volume(tmp / "seg.nii.gz", {{1, "GM"}});
  EXPECT_EQ(std::vector<std::uint32_t>(back.labels().begin(), back.labels().end()),
            std::vector<std::uint32_t>(seg.labels().begin(), seg.labels().end()));
  EXPECT_EQ(back.legend().at(1), "GM");
  EXPECT_EQ(back.legend().at(2), "label-2");
}

TEST(Nifti, FractionalLabelsAreRejected) {
  try {
    (void)to_label_volume(VoxelGrid({1, 1, 2}, {}, {0.0, 1.5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidLabel);
  }
}
