#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "pcfbpm/io.hpp"

using namespace pcf;

namespace {

ComplexField2D random_field(unsigned seed) {
  Grid2D g = Grid2D::centered(12, 9, 0.1, 0.07);
  g.x0_um += 0.013;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  ComplexField2D f(g);
  for (auto& v : f.values) v = cplx(n(rng), n(rng));
  f.values[3] = cplx(-0.0, std::numeric_limits<double>::denorm_min());
  return f;
}

std::filesystem::path temp_dir(const char* name) {
  auto d = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(FieldDump, RoundTripIsBitExact) {
  const auto f = random_field(1);
  const auto dir = temp_dir("pcfbpm_io_roundtrip");
  write_field_dump(f, dir / "f.pcf");
  const auto g = read_field_dump(dir / "f.pcf");
  EXPECT_EQ(g.grid, f.grid);
  ASSERT_EQ(g.values.size(), f.values.size());
  EXPECT_EQ(std::memcmp(g.values.data(), f.values.data(), f.values.size() * sizeof(cplx)), 0);
  EXPECT_EQ(std::filesystem::file_size(dir / "f.pcf"), kDumpHeaderBytes + 16 * f.size());
  std::filesystem::remove_all(dir);
}

TEST(FieldDump, HeaderIsLittleEndian) {
  const std::string bytes = encode_field(random_field(2));
  EXPECT_EQ(bytes.substr(0, 4), "PCF1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 12);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 9);
}

TEST(FieldDump, TruncationNamesBothByteCounts) {
  const std::string bytes = encode_field(random_field(3));
  const std::string cut = bytes.substr(0, bytes.size() - 5);
  try {
    decode_field(cut);
    FAIL() << "no error";
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("truncated"), std::string::npos);
    EXPECT_NE(msg.find(std::to_string(bytes.size())), std::string::npos);
    EXPECT_NE(msg.find(std::to_string(cut.size())), std::string::npos);
  }
  EXPECT_THROW(decode_field(bytes.substr(0, 20)), FormatError);
  EXPECT_THROW(decode_field(bytes + "x"), FormatError);
}

TEST(FieldDump, ForeignFilesAreRejectedCleanly) {
  EXPECT_THROW(decode_field("PNG\x89 not a dump at all, padding padding padding padding"), FormatError);
  EXPECT_THROW(decode_field(""), FormatError);
  std::string bytes = encode_field(random_field(4));
  bytes[4] = 7;
  try {
    decode_field(bytes);
    FAIL() << "no error";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
}

TEST(FieldDump, MissingFileIsAnError) {
  EXPECT_THROW(read_field_dump("/nonexistent/dir/f.pcf"), Error);
}

TEST(FieldCsv, HasOneRowPerSample) {
  const auto f = random_field(5);
  const auto dir = temp_dir("pcfbpm_io_csv");
  write_field_csv(f, dir / "f.csv");
  std::ifstream in(dir / "f.csv");
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "x_um,y_um,re,im");
  std::size_t rows = 0;
  double x = 0, y = 0, re = 0, im = 0;
  while (std::getline(in, line)) {
    if (rows == 0) {
      char c;
      std::istringstream(line) >> x >> c >> y >> c >> re >> c >> im;
    }
    ++rows;
  }
  EXPECT_EQ(rows, f.size());
  EXPECT_DOUBLE_EQ(x, f.grid.x(0));
  EXPECT_DOUBLE_EQ(re, f.values[0].real());
  std::filesystem::remove_all(dir);
}

TEST(Summaries, ModesJsonCarriesTheSolution) {
  ModeSolution m;
  m.order = 0;
  m.n_eff = 1.44;
  m.beta_per_um = 5.8;
  m.converged = true;
  m.beta_imag_per_um = 1e-6;
  const auto j = modes_summary({m}, 1.55);
  EXPECT_EQ(j["lambda_um"], 1.55);
  ASSERT_EQ(j["modes"].size(), 1u);
  EXPECT_EQ(j["modes"][0]["n_eff"], 1.44);
  EXPECT_EQ(j["modes"][0]["method"], "imaginary-distance");
  EXPECT_EQ(j["modes"][0]["beta_imag_per_um"], 1e-6);
}

TEST(Summaries, SweepCsvAndCrossings) {
  VCurve c;
  c.kind = CurveKind::EmpiricalV;
  c.d_over_pitch = 0.5;
  c.points = {{0.1, 3.0, {}}, {0.2, 2.0, {}}, {0.3, std::nan(""), "bad"}};
  c.crossing = find_cutoff_crossing(c.points);
  const std::string csv = sweep_csv({c});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "kind,d_over_pitch,abscissa,V,single_mode");
  EXPECT_NE(csv.find("empirical,0.5,0.1,3,0"), std::string::npos);
  EXPECT_NE(csv.find("empirical,0.5,0.2,2,1"), std::string::npos);
  EXPECT_NE(csv.find("empirical,0.5,0.3,,"), std::string::npos);
  const auto j = crossings_summary({c});
  EXPECT_EQ(j["curves"][0]["crosses"], true);
  EXPECT_NEAR(j["curves"][0]["crossing"].get<double>(), 0.1595, 1e-12);
  EXPECT_EQ(j["curves"][0]["failed_points"].size(), 1u);
  EXPECT_EQ(j["curves"][0]["abscissa"], "lambda_over_pitch");
}
