#include "qsaf/io.hpp"
#include "qsaf/experiments.hpp"
#include "qsaf/random.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace qsaf;

namespace {

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

io::Image random_image(Rng& rng, int w, int h) {
  io::Image img(w, h);
  for (auto& b : img.rgb) b = static_cast<std::uint8_t>(rng.uniformInt(0, 255));
  return img;
}

TEST(Ppm, ByteIdenticalRoundTrip) {
  Rng rng(101);
  const auto img = random_image(rng, 13, 7);
  const auto path = temp_file("qsaf_io_test.ppm");
  io::write_ppm(img, path);
  const auto back = io::read_ppm(path);
  EXPECT_EQ(back.width, img.width);
  EXPECT_EQ(back.height, img.height);
  EXPECT_EQ(back.rgb, img.rgb);

  // writing the re-read image reproduces the file byte for byte
  const auto path2 = temp_file("qsaf_io_test2.ppm");
  io::write_ppm(back, path2);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  EXPECT_EQ(sa, sb);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST(Ppm, HandlesCommentsAndRejectsMalformed) {
  const auto path = temp_file("qsaf_io_comment.ppm");
  {
    std::ofstream out(path, std::ios::binary);
    out << "P6\n# a comment\n2 1\n255\n";
    const unsigned char px[6] = {1, 2, 3, 4, 5, 6};
    out.write(reinterpret_cast<const char*>(px), 6);
  }
  const auto img = io::read_ppm(path);
  EXPECT_EQ(img.width, 2);
  EXPECT_EQ(img.at(1, 0, 2), 6);
  std::remove(path.c_str());

  const auto bad = temp_file("qsaf_io_bad.ppm");
  {
    std::ofstream out(bad, std::ios::binary);
    out << "P5\n2 1\n255\n";
  }
  EXPECT_THROW(io::read_ppm(bad), std::runtime_error);
  std::remove(bad.c_str());
  EXPECT_THROW(io::read_ppm(temp_file("qsaf_io_missing.ppm")), std::runtime_error);
}

TEST(Png, RoundTripPixels) {
  Rng rng(102);
  const auto img = random_image(rng, 9, 11);
  const auto path = temp_file("qsaf_io_test.png");
  io::write_png(img, path);
  const auto back = io::read_png(path);
  EXPECT_EQ(back.width, img.width);
  EXPECT_EQ(back.height, img.height);
  EXPECT_EQ(back.rgb, img.rgb);
  std::remove(path.c_str());
}

TEST(Csv, HeaderMatchesDiagnosticsSchema) {
  const std::vector<DiagnosticsRow> rows{{0, 0.5, -1.25}, {1, 0.25, -1.5}};
  const auto path = temp_file("qsaf_io_test.csv");
  io::write_diagnostics_csv(rows, path);
  std::ifstream in(path);
  std::string header, line1;
  std::getline(in, header);
  std::getline(in, line1);
  EXPECT_EQ(header, "iter,purity_gap_max,potential_J");
  EXPECT_EQ(line1, "0,0.5,-1.25");
  std::remove(path.c_str());
}

TEST(Json, ReportReparseEquality) {
  io::Json report{{"command", "test"}, {"eps", 0.1}, {"iterations", 42}};
  const auto path = temp_file("qsaf_io_test.json");
  io::write_json(report, path);
  EXPECT_EQ(io::read_json(path), report);
  std::remove(path.c_str());
}

TEST(Json, MatrixRoundTrip) {
  Rng rng(103);
  const CMatrix m = rng.complexGaussian(3);
  const auto j = io::matrix_to_json(m);
  EXPECT_LE((io::matrix_from_json(j) - m).norm(), 0.0);
}

TEST(BlochImageMap, CubeCornersAndRoundTrip) {
  // corners of the RGB cube land just inside the unit sphere
  const auto corner = experiments::rgb_to_bloch(1.0, 1.0, 1.0);
  EXPECT_NEAR(corner.norm(), 1.0 - kBlochBoundaryShrink, 1e-12);
  const auto mid = experiments::rgb_to_bloch(0.5, 0.5, 0.5);
  EXPECT_NEAR(mid.norm(), 0.0, 1e-12);

  Rng rng(104);
  const auto img = random_image(rng, 6, 4);
  const auto field = experiments::image_to_bloch(img);
  const auto back = experiments::bloch_to_image(field, 6, 4);
  EXPECT_EQ(back.rgb, img.rgb);
}

TEST(PatchLayout, SplitsAndReassembles) {
  Rng rng(105);
  Eigen::MatrixXd gray(9, 13);  // forces cropping to 8 x 12 with side 4
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 13; ++c) gray(r, c) = rng.uniform();
  const auto layout = experiments::image_to_patches(gray, 4);
  EXPECT_EQ(layout.patch_rows, 2);
  EXPECT_EQ(layout.patch_cols, 3);
  EXPECT_EQ(layout.patches.size(), 6u);

  std::vector<Eigen::MatrixXd> raw;
  for (const auto& p : layout.patches) raw.push_back(p.raw());
  const auto assembled = experiments::patches_to_gray(layout, raw);
  EXPECT_LE((assembled - gray.topLeftCorner(8, 12)).norm(), 1e-12);
}

}  // namespace
