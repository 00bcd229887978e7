// File I/O for the command line tools: 8-bit RGB images (PPM and PNG),
// CSV diagnostics and JSON reports.

#pragma once

#include "qsaf/flow_config.hpp"
#include "qsaf/hermitian.hpp"

#include <png.h>

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace qsaf::io {

using Json = nlohmann::json;

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t& at(int x, int y, int ch) {
    return rgb[3 * (static_cast<std::size_t>(y) * width + x) + ch];
  }
  std::uint8_t at(int x, int y, int ch) const {
    return rgb[3 * (static_cast<std::size_t>(y) * width + x) + ch];
  }
};

namespace detail_io {

inline int next_token(std::istream& in) {
  // skips whitespace and '#' comments in PNM headers
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  return ch;
}

inline int read_pnm_int(std::istream& in) {
  int ch = next_token(in);
  if (ch == EOF || !std::isdigit(ch)) throw std::runtime_error("ppm: malformed header");
  int value = 0;
  while (ch != EOF && std::isdigit(ch)) {
    value = value * 10 + (ch - '0');
    ch = in.get();
  }
  return value;
}

}  // namespace detail_io

inline Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ppm: cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '6') throw std::runtime_error("ppm: not a P6 file: " + path);
  const int w = detail_io::read_pnm_int(in);
  const int h = detail_io::read_pnm_int(in);
  const int maxval = detail_io::read_pnm_int(in);
  if (w < 1 || h < 1 || maxval != 255)
    throw std::runtime_error("ppm: unsupported geometry or depth in " + path);
  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.rgb.data()),
          static_cast<std::streamsize>(img.rgb.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.rgb.size()))
    throw std::runtime_error("ppm: truncated pixel data in " + path);
  return img;
}

inline void write_ppm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("ppm: cannot write " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
  if (!out) throw std::runtime_error("ppm: write failed for " + path);
}

inline Image read_png(const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw std::runtime_error("png: cannot read " + path + ": " + png.message);
  png.format = PNG_FORMAT_RGB;
  Image img(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, img.rgb.data(), 0, nullptr)) {
    png_image_free(&png);
    throw std::runtime_error("png: decode failed for " + path + ": " + png.message);
  }
  return img;
}

inline void write_png(const Image& img, const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width);
  png.height = static_cast<png_uint_32>(img.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, img.rgb.data(), 0, nullptr))
    throw std::runtime_error("png: write failed for " + path + ": " + png.message);
}

inline Image read_image(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".ppm") return read_ppm(path);
  if (ext == ".png") return read_png(path);
  throw std::runtime_error("read_image: unsupported extension " + ext);
}

inline void write_image(const Image& img, const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".ppm") {
    write_ppm(img, path);
  } else if (ext == ".png") {
    write_png(img, path);
  } else {
    throw std::runtime_error("write_image: unsupported extension " + ext);
  }
}

/// Fixed-width decimal formatting keeps CSV output byte-stable.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_diagnostics_csv(const std::vector<DiagnosticsRow>& rows,
                                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  out << "iter,purity_gap_max,potential_J\n";
  for (const auto& r : rows)
    out << r.iter << "," << format_double(r.purity_gap_max) << ","
        << format_double(r.potential) << "\n";
  if (!out) throw std::runtime_error("csv: write failed for " + path);
}

inline void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("json: cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("json: write failed for " + path);
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("json: cannot open " + path);
  Json j;
  in >> j;
  return j;
}

inline Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const Json& j) {
  const auto rows = j.size();
  if (rows == 0) throw std::runtime_error("matrix_from_json: empty matrix");
  const auto cols = j.at(0).size();
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (j.at(i).size() != cols) throw std::runtime_error("matrix_from_json: ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      const auto& cell = j.at(i).at(k);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  return m;
}

}  // namespace qsaf::io
