#pragma once

// File output helpers for the command-line tool: PPM rasters, polyline
// renders and SHA-256 digests for run manifests. Needs OpenSSL (libcrypto).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "imgeo/error.hpp"
#include "imgeo/flow.hpp"
#include "imgeo/geometry.hpp"
#include "imgeo/gff.hpp"

namespace imgeo {

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    throw InputError("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string file_sha256(const std::string& path) { return sha256_hex(read_file(path)); }

using Rgb = std::array<unsigned char, 3>;

/// Fully saturated hue h in [0,1).
inline Rgb hue_rgb(double h) {
  h = h - std::floor(h);
  const double x = 6.0 * h;
  const int sector = std::min(static_cast<int>(x), 5);
  const double f = x - sector;
  auto b = [](double v) { return static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0))); };
  switch (sector) {
    case 0: return {255, b(f), 0};
    case 1: return {b(1 - f), 255, 0};
    case 2: return {0, 255, b(f)};
    case 3: return {0, b(1 - f), 255};
    case 4: return {b(f), 0, 255};
    default: return {255, 0, b(1 - f)};
  }
}

class Raster {
 public:
  Raster(int w, int h, Rgb bg = {255, 255, 255}) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h, bg) {}

  int width() const { return w_; }
  int height() const { return h_; }
  void set(int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < w_ && y < h_) px_[static_cast<std::size_t>(y) * w_ + x] = c;
  }

  // Bresenham
  void line(int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      set(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void write_ppm(std::ostream& os) const {
    os << "P6\n" << w_ << ' ' << h_ << "\n255\n";
    for (const Rgb& c : px_) os.write(reinterpret_cast<const char*>(c.data()), 3);
  }

 private:
  int w_, h_;
  std::vector<Rgb> px_;
};

/// Grayscale render of the field, one pixel per vertex, north at the top;
/// values are scaled linearly between the field's min and max.
inline void write_field_ppm(std::ostream& os, const FieldGrid& g) {
  const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
  const double span = *hi > *lo ? *hi - *lo : 1.0;
  Raster r(g.n, g.n);
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      const auto v = static_cast<unsigned char>(std::lround(255.0 * (g.at(i, j) - *lo) / span));
      r.set(i, g.n - 1 - j, {v, v, v});
    }
  r.write_ppm(os);
}

/// Polylines drawn over the window, each coloured by hue = theta / 2 pi.
inline void write_lines_ppm(std::ostream& os, const Rect& w, const std::vector<FlowLine>& lines, int size = 800) {
  Raster r(size, size);
  auto px = [&](Point p) {
    const int x = static_cast<int>(std::lround((p.real() - w.x0) / w.width() * (size - 1)));
    const int y = static_cast<int>(std::lround((w.y1 - p.imag()) / w.height() * (size - 1)));
    return std::pair{x, y};
  };
  for (const FlowLine& l : lines) {
    const Rgb c = hue_rgb(l.theta / kTwoPi);
    for (std::size_t k = 0; k + 1 < l.points.size(); ++k) {
      auto [x0, y0] = px(l.points[k]);
      auto [x1, y1] = px(l.points[k + 1]);
      r.line(x0, y0, x1, y1, c);
    }
  }
  r.write_ppm(os);
}

}  // namespace imgeo
