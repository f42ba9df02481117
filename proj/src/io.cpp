// Copyright 2026 The dispint Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dispint/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

namespace dispint {
namespace {

constexpr long long kMaxPixels = 1LL << 30;

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void check_dimensions(long long width, long long height, const std::filesystem::path& path) {
  if (width < 1 || height < 1) throw Error("unsupported format: bad dimensions in " + path.string());
  if (width * height > kMaxPixels || width > (1 << 24) || height > (1 << 24)) {
    throw Error("dimension overflow in " + path.string());
  }
}

std::uint16_t rec601(unsigned r, unsigned g, unsigned b) {
  return static_cast<std::uint16_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

// Netpbm header tokenizer: whitespace separated, '#' comments to end of line.
class PnmHeader {
 public:
  explicit PnmHeader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  std::optional<long long> next_int() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) return std::nullopt;
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1LL << 40)) return std::nullopt;
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  bool end_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) return false;
    ++pos_;
    return true;
  }

  std::size_t offset() const { return pos_; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 2;
};

GrayImage decode_pnm(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
  const bool color = bytes[1] == '6';
  PnmHeader header(bytes);
  const auto width = header.next_int();
  const auto height = header.next_int();
  const auto maxval = header.next_int();
  if (!width || !height || !maxval || !header.end_header() || *maxval < 1 || *maxval > 65535) {
    throw Error("unsupported format: malformed PNM header in " + path.string());
  }
  check_dimensions(*width, *height, path);
  const int bytes_per_sample = *maxval > 255 ? 2 : 1;
  const int channels = color ? 3 : 1;
  const auto needed = static_cast<std::size_t>(*width * *height * channels * bytes_per_sample);
  if (bytes.size() - header.offset() < needed) {
    throw Error("unsupported format: truncated raster in " + path.string());
  }

  GrayImage image;
  image.bit_depth = bytes_per_sample == 2 ? 16 : 8;
  image.pixels.resize(*height, *width);
  const unsigned char* p = bytes.data() + header.offset();
  auto sample = [&]() -> unsigned {
    unsigned v = *p++;
    if (bytes_per_sample == 2) v = (v << 8) | *p++;
    return v;
  };
  for (long long i = 0; i < *height; ++i) {
    for (long long j = 0; j < *width; ++j) {
      if (color) {
        const unsigned r = sample(), g = sample(), b = sample();
        image.pixels(i, j) = rec601(r, g, b);
      } else {
        image.pixels(i, j) = static_cast<std::uint16_t>(sample());
      }
    }
  }
  return image;
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct MemorySource {
  const std::vector<unsigned char>* bytes;
  std::size_t pos;
};

void png_read_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* src = static_cast<MemorySource*>(png_get_io_ptr(png));
  if (src->pos + count > src->bytes->size()) png_error(png, "truncated PNG stream");
  std::memcpy(out, src->bytes->data() + src->pos, count);
  src->pos += count;
}

GrayImage decode_png(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
  PngReader reader;
  reader.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!reader.png) throw Error("libpng initialisation failed");
  reader.info = png_create_info_struct(reader.png);
  if (!reader.info) throw Error("libpng initialisation failed");

  MemorySource source{&bytes, 0};
  GrayImage image;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  int channels = 1;
  int depth = 8;
  png_uint_32 width = 0, height = 0;

  if (setjmp(png_jmpbuf(reader.png))) {
    throw Error("unsupported format: corrupt PNG " + path.string());
  }
  png_set_read_fn(reader.png, &source, png_read_memory);
  png_read_info(reader.png, reader.info);
  width = png_get_image_width(reader.png, reader.info);
  height = png_get_image_height(reader.png, reader.info);
  depth = png_get_bit_depth(reader.png, reader.info);
  const int color_type = png_get_color_type(reader.png, reader.info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(reader.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(reader.png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(reader.png);
  if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(reader.png);
  png_read_update_info(reader.png, reader.info);
  channels = png_get_channels(reader.png, reader.info);
  depth = png_get_bit_depth(reader.png, reader.info);
  check_dimensions(width, height, path);

  const std::size_t stride = png_get_rowbytes(reader.png, reader.info);
  buffer.resize(stride * height);
  rows.resize(height);
  for (png_uint_32 i = 0; i < height; ++i) rows[i] = buffer.data() + i * stride;
  png_read_image(reader.png, rows.data());

  image.bit_depth = depth == 16 ? 16 : 8;
  image.pixels.resize(height, width);
  for (png_uint_32 i = 0; i < height; ++i) {
    for (png_uint_32 j = 0; j < width; ++j) {
      std::array<unsigned, 3> c{};
      for (int k = 0; k < std::min(channels, 3); ++k) {
        if (depth == 16) {
          std::uint16_t v;
          std::memcpy(&v, rows[i] + (j * channels + k) * 2, 2);
          c[k] = v;
        } else {
          c[k] = rows[i][j * channels + k];
        }
      }
      image.pixels(i, j) = channels >= 3 ? rec601(c[0], c[1], c[2]) : static_cast<std::uint16_t>(c[0]);
    }
  }
  return image;
}

float load_float(const unsigned char* p, bool little) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  if ((std::endian::native == std::endian::little) != little) v = __builtin_bswap32(v);
  return std::bit_cast<float>(v);
}

}  // namespace

GrayImage load_gray_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  static constexpr std::array<unsigned char, 8> kPngMagic{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin())) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 3 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes, path);
  }
  throw Error("unsupported format: " + path.string());
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const bool wide = image.bit_depth > 8;
  out << "P5\n" << image.width() << ' ' << image.height() << '\n' << (wide ? 65535 : 255) << '\n';
  for (int i = 0; i < image.height(); ++i) {
    for (int j = 0; j < image.width(); ++j) {
      const auto v = image.pixels(i, j);
      if (wide) out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xff));
    }
  }
  if (!out) throw Error("I/O failure writing " + path.string());
}

void write_mask_pgm(const Mask& mask, const std::filesystem::path& path) {
  GrayImage image;
  image.pixels = mask.cast<std::uint16_t>() * std::uint16_t{255};
  write_pgm(image, path);
}

GroundTruthMap read_pfm(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < 3 || bytes[0] != 'P' || bytes[1] != 'f' || !std::isspace(bytes[2])) {
    throw Error("header mismatch: not a single-channel PFM " + path.string());
  }
  // Header: "Pf" ws width ws height ws scale, then a single whitespace byte.
  std::size_t pos = 2;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  long long width = 0, height = 0;
  double scale = 0;
  try {
    std::size_t used = 0;
    const std::string w = token(), h = token(), s = token();
    width = std::stoll(w, &used);
    if (used != w.size()) throw std::invalid_argument(w);
    height = std::stoll(h, &used);
    if (used != h.size()) throw std::invalid_argument(h);
    scale = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw Error("header mismatch: unparsable PFM header in " + path.string());
  }
  if (pos >= bytes.size() || scale == 0.0) throw Error("header mismatch: bad PFM header in " + path.string());
  ++pos;
  check_dimensions(width, height, path);
  const auto payload = static_cast<std::size_t>(width * height * 4);
  if (bytes.size() - pos != payload) {
    throw Error("size mismatch: PFM payload has " + std::to_string(bytes.size() - pos) + " bytes, expected " +
                std::to_string(payload));
  }

  const bool little = scale < 0;
  GroundTruthMap map(static_cast<int>(height), static_cast<int>(width));
  const unsigned char* p = bytes.data() + pos;
  for (long long r = 0; r < height; ++r) {
    const long long i = height - 1 - r;
    for (long long j = 0; j < width; ++j, p += 4) {
      const float v = load_float(p, little);
      map.values(i, j) = std::isfinite(v) ? v : invalid_value<float>();
    }
  }
  return map;
}

void write_pfm(const Plane<float>& values, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "Pf\n" << values.cols() << ' ' << values.rows() << "\n-1.0\n";
  std::vector<unsigned char> row(values.cols() * 4);
  for (Eigen::Index r = values.rows() - 1; r >= 0; --r) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      float v = values(r, j);
      if (std::isnan(v)) v = std::numeric_limits<float>::infinity();
      std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
      if constexpr (std::endian::native != std::endian::little) bits = __builtin_bswap32(bits);
      std::memcpy(row.data() + j * 4, &bits, 4);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw Error("I/O failure writing " + path.string());
}

DisparityConvention parse_convention(const std::string& name) {
  if (name == "negative" || name == "negative-left") return DisparityConvention::kNegativeLeft;
  if (name == "positive") return DisparityConvention::kPositive;
  throw Error("unknown disparity convention '" + name + "'");
}

std::string to_string(DisparityConvention convention) {
  return convention == DisparityConvention::kNegativeLeft ? "negative" : "positive";
}

DisparityRange parse_disparity_range(const std::optional<std::filesystem::path>& calib,
                                     std::optional<int> d_min, std::optional<int> d_max,
                                     DisparityConvention convention) {
  if (d_min && d_max) return DisparityRange(*d_min, *d_max);
  if (!calib) throw Error("disparity range: neither a calib file nor --dmin/--dmax given");

  std::ifstream in(*calib);
  if (!in) throw Error("disparity range: cannot open calib " + calib->string());
  std::map<std::string, std::string> entries;
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  const auto it = entries.find("ndisp");
  if (it == entries.end()) throw Error("disparity range: no ndisp in " + calib->string());
  int ndisp = 0;
  try {
    ndisp = std::stoi(it->second);
  } catch (const std::exception&) {
    throw Error("disparity range: bad ndisp '" + it->second + "'");
  }
  if (ndisp < 2) throw Error("disparity range: ndisp must be >= 2");
  int lo = convention == DisparityConvention::kNegativeLeft ? -(ndisp - 1) : 0;
  int hi = convention == DisparityConvention::kNegativeLeft ? 0 : ndisp - 1;
  if (d_min) lo = *d_min;
  if (d_max) hi = *d_max;
  return DisparityRange(lo, hi);
}

}  // namespace dispint
