#include "weatherforge/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace weatherforge {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) {
    throw IoError("cannot open '" + path.string() + "' for " +
                  (mode[0] == 'r' ? "reading" : "writing"));
  }
  return f;
}

// libpng reports errors through longjmp; the thrown message is stashed here
// per call so we can rethrow as IoError after the jump.
struct PngErrorSink {
  std::string message;
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
  if (sink) sink->message = msg ? msg : "libpng error";
  longjmp(png_jmpbuf(png), 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

constexpr std::array<unsigned char, 8> kPngMagic = {0x89, 'P', 'N', 'G',
                                                   0x0D, 0x0A, 0x1A, 0x0A};

bool host_is_little_endian() {
  return std::endian::native == std::endian::little;
}

void swap_f32_bytes(float& v) {
  auto* b = reinterpret_cast<unsigned char*>(&v);
  std::swap(b[0], b[3]);
  std::swap(b[1], b[2]);
}

// --- PFM -------------------------------------------------------------------

// Header: magic ("PF" color / "Pf" gray), width, height, scale, each
// separated by whitespace, then one whitespace byte before the binary data.
// Negative scale means little-endian floats; scanlines run bottom-to-top.
struct PfmHeader {
  bool color = false;
  int width = 0;
  int height = 0;
  bool little_endian = false;
};

std::string next_token(std::istream& in) {
  std::string tok;
  in >> tok;
  return tok;
}

PfmHeader read_pfm_header(std::istream& in, const std::string& path) {
  PfmHeader h;
  const std::string magic = next_token(in);
  if (magic == "PF") {
    h.color = true;
  } else if (magic == "Pf") {
    h.color = false;
  } else {
    throw FormatError("'" + path + "': not a PFM file (magic '" + magic + "')");
  }
  const std::string ws = next_token(in);
  const std::string hs = next_token(in);
  const std::string ss = next_token(in);
  if (ws.empty() || hs.empty() || ss.empty()) {
    throw FormatError("'" + path + "': truncated PFM header");
  }
  try {
    h.width = std::stoi(ws);
    h.height = std::stoi(hs);
    const double scale = std::stod(ss);
    h.little_endian = scale < 0.0;
  } catch (const std::exception&) {
    throw FormatError("'" + path + "': malformed PFM header token");
  }
  if (h.width <= 0 || h.height <= 0) {
    throw FormatError("'" + path + "': invalid PFM dimensions");
  }
  in.get();  // single whitespace byte before the raster
  return h;
}

std::vector<float> read_pfm_samples(std::istream& in, const PfmHeader& h,
                                    const std::string& path) {
  const int channels = h.color ? 3 : 1;
  const std::size_t row_len = static_cast<std::size_t>(h.width) * channels;
  std::vector<float> data(row_len * h.height);
  const bool swap = h.little_endian != host_is_little_endian();
  // Bottom-to-top on disk, top-to-bottom in memory.
  for (int y = h.height - 1; y >= 0; --y) {
    float* row = data.data() + static_cast<std::size_t>(y) * row_len;
    in.read(reinterpret_cast<char*>(row),
            static_cast<std::streamsize>(row_len * sizeof(float)));
    if (!in) throw IoError("'" + path + "': truncated PFM data");
    if (swap) {
      for (std::size_t i = 0; i < row_len; ++i) swap_f32_bytes(row[i]);
    }
  }
  return data;
}

void write_pfm(const std::filesystem::path& path, bool color, int width,
               int height, const float* data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << (color ? "PF" : "Pf") << "\n" << width << " " << height << "\n"
      << "-1.0" << "\n";
  const int channels = color ? 3 : 1;
  const std::size_t row_len = static_cast<std::size_t>(width) * channels;
  const bool swap = !host_is_little_endian();
  std::vector<float> row_buf;
  for (int y = height - 1; y >= 0; --y) {
    const float* row = data + static_cast<std::size_t>(y) * row_len;
    if (swap) {
      row_buf.assign(row, row + row_len);
      for (float& v : row_buf) swap_f32_bytes(v);
      row = row_buf.data();
    }
    out.write(reinterpret_cast<const char*>(row),
              static_cast<std::streamsize>(row_len * sizeof(float)));
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Image read_image_pfm(std::istream& in, const std::string& path) {
  const PfmHeader h = read_pfm_header(in, path);
  if (!h.color) {
    throw FormatError("'" + path +
                      "': single-channel PFM; use read_scalar_map");
  }
  std::vector<float> data = read_pfm_samples(in, h, path);
  for (float& v : data) {
    v = std::isfinite(v) ? std::clamp(v, 0.0f, 1.0f) : 0.0f;
  }
  return Image::from_data(h.width, h.height, std::move(data));
}

// --- PNG -------------------------------------------------------------------

Image read_image_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  PngErrorSink sink;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink,
                                           png_error_fn, png_warning_fn);
  if (!png) throw IoError("libpng: cannot allocate read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng: cannot allocate info struct");
  }

  int width = 0, height = 0, bit_depth = 0, color_type = 0;
  std::vector<std::uint8_t> raster;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("'" + path.string() + "': " + sink.message);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  bit_depth = png_get_bit_depth(png, info);
  color_type = png_get_color_type(png, info);

  if (color_type != PNG_COLOR_TYPE_RGB || (bit_depth != 8 && bit_depth != 16)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path.string() +
                      "': unsupported PNG (need 8- or 16-bit RGB, got depth " +
                      std::to_string(bit_depth) + " color type " +
                      std::to_string(color_type) + ")");
  }

  if (bit_depth == 16 && host_is_little_endian()) png_set_swap(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  raster.resize(row_bytes * height);
  rows.resize(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = raster.data() + static_cast<std::size_t>(y) * row_bytes;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::vector<float> data(static_cast<std::size_t>(width) * height * 3);
  if (bit_depth == 8) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      data[i] = static_cast<float>(raster[i]) / 255.0f;
    }
  } else {
    const auto* samples16 = reinterpret_cast<const std::uint16_t*>(raster.data());
    for (std::size_t i = 0; i < data.size(); ++i) {
      data[i] = static_cast<float>(samples16[i]) / 65535.0f;
    }
  }
  return Image::from_data(width, height, std::move(data));
}

void write_image_png(const Image& img, const std::filesystem::path& path,
                     int bit_depth) {
  FilePtr file = open_file(path, "wb");
  PngErrorSink sink;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink,
                                            png_error_fn, png_warning_fn);
  if (!png) throw IoError("libpng: cannot allocate write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng: cannot allocate info struct");
  }

  const int w = img.width();
  const int h = img.height();
  std::vector<std::uint8_t> raster;
  std::vector<png_bytep> rows(h);
  const std::span<const float> src = img.samples();
  if (bit_depth == 8) {
    raster.resize(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) raster[i] = quantize8(src[i]);
  } else {
    raster.resize(src.size() * 2);
    auto* out16 = reinterpret_cast<std::uint16_t*>(raster.data());
    for (std::size_t i = 0; i < src.size(); ++i) out16[i] = quantize16(src[i]);
  }
  const std::size_t row_bytes =
      static_cast<std::size_t>(w) * 3 * (bit_depth / 8);
  for (int y = 0; y < h; ++y) {
    rows[y] = raster.data() + static_cast<std::size_t>(y) * row_bytes;
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("'" + path.string() + "': " + sink.message);
  }

  png_init_io(png, file.get());
  // Fixed encoder settings keep dataset trees byte-identical across runs.
  png_set_compression_level(png, 4);
  png_set_IHDR(png, info, w, h, bit_depth, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16 && host_is_little_endian()) png_set_swap(png);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

std::uint8_t quantize8(float s) {
  // nearbyint under the default FE_TONEAREST mode rounds half to even.
  const double v = std::nearbyint(static_cast<double>(s) * 255.0);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

std::uint16_t quantize16(float s) {
  const double v = std::nearbyint(static_cast<double>(s) * 65535.0);
  return static_cast<std::uint16_t>(std::clamp(v, 0.0, 65535.0));
}

Image read_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open '" + path.string() + "' for reading");
  std::array<unsigned char, 8> magic{};
  probe.read(reinterpret_cast<char*>(magic.data()), magic.size());
  if (probe.gcount() >= 2 && magic[0] == 'P' &&
      (magic[1] == 'F' || magic[1] == 'f')) {
    probe.clear();
    probe.seekg(0);
    return read_image_pfm(probe, path.string());
  }
  probe.close();
  if (std::equal(kPngMagic.begin(), kPngMagic.end(), magic.begin())) {
    return read_image_png(path);
  }
  throw FormatError("'" + path.string() + "': not a PNG or PFM file");
}

void write_image(const Image& img, const std::filesystem::path& path,
                 int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw ConfigError("PNG bit depth must be 8 or 16, got " +
                      std::to_string(bit_depth));
  }
  if (img.empty()) throw ShapeError("cannot write empty image");
  write_image_png(img, path, bit_depth);
}

void write_image_pfm(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) throw ShapeError("cannot write empty image");
  write_pfm(path, /*color=*/true, img.width(), img.height(),
            img.samples().data());
}

ScalarMap read_scalar_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  const PfmHeader h = read_pfm_header(in, path.string());
  if (h.color) {
    throw FormatError("'" + path.string() +
                      "': 3-channel PFM; use read_image");
  }
  std::vector<float> data = read_pfm_samples(in, h, path.string());
  return ScalarMap::from_data(h.width, h.height, std::move(data));
}

void write_scalar_map(const ScalarMap& map, const std::filesystem::path& path) {
  if (map.empty()) throw ShapeError("cannot write empty scalar map");
  write_pfm(path, /*color=*/false, map.width(), map.height(),
            map.samples().data());
}

}  // namespace weatherforge
