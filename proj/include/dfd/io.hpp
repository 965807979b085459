#pragma once

#include <png.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "error.hpp"
#include "raster.hpp"

namespace dfd {

enum class MapFormat { png16, raw_f32 };

/// Magic prefix of the raw float map format. Layout: "DFD1", width (u32 LE),
/// height (u32 LE), then width*height row-major IEEE-754 binary32 (LE).
inline constexpr std::array<char, 4> raw_magic{'D', 'F', 'D', '1'};

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline void require_exists(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw Error(Errc::missing_file, path.string());
}

inline FilePtr open_for_read(const std::filesystem::path& path) {
  require_exists(path);
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(Errc::io_failure, "cannot open " + path.string());
  return f;
}

inline FilePtr open_for_write(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(Errc::io_failure, "cannot write " + path.string());
  return f;
}

struct PngMessage {
  char text[256] = {};
};

inline void png_error_handler(png_structp png, png_const_charp msg) {
  if (auto* m = static_cast<PngMessage*>(png_get_error_ptr(png)))
    std::snprintf(m->text, sizeof m->text, "%s", msg);
  png_longjmp(png, 1);
}

inline void png_warning_handler(png_structp, png_const_charp) {}

/// Decoded PNG samples, one unsigned value per channel.
struct PngPixels {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint16_t> samples;
};

using PngChecker = void (*)(const std::filesystem::path&, int bit_depth, int color_type);

// libpng reports errors through longjmp; all objects with non-trivial
// destructors are constructed before setjmp so none of them are skipped.
inline PngPixels read_png(const std::filesystem::path& path, PngChecker check) {
  FilePtr file = open_for_read(path);
  PngPixels out;
  PngMessage msg;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;

  std::array<png_byte, 8> sig{};
  if (std::fread(sig.data(), 1, sig.size(), file.get()) != sig.size() ||
      png_sig_cmp(sig.data(), 0, sig.size()) != 0)
    throw Error(Errc::bad_format, path.string() + " is not a PNG file");

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &msg, png_error_handler, png_warning_handler);
  if (!png) throw Error(Errc::io_failure, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (!info) throw Error(Errc::io_failure, "png_create_info_struct failed");

  if (setjmp(png_jmpbuf(png)))
    throw Error(Errc::bad_format, path.string() + ": " + msg.text);

  png_init_io(png, file.get());
  png_set_sig_bytes(png, static_cast<int>(sig.size()));
  png_read_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  out.color_type = png_get_color_type(png, info);
  out.channels = png_get_channels(png, info);
  check(path, out.bit_depth, out.color_type);
  if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE)
    png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[y] = buffer.data() + row_bytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);

  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(n);
  if (out.bit_depth == 16) {
    for (std::size_t i = 0; i < n; ++i)
      out.samples[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = buffer[i];
  }
  return out;
}

inline void write_png(const std::filesystem::path& path, int width, int height, int channels,
                      int bit_depth, const std::vector<std::uint16_t>& samples) {
  FilePtr file = open_for_write(path);
  PngMessage msg;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &msg, png_error_handler, png_warning_handler);
  if (!png) throw Error(Errc::io_failure, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (!info) throw Error(Errc::io_failure, "png_create_info_struct failed");

  const int bytes = bit_depth / 8;
  const std::size_t row_bytes = static_cast<std::size_t>(width) * channels * bytes;
  buffer.resize(row_bytes * height);
  rows.resize(height);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (bytes == 2) {
      buffer[2 * i] = static_cast<png_byte>(samples[i] >> 8);
      buffer[2 * i + 1] = static_cast<png_byte>(samples[i] & 0xff);
    } else {
      buffer[i] = static_cast<png_byte>(samples[i]);
    }
  }
  for (int y = 0; y < height; ++y) rows[y] = buffer.data() + row_bytes * y;

  if (setjmp(png_jmpbuf(png)))
    throw Error(Errc::io_failure, path.string() + ": " + msg.text);

  png_init_io(png, file.get());
  const int color = channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
}

inline void put_u32le(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

inline std::uint32_t get_u32le(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void write_raw_samples(const std::filesystem::path& path, int width, int height,
                              std::span<const float> samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  out.write(raw_magic.data(), raw_magic.size());
  put_u32le(out, static_cast<std::uint32_t>(width));
  put_u32le(out, static_cast<std::uint32_t>(height));
  std::vector<char> bytes(samples.size() * 4);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(samples[i]);
    for (int k = 0; k < 4; ++k) bytes[4 * i + k] = static_cast<char>((bits >> (8 * k)) & 0xff);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_failure, "short write to " + path.string());
}

struct RawSamples {
  int width = 0;
  int height = 0;
  std::vector<float> samples;
};

inline RawSamples read_raw_samples(const std::filesystem::path& path) {
  require_exists(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), raw_magic.data(), 4) != 0)
    throw Error(Errc::bad_format, path.string() + " lacks the DFD1 header");
  RawSamples raw;
  const std::uint32_t w = get_u32le(bytes.data() + 4);
  const std::uint32_t h = get_u32le(bytes.data() + 8);
  if (w == 0 || h == 0 || w > (1u << 30) || h > (1u << 30))
    throw Error(Errc::bad_format, path.string() + ": invalid extent");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() != 12 + 4 * n)
    throw Error(Errc::bad_format, path.string() + ": payload size does not match extent");
  raw.width = static_cast<int>(w);
  raw.height = static_cast<int>(h);
  raw.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    raw.samples[i] = std::bit_cast<float>(get_u32le(bytes.data() + 12 + 4 * i));
  return raw;
}

inline void check_rgb_layout(const std::filesystem::path& path, int bit_depth, int color_type) {
  if (color_type != PNG_COLOR_TYPE_RGB)
    throw Error(Errc::bad_channel_layout, path.string() + " is not a 3-channel RGB PNG");
  if (bit_depth != 8 && bit_depth != 16)
    throw Error(Errc::unsupported_bit_depth,
                path.string() + " has bit depth " + std::to_string(bit_depth));
}

inline void check_depth_layout(const std::filesystem::path& path, int bit_depth, int color_type) {
  if (color_type != PNG_COLOR_TYPE_GRAY)
    throw Error(Errc::bad_channel_layout, path.string() + " is not a single-channel PNG");
  if (bit_depth != 16)
    throw Error(Errc::unsupported_bit_depth,
                path.string() + " has bit depth " + std::to_string(bit_depth) + ", expected 16");
}

}  // namespace detail

/// True if the file starts with the PNG signature.
inline bool is_png_file(const std::filesystem::path& path) {
  auto f = detail::open_for_read(path);
  std::array<png_byte, 8> sig{};
  return std::fread(sig.data(), 1, sig.size(), f.get()) == sig.size() &&
         png_sig_cmp(sig.data(), 0, sig.size()) == 0;
}

/// Reads an 8- or 16-bit RGB PNG, scaling samples by the format maximum.
inline RgbImage read_rgb(const std::filesystem::path& path) {
  auto png = detail::read_png(path, detail::check_rgb_layout);
  const float scale = png.bit_depth == 16 ? 65535.0f : 255.0f;
  std::vector<float> data(png.samples.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = png.samples[i] / scale;
  return {png.width, png.height, std::move(data)};
}

/// Reads a 16-bit single-channel depth PNG (raw units per meter given by
/// `scale`). Zero samples become invalid pixels.
inline DepthMap read_depth(const std::filesystem::path& path, double scale = 1000.0,
                           double max_depth = default_max_depth) {
  detail::require(scale > 0 && std::isfinite(scale), Errc::invalid_argument,
                  "depth scale must be positive");
  auto png = detail::read_png(path, detail::check_depth_layout);
  std::vector<float> meters(png.samples.size());
  std::vector<std::uint8_t> valid(png.samples.size());
  for (std::size_t i = 0; i < meters.size(); ++i) {
    valid[i] = png.samples[i] != 0;
    meters[i] = static_cast<float>(png.samples[i] / scale);
  }
  return {png.width, png.height, std::move(meters), std::move(valid), max_depth};
}

inline ScalarMap read_raw(const std::filesystem::path& path) {
  auto raw = detail::read_raw_samples(path);
  return {raw.width, raw.height, std::move(raw.samples)};
}

/// Reads depth from either a 16-bit PNG or a raw float map in meters.
/// In the raw form, zero samples mark invalid pixels.
inline DepthMap read_depth_any(const std::filesystem::path& path, double scale = 1000.0,
                               double max_depth = default_max_depth) {
  if (is_png_file(path)) return read_depth(path, scale, max_depth);
  auto raw = detail::read_raw_samples(path);
  std::vector<std::uint8_t> valid(raw.samples.size());
  for (std::size_t i = 0; i < valid.size(); ++i) valid[i] = raw.samples[i] != 0.0f;
  return {raw.width, raw.height, std::move(raw.samples), std::move(valid), max_depth};
}

/// Writes a scalar map. raw_f32 ignores `scale`; png16 stores
/// round(value * scale) and rejects anything outside [0, 65535].
inline void write_map(const ScalarMap& map, const std::filesystem::path& path, MapFormat format,
                      double scale = 1000.0) {
  if (format == MapFormat::raw_f32) {
    detail::write_raw_samples(path, map.width(), map.height(), map.data());
    return;
  }
  detail::require(std::isfinite(scale) && scale > 0, Errc::invalid_argument,
                  "png16 output needs a finite positive scale");
  std::vector<std::uint16_t> samples(map.pixels());
  auto data = map.data();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = std::round(static_cast<double>(data[i]) * scale);
    if (!(v >= 0.0 && v <= 65535.0))
      throw Error(Errc::out_of_range, "value " + std::to_string(data[i]) + " at scale " +
                                          std::to_string(scale) + " does not fit a 16-bit PNG");
    samples[i] = static_cast<std::uint16_t>(v);
  }
  detail::write_png(path, map.width(), map.height(), 1, 16, samples);
}

inline void write_map(const DepthMap& depth, const std::filesystem::path& path, MapFormat format,
                      double scale = 1000.0) {
  write_map(depth.map(), path, format, scale);
}

/// Writes an RGB image as an 8- or 16-bit PNG, rounding to nearest.
inline void write_rgb(const RgbImage& img, const std::filesystem::path& path, int bit_depth = 8) {
  detail::require(bit_depth == 8 || bit_depth == 16, Errc::invalid_argument,
                  "PNG bit depth must be 8 or 16");
  const double top = bit_depth == 16 ? 65535.0 : 255.0;
  std::vector<std::uint16_t> samples(img.data().size());
  auto data = img.data();
  for (std::size_t i = 0; i < samples.size(); ++i)
    samples[i] = static_cast<std::uint16_t>(std::round(data[i] * top));
  detail::write_png(path, img.width(), img.height(), 3, bit_depth, samples);
}

}  // namespace dfd
