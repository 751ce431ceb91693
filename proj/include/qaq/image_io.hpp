#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "qaq/error.hpp"
#include "qaq/image.hpp"

namespace qaq {

/// Rec.601 luma.
inline double luma601(double r, double g, double b) noexcept {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return bytes;
}

inline constexpr unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

inline bool is_png(const std::vector<unsigned char>& b) {
  return b.size() >= 8 && std::memcmp(b.data(), kPngSignature, 8) == 0;
}

inline GrayImage decode_png(const std::vector<unsigned char>& bytes, const std::string& path) {
  // Signature, IHDR length + tag, width, height, depth, colour type.
  if (bytes.size() < 8 + 8 + 13 || std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) {
    throw FormatError("'" + path + "': truncated or malformed PNG header");
  }
  const int bit_depth = bytes[24];
  const int color_type = bytes[25];
  if (bit_depth != 8) {
    throw FormatError("'" + path + "': unsupported PNG bit depth " + std::to_string(bit_depth) +
                      " (only 8-bit is supported)");
  }
  if (color_type != 0 && color_type != 2 && color_type != 3 && color_type != 4 &&
      color_type != 6) {
    throw FormatError("'" + path + "': unsupported PNG colour type " +
                      std::to_string(color_type));
  }

  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError("'" + path + "': " + image.message);
  }
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<unsigned char> raw(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("'" + path + "': " + msg);
  }

  const std::size_t w = image.width;
  const std::size_t h = image.height;
  std::vector<double> data(w * h);
  if (gray) {
    std::copy(raw.begin(), raw.end(), data.begin());
  } else {
    for (std::size_t i = 0; i < w * h; ++i) {
      data[i] = luma601(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]);
    }
  }
  return GrayImage(w, h, std::move(data));
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
inline std::string pnm_token(const std::vector<unsigned char>& b, std::size_t& pos) {
  for (;;) {
    while (pos < b.size() && std::isspace(b[pos])) ++pos;
    if (pos < b.size() && b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::string tok;
  while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') tok.push_back(static_cast<char>(b[pos++]));
  return tok;
}

inline std::size_t pnm_number(const std::vector<unsigned char>& b, std::size_t& pos,
                              const std::string& path, const char* field) {
  const std::string tok = pnm_token(b, pos);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw FormatError("'" + path + "': bad PGM " + field + " '" + tok + "'");
  }
  return static_cast<std::size_t>(std::stoull(tok));
}

inline GrayImage decode_pgm(const std::vector<unsigned char>& b, const std::string& path) {
  std::size_t pos = 2;
  const std::size_t w = pnm_number(b, pos, path, "width");
  const std::size_t h = pnm_number(b, pos, path, "height");
  const std::size_t maxval = pnm_number(b, pos, path, "maxval");
  if (w == 0 || h == 0) throw FormatError("'" + path + "': PGM has zero size");
  if (maxval == 0 || maxval > 255) {
    throw FormatError("'" + path + "': unsupported PGM maxval " + std::to_string(maxval) +
                      " (only 8-bit is supported)");
  }
  ++pos;  // single whitespace byte after maxval
  if (pos > b.size() || b.size() - pos < w * h) {
    throw FormatError("'" + path + "': truncated PGM pixel data");
  }
  std::vector<double> data(w * h);
  const double scale = 255.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < w * h; ++i) {
    data[i] = maxval == 255 ? b[pos + i] : b[pos + i] * scale;
  }
  return GrayImage(w, h, std::move(data));
}

}  // namespace detail

/// Decodes an 8-bit PNG (gray, RGB, palette, with or without alpha) or a
/// binary PGM (P5). Colour is reduced to Rec.601 luma.
inline GrayImage load_image(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (detail::is_png(bytes)) return detail::decode_png(bytes, path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    return detail::decode_pgm(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && std::isdigit(bytes[1])) {
    throw FormatError("'" + path + "': unsupported PNM variant P" +
                      std::string(1, static_cast<char>(bytes[1])) + " (only binary P5)");
  }
  throw FormatError("'" + path + "': unrecognized image format (expected PNG or PGM P5)");
}

/// Writes a binary PGM, rounding and clamping samples to [0, 255].
inline void write_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> bytes(img.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::clamp(std::round(img.values()[i]), 0.0, 255.0);
    bytes[i] = static_cast<unsigned char>(v);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace qaq
