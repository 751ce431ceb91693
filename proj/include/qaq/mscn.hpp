#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "qaq/error.hpp"
#include "qaq/image.hpp"
#include "qaq/local_stats.hpp"

namespace qaq {

/// Mean-subtracted contrast-normalized coefficients of an image.
struct MscnField {
  GrayImage coefficients;
};

/// (I - mu) / (sigma + 1) for precomputed local statistics of `img`.
inline MscnField mscn_from_stats(const GrayImage& img, const LocalStatsField& stats) {
  require_same_shape(img, stats.mu);
  std::vector<double> out(img.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s = stats.sigma.values()[i];
    // Zero deviation means a flat neighbourhood, so I == mu up to rounding.
    out[i] = s == 0.0 ? 0.0 : (img.values()[i] - stats.mu.values()[i]) / (s + 1.0);
  }
  return {GrayImage(img.width(), img.height(), std::move(out))};
}

/// (I - mu) / (sigma + 1), mu and sigma from local_stats.
inline MscnField mscn(const GrayImage& img, const Window& window = mscn_default_window()) {
  return mscn_from_stats(img, local_stats(img, window));
}

enum class Orientation { Horizontal, Vertical, MainDiagonal, AntiDiagonal };

inline constexpr std::array<Orientation, 4> kOrientations = {
    Orientation::Horizontal, Orientation::Vertical, Orientation::MainDiagonal,
    Orientation::AntiDiagonal};

inline std::string_view to_string(Orientation o) {
  switch (o) {
    case Orientation::Horizontal: return "H";
    case Orientation::Vertical: return "V";
    case Orientation::MainDiagonal: return "D1";
    case Orientation::AntiDiagonal: return "D2";
  }
  return "?";
}

/// Products of each coefficient with its neighbour along `o`:
///   H: (i,j)(i,j+1)   V: (i,j)(i+1,j)   D1: (i,j)(i+1,j+1)   D2: (i,j)(i+1,j-1)
/// Row-major over the positions where the neighbour exists.
inline std::vector<double> paired_products(const GrayImage& field, Orientation o) {
  const std::size_t w = field.width();
  const std::size_t h = field.height();
  if (w < 2 || h < 2) throw DimensionError("paired_products needs at least a 2x2 field");

  std::vector<double> out;
  switch (o) {
    case Orientation::Horizontal:
      out.reserve(h * (w - 1));
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j + 1 < w; ++j) out.push_back(field(i, j) * field(i, j + 1));
      break;
    case Orientation::Vertical:
      out.reserve((h - 1) * w);
      for (std::size_t i = 0; i + 1 < h; ++i)
        for (std::size_t j = 0; j < w; ++j) out.push_back(field(i, j) * field(i + 1, j));
      break;
    case Orientation::MainDiagonal:
      out.reserve((h - 1) * (w - 1));
      for (std::size_t i = 0; i + 1 < h; ++i)
        for (std::size_t j = 0; j + 1 < w; ++j) out.push_back(field(i, j) * field(i + 1, j + 1));
      break;
    case Orientation::AntiDiagonal:
      out.reserve((h - 1) * (w - 1));
      for (std::size_t i = 0; i + 1 < h; ++i)
        for (std::size_t j = 1; j < w; ++j) out.push_back(field(i, j) * field(i + 1, j - 1));
      break;
  }
  return out;
}

inline std::vector<double> paired_products(const MscnField& field, Orientation o) {
  return paired_products(field.coefficients, o);
}

}  // namespace qaq
