#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "craftmaps/types.hpp"

namespace craftmaps {

/// Dense labelled examples. Labels are dense integers in [0, k); the
/// original label strings are kept in first-seen order in `label_names`.
struct Dataset {
  Matrix X;
  std::vector<int> y;
  std::size_t num_classes = 0;
  std::vector<std::string> label_names;
  std::vector<std::string> feature_names;

  std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(X.cols()); }

  /// Throws if the invariants (n >= 1, labels in range, finite X) fail.
  void validate() const;
};

struct CsvOptions {
  // Column holding the label; negative counts from the end (-1 = last).
  int label_column = -1;
  bool has_header = false;
  char delimiter = ',';
};

Dataset load_csv(const std::string& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options = {},
                  std::string_view source = "<csv>");
/// Features in shortest round-trip form; the label goes in the configured column.
void write_csv(const Dataset& data, std::ostream& out, const CsvOptions& options = {});

/// "<label> <index>:<value> ..." with 1-based indices.
Dataset load_libsvm(const std::string& path);
Dataset parse_libsvm(std::istream& in, std::string_view source = "<libsvm>");
void write_libsvm(const Dataset& data, std::ostream& out);

struct NormalizeResult {
  Dataset data;
  std::size_t zero_rows = 0;
};

/// Scales every row to unit Euclidean norm; all-zero rows stay zero and are counted.
NormalizeResult unit_normalize(Dataset data);

enum class SynthKind { kAnnuli, kGaussianBlobs, kXorGrid };

std::string_view to_string(SynthKind kind);
SynthKind parse_synth_kind(std::string_view name);

/// Seeded toy problems with class sizes balanced to within one example.
///  annuli:          class j on a circle of radius (j+1)/k in the first two
///                   coordinates, radial and extra-coordinate noise N(0, noise^2)
///  gaussian-blobs:  N(0, I) centroids, points centroid + N(0, noise^2 I)
///  xor-grid:        uniform in [-1,1]^2 (plus noise dims), label = sum of
///                   k-way cell indices mod k, position jitter N(0, noise^2)
Dataset synth(SynthKind kind, std::size_t n, std::size_t d, std::size_t k, double noise,
              std::uint64_t seed);

/// `count` distinct row indices of [0, total), ascending (all rows if count >= total).
std::vector<std::size_t> sample_rows(std::size_t total, std::size_t count, std::uint64_t seed);

Dataset subset(const Dataset& data, std::span<const std::size_t> rows);

/// n points drawn uniformly from the unit sphere in R^d.
Matrix random_unit_rows(std::size_t n, std::size_t d, std::uint64_t seed);

}  // namespace craftmaps
