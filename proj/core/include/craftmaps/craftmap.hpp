#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "craftmaps/hadamard.hpp"
#include "craftmaps/kernel.hpp"
#include "craftmaps/rfm.hpp"
#include "craftmaps/types.hpp"

namespace craftmaps {

enum class ProjectorKind { kDenseRademacher, kDenseGaussian, kSrht };

std::string_view to_string(ProjectorKind kind);
ProjectorKind parse_projector_kind(std::string_view name);

/// Dense Rademacher up to E = 4096, SRHT above.
ProjectorKind default_projector_kind(std::size_t output_dim);

/// Oblivious linear map R^D -> R^E (E < D) with E<Qu, Qv> = <u, v>.
///
/// Dense kinds hold an E x D matrix with entries +-1/sqrt(E) or N(0, 1/E),
/// regenerated from the seed unless materialized. The SRHT kind pads D to a
/// power of two and keeps E distinct Hadamard rows scaled by 1/sqrt(E).
class DownProjector {
 public:
  ProjectorKind kind() const { return kind_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  std::uint64_t seed() const { return seed_; }

  /// Entry (i, j) of the dense matrix; dense kinds only.
  double entry(std::size_t i, std::size_t j) const;

  /// Explicit E x D matrix of the operator (any kind).
  Matrix dense_matrix() const;

  const SrhtOperator* srht() const { return srht_ ? &*srht_ : nullptr; }

  void materialize();
  void release() { dense_.reset(); }
  bool materialized() const { return dense_.has_value(); }

 private:
  friend DownProjector build_down_projector(std::size_t, std::size_t, ProjectorKind,
                                            std::uint64_t);
  friend Matrix apply_down_batch(const DownProjector&, const Matrix&, unsigned);

  DownProjector() = default;

  ProjectorKind kind_ = ProjectorKind::kDenseRademacher;
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t key_ = 0;
  std::optional<Matrix> dense_;
  std::optional<SrhtOperator> srht_;
};

DownProjector build_down_projector(std::size_t input_dim, std::size_t output_dim,
                                   ProjectorKind kind, std::uint64_t seed);

std::vector<double> apply_down(const DownProjector& projector, std::span<const double> z);
Matrix apply_down_batch(const DownProjector& projector, const Matrix& Z, unsigned threads = 1);

using UpProjection = std::variant<RfmModel, SrhtRfmModel>;

enum class UpKind { kDense, kSrht };

std::size_t input_dim(const UpProjection& up);
std::size_t output_dim(const UpProjection& up);
Matrix apply_up_batch(const UpProjection& up, const Matrix& X, unsigned threads = 1);

/// Nonlinear up-projection to R^D followed by a linear down-projection to R^E.
class CraftMapModel {
 public:
  CraftMapModel(UpProjection up, DownProjector down);

  const UpProjection& up() const { return up_; }
  const DownProjector& down() const { return down_; }
  const PolyKernelParams& kernel() const;
  std::size_t input_dim() const { return craftmaps::input_dim(up_); }
  std::size_t up_dim() const { return down_.input_dim(); }
  std::size_t output_dim() const { return down_.output_dim(); }

 private:
  UpProjection up_;
  DownProjector down_;
};

struct CraftMapOptions {
  UpKind up = UpKind::kDense;
  // Unset: default_projector_kind(E).
  std::optional<ProjectorKind> down;
  RfmOptions rfm;
};

/// Up and down seeds are derived from `seed`.
CraftMapModel build_craftmap(std::size_t input_dim, std::size_t up_dim, std::size_t output_dim,
                             const PolyKernelParams& params, std::uint64_t seed,
                             const CraftMapOptions& options = {});

std::vector<double> apply_craftmap(const CraftMapModel& model, std::span<const double> x);
Matrix apply_craftmap_batch(const CraftMapModel& model, const Matrix& X, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Method-level facade used by the CLI and the model container.

enum class Method {
  kRfm,           // dense random feature map straight to output_dim
  kRfmSrht,       // Hadamard-structured random feature map straight to output_dim
  kCraftMap,      // dense up-projection, default down-projector
  kCraftMapSrht,  // Hadamard up-projection, SRHT down-projection
};

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
bool is_craftmap(Method method);

struct FeatureMapSpec {
  Method method = Method::kCraftMap;
  std::size_t input_dim = 0;
  // Ignored by the direct methods.
  std::size_t up_dim = 0;
  std::size_t output_dim = 0;
  int q = 1;
  int r = 2;
  double p = 2.0;
  DegreeSampling sampling = DegreeSampling::kTruncated;
  std::optional<ProjectorKind> down_kind;
  std::uint64_t seed = 0;

  friend bool operator==(const FeatureMapSpec&, const FeatureMapSpec&) = default;
};

class FeatureMap {
 public:
  /// Validates the spec and resolves defaults (down_kind).
  static FeatureMap build(const FeatureMapSpec& spec);

  const FeatureMapSpec& spec() const { return spec_; }
  std::size_t input_dim() const { return spec_.input_dim; }
  std::size_t output_dim() const { return spec_.output_dim; }
  const std::variant<RfmModel, SrhtRfmModel, CraftMapModel>& model() const { return model_; }

  std::vector<double> apply(std::span<const double> x) const;
  Matrix apply_batch(const Matrix& X, unsigned threads = 1) const;

 private:
  FeatureMap(FeatureMapSpec spec, std::variant<RfmModel, SrhtRfmModel, CraftMapModel> model)
      : spec_(std::move(spec)), model_(std::move(model)) {}

  FeatureMapSpec spec_;
  std::variant<RfmModel, SrhtRfmModel, CraftMapModel> model_;
};

}  // namespace craftmaps
