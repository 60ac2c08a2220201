#include "craftmaps/craftmap.hpp"

#include <cmath>
#include <string>

#include "craftmaps/error.hpp"
#include "craftmaps/parallel.hpp"
#include "craftmaps/random.hpp"

namespace craftmaps {

std::string_view to_string(ProjectorKind kind) {
  switch (kind) {
    case ProjectorKind::kDenseRademacher: return "dense-rademacher";
    case ProjectorKind::kDenseGaussian: return "dense-gaussian";
    case ProjectorKind::kSrht: return "srht";
  }
  return "?";
}

ProjectorKind parse_projector_kind(std::string_view name) {
  if (name == "dense-rademacher") return ProjectorKind::kDenseRademacher;
  if (name == "dense-gaussian") return ProjectorKind::kDenseGaussian;
  if (name == "srht") return ProjectorKind::kSrht;
  throw InvalidArgument("unknown projector kind '" + std::string(name) + "'");
}

ProjectorKind default_projector_kind(std::size_t output_dim) {
  return output_dim <= 4096 ? ProjectorKind::kDenseRademacher : ProjectorKind::kSrht;
}

double DownProjector::entry(std::size_t i, std::size_t j) const {
  if (i >= output_dim_ || j >= input_dim_) throw InvalidArgument("DownProjector::entry: out of range");
  const double inv_sqrt_e = 1.0 / std::sqrt(static_cast<double>(output_dim_));
  switch (kind_) {
    case ProjectorKind::kDenseRademacher: {
      const std::size_t words = (input_dim_ + 63) / 64;
      std::uint64_t bits = counter_bits(key_, i * words + j / 64);
      return ((bits >> (j % 64)) & 1U) ? inv_sqrt_e : -inv_sqrt_e;
    }
    case ProjectorKind::kDenseGaussian: {
      const std::uint64_t slot = 2 * (i * input_dim_ + j);
      double u1 = bits_to_unit(counter_bits(key_, slot));
      double u2 = bits_to_unit(counter_bits(key_, slot + 1));
      return box_muller(u1, u2) * inv_sqrt_e;
    }
    case ProjectorKind::kSrht: break;
  }
  throw InvalidArgument("DownProjector::entry: SRHT projector has no stored entries");
}

Matrix DownProjector::dense_matrix() const {
  if (dense_) return *dense_;
  Matrix Q(output_dim_, input_dim_);
  if (kind_ == ProjectorKind::kSrht) {
    std::vector<double> unit(input_dim_, 0.0);
    std::vector<double> column(output_dim_);
    std::vector<double> scratch(srht_->dim_in_padded());
    for (std::size_t j = 0; j < input_dim_; ++j) {
      unit[j] = 1.0;
      srht_->apply_into(unit, column, scratch);
      unit[j] = 0.0;
      for (std::size_t i = 0; i < output_dim_; ++i) Q(i, j) = column[i];
    }
    return Q;
  }
  if (kind_ == ProjectorKind::kDenseRademacher) {
    const double inv_sqrt_e = 1.0 / std::sqrt(static_cast<double>(output_dim_));
    const std::size_t words = (input_dim_ + 63) / 64;
    for (std::size_t i = 0; i < output_dim_; ++i) {
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits = counter_bits(key_, i * words + w);
        const std::size_t end = std::min(input_dim_, (w + 1) * 64);
        for (std::size_t j = w * 64; j < end; ++j)
          Q(i, j) = ((bits >> (j % 64)) & 1U) ? inv_sqrt_e : -inv_sqrt_e;
      }
    }
    return Q;
  }
  for (std::size_t i = 0; i < output_dim_; ++i)
    for (std::size_t j = 0; j < input_dim_; ++j) Q(i, j) = entry(i, j);
  return Q;
}

void DownProjector::materialize() {
  if (kind_ != ProjectorKind::kSrht && !dense_) dense_ = dense_matrix();
}

DownProjector build_down_projector(std::size_t input_dim, std::size_t output_dim,
                                   ProjectorKind kind, std::uint64_t seed) {
  if (output_dim < 1) throw InvalidArgument("down-projection: output dimension must be >= 1");
  if (output_dim >= input_dim)
    throw InvalidArgument("down-projection requires E < D (E = " + std::to_string(output_dim) +
                          ", D = " + std::to_string(input_dim) + ")");
  DownProjector p;
  p.kind_ = kind;
  p.input_dim_ = input_dim;
  p.output_dim_ = output_dim;
  p.seed_ = seed;
  p.key_ = derive_seed(seed, "down-dense");
  if (kind == ProjectorKind::kSrht) {
    p.srht_ = SrhtOperator::random(input_dim, output_dim, derive_seed(seed, "down-srht"));
  } else {
    p.materialize();
  }
  return p;
}

Matrix apply_down_batch(const DownProjector& projector, const Matrix& Z, unsigned threads) {
  if (static_cast<std::size_t>(Z.cols()) != projector.input_dim())
    throw DimensionMismatch("down-projection", projector.input_dim(), Z.cols());
  const std::size_t n = Z.rows();
  Matrix out(n, projector.output_dim());
  if (const SrhtOperator* op = projector.srht()) {
    parallel_blocks(n, threads, [&](std::size_t begin, std::size_t end) {
      std::vector<double> scratch(op->dim_in_padded());
      for (std::size_t i = begin; i < end; ++i) {
        op->apply_into(std::span<const double>(Z.row(i).data(), Z.cols()),
                       std::span<double>(out.row(i).data(), out.cols()), scratch);
      }
    });
    return out;
  }
  Matrix regenerated;
  const Matrix* Q = projector.dense_ ? &*projector.dense_ : nullptr;
  if (Q == nullptr) {
    regenerated = projector.dense_matrix();
    Q = &regenerated;
  }
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_blocks(chunks, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const std::size_t r0 = c * kChunk;
      const std::size_t len = std::min(kChunk, n - r0);
      out.middleRows(r0, len).noalias() = Z.middleRows(r0, len) * Q->transpose();
    }
  });
  return out;
}

std::vector<double> apply_down(const DownProjector& projector, std::span<const double> z) {
  if (z.size() != projector.input_dim())
    throw DimensionMismatch("down-projection", projector.input_dim(), z.size());
  Matrix row = Eigen::Map<const Matrix>(z.data(), 1, z.size());
  Matrix out = apply_down_batch(projector, row);
  return std::vector<double>(out.data(), out.data() + out.size());
}

std::size_t input_dim(const UpProjection& up) {
  return std::visit([](const auto& m) { return m.input_dim(); }, up);
}

std::size_t output_dim(const UpProjection& up) {
  return std::visit([](const auto& m) { return m.output_dim(); }, up);
}

Matrix apply_up_batch(const UpProjection& up, const Matrix& X, unsigned threads) {
  if (const auto* dense = std::get_if<RfmModel>(&up)) return apply_rfm_batch(*dense, X, threads);
  return apply_srht_rfm_batch(std::get<SrhtRfmModel>(up), X, threads);
}

CraftMapModel::CraftMapModel(UpProjection up, DownProjector down)
    : up_(std::move(up)), down_(std::move(down)) {
  if (craftmaps::output_dim(up_) != down_.input_dim())
    throw DimensionMismatch("CraftMapModel: up-projection output vs down-projection input",
                            down_.input_dim(), craftmaps::output_dim(up_));
}

const PolyKernelParams& CraftMapModel::kernel() const {
  return std::visit([](const auto& m) -> const PolyKernelParams& { return m.kernel(); }, up_);
}

CraftMapModel build_craftmap(std::size_t input_dim, std::size_t up_dim, std::size_t output_dim,
                             const PolyKernelParams& params, std::uint64_t seed,
                             const CraftMapOptions& options) {
  if (output_dim >= up_dim)
    throw InvalidArgument("CRAFTMap requires E < D (E = " + std::to_string(output_dim) +
                          ", D = " + std::to_string(up_dim) + ")");
  const std::uint64_t up_seed = derive_seed(seed, "up");
  const std::uint64_t down_seed = derive_seed(seed, "down");
  UpProjection up = options.up == UpKind::kDense
                        ? UpProjection(build_rfm(input_dim, up_dim, params, up_seed, options.rfm))
                        : UpProjection(build_srht_rfm(input_dim, up_dim, params, up_seed, options.rfm));
  ProjectorKind kind = options.down.value_or(default_projector_kind(output_dim));
  return CraftMapModel(std::move(up), build_down_projector(up_dim, output_dim, kind, down_seed));
}

Matrix apply_craftmap_batch(const CraftMapModel& model, const Matrix& X, unsigned threads) {
  if (X.rows() == 0) throw InvalidArgument("apply_craftmap_batch: empty input");
  if (static_cast<std::size_t>(X.cols()) != model.input_dim())
    throw DimensionMismatch("apply_craftmap", model.input_dim(), X.cols());
  return apply_down_batch(model.down(), apply_up_batch(model.up(), X, threads), threads);
}

std::vector<double> apply_craftmap(const CraftMapModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim()) throw DimensionMismatch("apply_craftmap", model.input_dim(), x.size());
  Matrix row = Eigen::Map<const Matrix>(x.data(), 1, x.size());
  Matrix out = apply_craftmap_batch(model, row);
  return std::vector<double>(out.data(), out.data() + out.size());
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kRfm: return "rfm";
    case Method::kRfmSrht: return "rfm-srht";
    case Method::kCraftMap: return "craftmap";
    case Method::kCraftMapSrht: return "craftmap-srht";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "rfm") return Method::kRfm;
  if (name == "rfm-srht") return Method::kRfmSrht;
  if (name == "craftmap") return Method::kCraftMap;
  if (name == "craftmap-srht") return Method::kCraftMapSrht;
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

bool is_craftmap(Method method) {
  return method == Method::kCraftMap || method == Method::kCraftMapSrht;
}

FeatureMap FeatureMap::build(const FeatureMapSpec& requested) {
  FeatureMapSpec spec = requested;
  if (spec.input_dim == 0 || spec.output_dim == 0)
    throw InvalidArgument("feature map dimensions must be >= 1");
  PolyKernelParams params(spec.q, spec.r);
  RfmOptions rfm{spec.p, spec.sampling, true};
  switch (spec.method) {
    case Method::kRfm:
      spec.up_dim = 0;
      spec.down_kind.reset();
      return FeatureMap(spec, build_rfm(spec.input_dim, spec.output_dim, params,
                                        derive_seed(spec.seed, "up"), rfm));
    case Method::kRfmSrht:
      spec.up_dim = 0;
      spec.down_kind.reset();
      return FeatureMap(spec, build_srht_rfm(spec.input_dim, spec.output_dim, params,
                                             derive_seed(spec.seed, "up"), rfm));
    case Method::kCraftMap:
    case Method::kCraftMapSrht: {
      CraftMapOptions options;
      options.rfm = rfm;
      if (spec.method == Method::kCraftMapSrht) {
        options.up = UpKind::kSrht;
        if (!spec.down_kind) spec.down_kind = ProjectorKind::kSrht;
      }
      if (!spec.down_kind) spec.down_kind = default_projector_kind(spec.output_dim);
      options.down = spec.down_kind;
      return FeatureMap(spec, build_craftmap(spec.input_dim, spec.up_dim, spec.output_dim, params,
                                             spec.seed, options));
    }
  }
  throw InvalidArgument("unknown method");
}

Matrix FeatureMap::apply_batch(const Matrix& X, unsigned threads) const {
  return std::visit(
      [&](const auto& m) -> Matrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RfmModel>) return apply_rfm_batch(m, X, threads);
        else if constexpr (std::is_same_v<T, SrhtRfmModel>) return apply_srht_rfm_batch(m, X, threads);
        else return apply_craftmap_batch(m, X, threads);
      },
      model_);
}

std::vector<double> FeatureMap::apply(std::span<const double> x) const {
  if (x.size() != input_dim()) throw DimensionMismatch("FeatureMap::apply", input_dim(), x.size());
  Matrix row = Eigen::Map<const Matrix>(x.data(), 1, x.size());
  Matrix out = apply_batch(row);
  return std::vector<double>(out.data(), out.data() + out.size());
}

}  // namespace craftmaps
