#include "craftmaps/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "craftmaps/error.hpp"

namespace craftmaps {

namespace {

static_assert(std::endian::native == std::endian::little,
              "model container I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw FormatError("model container is truncated");
  return value;
}

void write_header(std::ostream& out, PayloadKind kind) {
  out.write(kContainerMagic, sizeof(kContainerMagic));
  put<std::uint32_t>(out, kContainerVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(kind));
}

PayloadKind read_header(std::istream& in) {
  char magic[sizeof(kContainerMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kContainerMagic, sizeof(magic)) != 0)
    throw FormatError("not a CRAFTMAP model container (bad magic)");
  auto version = get<std::uint32_t>(in);
  if (version != kContainerVersion)
    throw FormatError("unsupported model container version " + std::to_string(version) +
                      " (this build reads version " + std::to_string(kContainerVersion) + ")");
  auto kind = get<std::uint32_t>(in);
  if (kind != 1 && kind != 2) throw FormatError("unknown payload kind " + std::to_string(kind));
  return static_cast<PayloadKind>(kind);
}

std::uint8_t down_code(const std::optional<ProjectorKind>& kind) {
  if (!kind) return 0;
  switch (*kind) {
    case ProjectorKind::kDenseRademacher: return 1;
    case ProjectorKind::kDenseGaussian: return 2;
    case ProjectorKind::kSrht: return 3;
  }
  return 0;
}

void write_spec(std::ostream& out, const FeatureMapSpec& spec) {
  put<std::uint8_t>(out, static_cast<std::uint8_t>(spec.method));
  put<std::uint8_t>(out, spec.sampling == DegreeSampling::kTruncated ? 0 : 1);
  put<std::uint8_t>(out, down_code(spec.down_kind));
  put<std::uint8_t>(out, 0);
  put<std::uint64_t>(out, spec.input_dim);
  put<std::uint64_t>(out, spec.up_dim);
  put<std::uint64_t>(out, spec.output_dim);
  put<std::int32_t>(out, spec.q);
  put<std::int32_t>(out, spec.r);
  put<double>(out, spec.p);
  put<std::uint64_t>(out, spec.seed);
}

FeatureMapSpec read_spec(std::istream& in) {
  FeatureMapSpec spec;
  auto method = get<std::uint8_t>(in);
  auto sampling = get<std::uint8_t>(in);
  auto down = get<std::uint8_t>(in);
  get<std::uint8_t>(in);
  if (method > 3) throw FormatError("unknown feature map method code " + std::to_string(method));
  if (sampling > 1) throw FormatError("unknown degree sampling code " + std::to_string(sampling));
  if (down > 3) throw FormatError("unknown projector code " + std::to_string(down));
  spec.method = static_cast<Method>(method);
  spec.sampling = sampling == 0 ? DegreeSampling::kTruncated : DegreeSampling::kUntruncated;
  if (down == 1) spec.down_kind = ProjectorKind::kDenseRademacher;
  if (down == 2) spec.down_kind = ProjectorKind::kDenseGaussian;
  if (down == 3) spec.down_kind = ProjectorKind::kSrht;
  spec.input_dim = get<std::uint64_t>(in);
  spec.up_dim = get<std::uint64_t>(in);
  spec.output_dim = get<std::uint64_t>(in);
  spec.q = get<std::int32_t>(in);
  spec.r = get<std::int32_t>(in);
  spec.p = get<double>(in);
  spec.seed = get<std::uint64_t>(in);
  return spec;
}

}  // namespace

void write_feature_map(std::ostream& out, const FeatureMapSpec& spec) {
  write_header(out, PayloadKind::kFeatureMap);
  write_spec(out, spec);
}

FeatureMapSpec read_feature_map(std::istream& in) {
  if (read_header(in) != PayloadKind::kFeatureMap)
    throw FormatError("container holds a classifier, not a bare feature map");
  return read_spec(in);
}

void write_classifier(std::ostream& out, const ClassifierModel& model) {
  write_header(out, PayloadKind::kClassifier);
  write_spec(out, model.map);
  put<std::uint64_t>(out, model.root_seed);
  put<std::uint64_t>(out, model.config_hash);
  const auto& codes = model.ecoc.codebook().codes();
  const auto& W = model.ecoc.weights();
  if (static_cast<std::size_t>(W.rows()) != model.map.output_dim)
    throw DimensionMismatch("classifier weights vs feature map", model.map.output_dim, W.rows());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(codes.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(codes.cols()));
  for (Eigen::Index i = 0; i < codes.rows(); ++i)
    for (Eigen::Index j = 0; j < codes.cols(); ++j) put<std::int8_t>(out, codes(i, j) > 0 ? 1 : -1);
  put<double>(out, model.ecoc.lambda());
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j) put<double>(out, W(i, j));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.label_names.size()));
  for (const auto& name : model.label_names) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
}

ClassifierModel read_classifier(std::istream& in) {
  if (read_header(in) != PayloadKind::kClassifier)
    throw FormatError("container holds a bare feature map, not a classifier");
  FeatureMapSpec spec = read_spec(in);
  auto root_seed = get<std::uint64_t>(in);
  auto config_hash = get<std::uint64_t>(in);
  auto k = get<std::uint32_t>(in);
  auto c = get<std::uint32_t>(in);
  if (k == 0 || c == 0 || k > (1u << 20) || c > (1u << 20)) throw FormatError("implausible codebook shape");
  Eigen::MatrixXd codes(k, c);
  for (std::uint32_t i = 0; i < k; ++i) {
    for (std::uint32_t j = 0; j < c; ++j) {
      auto v = get<std::int8_t>(in);
      if (v != 1 && v != -1) throw FormatError("codebook entry is not +-1");
      codes(i, j) = v;
    }
  }
  auto lambda = get<double>(in);
  if (spec.output_dim == 0 || spec.output_dim > (std::size_t{1} << 26))
    throw FormatError("implausible feature dimension");
  Eigen::MatrixXd W(spec.output_dim, c);
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = get<double>(in);
  auto names = get<std::uint32_t>(in);
  std::vector<std::string> label_names;
  for (std::uint32_t i = 0; i < names; ++i) {
    auto len = get<std::uint32_t>(in);
    if (len > (1u << 16)) throw FormatError("implausible label name length");
    std::string name(len, '\0');
    if (len && !in.read(name.data(), len)) throw FormatError("model container is truncated");
    label_names.push_back(std::move(name));
  }
  return ClassifierModel{spec, EcocModel(CodeBook(std::move(codes)), std::move(W), lambda),
                         std::move(label_names), root_seed, config_hash};
}

void save_classifier(const std::string& path, const ClassifierModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_classifier(out, model);
  if (!out) throw Error("failed writing '" + path + "'");
}

ClassifierModel load_classifier(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  return read_classifier(in);
}

}  // namespace craftmaps
