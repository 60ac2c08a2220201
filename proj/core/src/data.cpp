#include "craftmaps/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "craftmaps/error.hpp"
#include "craftmaps/random.hpp"

namespace craftmaps {

void Dataset::validate() const {
  if (X.rows() < 1) throw InvalidArgument("dataset has no rows");
  if (y.size() != rows()) throw DimensionMismatch("dataset labels", rows(), y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || static_cast<std::size_t>(y[i]) >= num_classes)
      throw InvalidArgument("dataset label out of range at row " + std::to_string(i));
  }
  if (!X.allFinite()) throw InvalidArgument("dataset contains non-finite values");
}

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

class LabelMap {
 public:
  int operator()(std::string_view name) {
    auto [it, inserted] = ids_.try_emplace(std::string(name), static_cast<int>(names_.size()));
    if (inserted) names_.emplace_back(name);
    return it->second;
  }
  std::vector<std::string> take() { return std::move(names_); }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> names_;
};

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options, std::string_view source) {
  const std::string src(source);
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  std::size_t label_col = 0;
  std::vector<std::string> header;
  std::vector<double> values;
  std::vector<int> labels;
  LabelMap label_map;

  auto resolve_label_column = [&](std::size_t ncols) {
    long col = options.label_column < 0 ? static_cast<long>(ncols) + options.label_column
                                        : options.label_column;
    if (col < 0 || static_cast<std::size_t>(col) >= ncols)
      throw ParseError(src, line_no, "label column " + std::to_string(options.label_column) +
                                         " out of range for " + std::to_string(ncols) + " columns");
    if (ncols < 2) throw ParseError(src, line_no, "need at least one feature column and a label");
    label_col = static_cast<std::size_t>(col);
    columns = ncols;
  };

  bool header_pending = options.has_header;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, options.delimiter);
    if (header_pending) {
      resolve_label_column(fields.size());
      for (auto f : fields) header.emplace_back(f);
      header_pending = false;
      continue;
    }
    if (columns == 0) resolve_label_column(fields.size());
    if (fields.size() != columns)
      throw ParseError(src, line_no, "row " + std::to_string(row + 1) + " has " +
                                         std::to_string(fields.size()) + " columns, expected " +
                                         std::to_string(columns));
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == label_col) continue;
      double v;
      if (!parse_double(fields[c], v))
        throw ParseError(src, line_no, "row " + std::to_string(row + 1) + ": non-numeric feature '" +
                                           std::string(fields[c]) + "'");
      if (!std::isfinite(v))
        throw ParseError(src, line_no, "row " + std::to_string(row + 1) + ": non-finite feature '" +
                                           std::string(fields[c]) + "'");
      values.push_back(v);
    }
    labels.push_back(label_map(fields[label_col]));
    ++row;
  }
  if (row == 0) throw ParseError(src, 0, "no data rows");

  Dataset ds;
  const std::size_t d = columns - 1;
  ds.X = Eigen::Map<Matrix>(values.data(), row, d);
  ds.y = std::move(labels);
  ds.label_names = label_map.take();
  ds.num_classes = ds.label_names.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col) ds.feature_names.push_back(header[c]);
  }
  return ds;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  auto in = open_input(path);
  return parse_csv(in, options, path);
}

void write_csv(const Dataset& data, std::ostream& out, const CsvOptions& options) {
  const std::size_t d = data.dim();
  const long ncols = static_cast<long>(d) + 1;
  long label_col = options.label_column < 0 ? ncols + options.label_column : options.label_column;
  if (label_col < 0 || label_col >= ncols) throw InvalidArgument("write_csv: label column out of range");
  auto emit_row = [&](auto&& feature, auto&& label) {
    std::size_t f = 0;
    for (long c = 0; c < ncols; ++c) {
      if (c) out << options.delimiter;
      if (c == label_col) out << label();
      else out << feature(f++);
    }
    out << '\n';
  };
  if (options.has_header) {
    emit_row(
        [&](std::size_t f) {
          return f < data.feature_names.size() ? data.feature_names[f] : "f" + std::to_string(f);
        },
        [] { return std::string("label"); });
  }
  for (std::size_t i = 0; i < data.rows(); ++i) {
    emit_row([&](std::size_t f) { return format_double(data.X(i, f)); },
             [&] {
               int y = data.y[i];
               return static_cast<std::size_t>(y) < data.label_names.size() ? data.label_names[y]
                                                                            : std::to_string(y);
             });
  }
}

Dataset parse_libsvm(std::istream& in, std::string_view source) {
  const std::string src(source);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::vector<int> labels;
  LabelMap label_map;
  std::size_t max_index = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < view.size()) {
      auto start = view.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      auto end = view.find_first_of(" \t", start);
      tokens.push_back(view.substr(start, end == std::string_view::npos ? end : end - start));
      pos = end == std::string_view::npos ? view.size() : end;
    }

    std::vector<std::pair<std::size_t, double>> entries;
    std::map<std::size_t, bool> seen;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      auto tok = tokens[t];
      auto colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError(src, line_no, "malformed pair '" + std::string(tok) + "'");
      auto idx_str = tok.substr(0, colon);
      long long idx = 0;
      auto [ptr, ec] = std::from_chars(idx_str.data(), idx_str.data() + idx_str.size(), idx);
      if (ec != std::errc() || ptr != idx_str.data() + idx_str.size())
        throw ParseError(src, line_no, "malformed index in '" + std::string(tok) + "'");
      if (idx <= 0) throw ParseError(src, line_no, "index must be positive, got " + std::to_string(idx));
      double v;
      if (!parse_double(tok.substr(colon + 1), v))
        throw ParseError(src, line_no, "malformed value in '" + std::string(tok) + "'");
      if (!std::isfinite(v)) throw ParseError(src, line_no, "non-finite value in '" + std::string(tok) + "'");
      auto col = static_cast<std::size_t>(idx);
      if (seen.count(col)) throw ParseError(src, line_no, "duplicate index " + std::to_string(idx));
      seen[col] = true;
      max_index = std::max(max_index, col);
      entries.emplace_back(col - 1, v);
    }
    labels.push_back(label_map(tokens[0]));
    rows.push_back(std::move(entries));
  }
  if (rows.empty()) throw ParseError(src, 0, "no data rows");

  Dataset ds;
  ds.X = Matrix::Zero(rows.size(), std::max<std::size_t>(max_index, 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (auto [c, v] : rows[i]) ds.X(i, c) = v;
  }
  ds.y = std::move(labels);
  ds.label_names = label_map.take();
  ds.num_classes = ds.label_names.size();
  return ds;
}

Dataset load_libsvm(const std::string& path) {
  auto in = open_input(path);
  return parse_libsvm(in, path);
}

void write_libsvm(const Dataset& data, std::ostream& out) {
  for (std::size_t i = 0; i < data.rows(); ++i) {
    int y = data.y[i];
    out << (static_cast<std::size_t>(y) < data.label_names.size() ? data.label_names[y]
                                                                  : std::to_string(y));
    for (std::size_t c = 0; c < data.dim(); ++c) {
      if (data.X(i, c) != 0.0) out << ' ' << (c + 1) << ':' << format_double(data.X(i, c));
    }
    out << '\n';
  }
}

NormalizeResult unit_normalize(Dataset data) {
  NormalizeResult result;
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    double norm = data.X.row(i).norm();
    if (norm == 0.0) {
      ++result.zero_rows;
      continue;
    }
    data.X.row(i) /= norm;
  }
  result.data = std::move(data);
  return result;
}

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::kAnnuli: return "annuli";
    case SynthKind::kGaussianBlobs: return "gaussian-blobs";
    case SynthKind::kXorGrid: return "xor-grid";
  }
  return "?";
}

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "annuli") return SynthKind::kAnnuli;
  if (name == "gaussian-blobs" || name == "blobs") return SynthKind::kGaussianBlobs;
  if (name == "xor-grid" || name == "xor") return SynthKind::kXorGrid;
  throw InvalidArgument("unknown synthetic dataset kind '" + std::string(name) + "'");
}

Dataset synth(SynthKind kind, std::size_t n, std::size_t d, std::size_t k, double noise,
              std::uint64_t seed) {
  if (n == 0 || d == 0 || k == 0) throw InvalidArgument("synth: n, d and k must be positive");
  if (!std::isfinite(noise) || noise < 0.0) throw InvalidArgument("synth: noise must be >= 0");
  if ((kind == SynthKind::kAnnuli || kind == SynthKind::kXorGrid) && d < 2)
    throw InvalidArgument("synth: " + std::string(to_string(kind)) + " requires d >= 2");

  Dataset ds;
  ds.X = Matrix::Zero(n, d);
  ds.y.resize(n);
  ds.num_classes = k;
  for (std::size_t j = 0; j < k; ++j) ds.label_names.push_back(std::to_string(j));

  Rng rng(derive_seed(seed, "synth-points"));
  Matrix centroids;
  if (kind == SynthKind::kGaussianBlobs) {
    Rng crng(derive_seed(seed, "synth-centroids"));
    centroids.resize(k, d);
    for (Eigen::Index i = 0; i < centroids.size(); ++i) centroids.data()[i] = crng.normal();
  }
  const std::size_t cells = std::max<std::size_t>(2, k);
  auto cell_of = [&](double v) {
    auto c = static_cast<std::size_t>((v + 1.0) / 2.0 * static_cast<double>(cells));
    return std::min(c, cells - 1);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i % k;
    ds.y[i] = static_cast<int>(cls);
    auto row = ds.X.row(i);
    switch (kind) {
      case SynthKind::kAnnuli: {
        double angle = 2.0 * std::numbers::pi * rng.uniform01();
        double radius = static_cast<double>(cls + 1) / static_cast<double>(k) + noise * rng.normal();
        row(0) = radius * std::cos(angle);
        row(1) = radius * std::sin(angle);
        for (std::size_t c = 2; c < d; ++c) row(c) = noise * rng.normal();
        break;
      }
      case SynthKind::kGaussianBlobs: {
        for (std::size_t c = 0; c < d; ++c) {
          double jitter = noise > 0.0 ? noise * rng.normal() : 0.0;
          row(c) = centroids(cls, c) + jitter;
        }
        break;
      }
      case SynthKind::kXorGrid: {
        double a, b;
        do {
          a = 2.0 * rng.uniform01() - 1.0;
          b = 2.0 * rng.uniform01() - 1.0;
        } while ((cell_of(a) + cell_of(b)) % k != cls);
        row(0) = a + noise * rng.normal();
        row(1) = b + noise * rng.normal();
        for (std::size_t c = 2; c < d; ++c) row(c) = noise * rng.normal();
        break;
      }
    }
  }
  return ds;
}

std::vector<std::size_t> sample_rows(std::size_t total, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> rows;
  if (count >= total) {
    rows.resize(total);
    for (std::size_t i = 0; i < total; ++i) rows[i] = i;
    return rows;
  }
  Rng rng(derive_seed(seed, "sample-rows"));
  auto picked = sample_without_replacement(total, count, rng);
  rows.assign(picked.begin(), picked.end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.X.resize(rows.size(), data.X.cols());
  out.y.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= data.rows()) throw InvalidArgument("subset: row index out of range");
    out.X.row(i) = data.X.row(rows[i]);
    out.y[i] = data.y[rows[i]];
  }
  out.num_classes = data.num_classes;
  out.label_names = data.label_names;
  out.feature_names = data.feature_names;
  return out;
}

Matrix random_unit_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "unit-rows"));
  Matrix X(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (std::size_t c = 0; c < d; ++c) X(i, c) = rng.normal();
      norm = X.row(i).norm();
    } while (norm == 0.0);
    X.row(i) /= norm;
  }
  return X;
}

}  // namespace craftmaps
