#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "craftmaps/craftmap.hpp"
#include "craftmaps/learner.hpp"

namespace craftmaps {

// Versioned little-endian binary container. Feature maps are stored by their
// spec (seed, shapes, kernel, sampler, projector kind) and regenerated on load.
// The byte layout is documented in docs/FORMATS.md.

inline constexpr char kContainerMagic[8] = {'C', 'R', 'A', 'F', 'T', 'M', 'A', 'P'};
inline constexpr std::uint32_t kContainerVersion = 1;

enum class PayloadKind : std::uint32_t { kFeatureMap = 1, kClassifier = 2 };

struct ClassifierModel {
  FeatureMapSpec map;
  EcocModel ecoc;
  std::vector<std::string> label_names;
  std::uint64_t root_seed = 0;
  std::uint64_t config_hash = 0;
};

void write_feature_map(std::ostream& out, const FeatureMapSpec& spec);
FeatureMapSpec read_feature_map(std::istream& in);

void write_classifier(std::ostream& out, const ClassifierModel& model);
ClassifierModel read_classifier(std::istream& in);

void save_classifier(const std::string& path, const ClassifierModel& model);
ClassifierModel load_classifier(const std::string& path);

}  // namespace craftmaps
