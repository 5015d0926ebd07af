#include "lak/config.hpp"

namespace lak {

std::string StructureConfig::instance() const {
  switch (params.index()) {
    case 0: return "bkt";
    case 1: return "dashboard";
    case 2: return "predictive";
    case 3: return "canonical";
    default: return "naive:" + std::get<NaiveParams>(params).name;
  }
}

bool operator==(const CanonicalParams& a, const CanonicalParams& b) {
  if (!a.inner || !b.inner) return a.inner == b.inner;
  return *a.inner == *b.inner;
}

bool operator==(const StructureConfig& a, const StructureConfig& b) {
  return a.gap_policy == b.gap_policy && a.params == b.params;
}

}  // namespace lak
