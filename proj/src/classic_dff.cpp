#include "ddff/classic_dff.hpp"

namespace ddff {

FocusMeasure parse_focus_measure(const std::string& name) {
  if (name == "modified-laplacian") return FocusMeasure::ModifiedLaplacian;
  if (name == "laplacian-variance") return FocusMeasure::LaplacianVariance;
  if (name == "tenengrad") return FocusMeasure::Tenengrad;
  throw ParameterError("unknown focus measure '" + name + "'");
}

std::string to_string(FocusMeasure m) {
  switch (m) {
    case FocusMeasure::ModifiedLaplacian: return "modified-laplacian";
    case FocusMeasure::LaplacianVariance: return "laplacian-variance";
    case FocusMeasure::Tenengrad: return "tenengrad";
  }
  return "unknown";
}

}  // namespace ddff
