#include "proxsplit/trace.hpp"

namespace proxsplit {

std::vector<double> RunTrace::normalized_objective() const {
  if (rows.empty()) return {};
  return normalized_objective(rows.back().objective);
}

std::vector<double> RunTrace::normalized_objective(double reference) const {
  std::vector<double> out;
  out.reserve(rows.size());
  if (rows.empty()) return out;
  const double span = rows.front().objective - reference;
  for (const auto& r : rows) out.push_back(span != 0.0 ? (r.objective - reference) / span : 0.0);
  return out;
}

}  // namespace proxsplit
