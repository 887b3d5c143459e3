#include "smle/types.hpp"

#include <algorithm>

namespace smle {

Family family_from_string(const std::string& s) {
  if (s == "gaussian") return Family::gaussian;
  if (s == "binomial") return Family::binomial;
  if (s == "poisson") return Family::poisson;
  throw ValidationError("unknown family: '" + s + "'");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::binomial: return "binomial";
    case Family::poisson: return "poisson";
  }
  return "?";
}

IndexSet CoefVector::support() const {
  IndexSet s;
  for (int j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) s.push_back(j + 1);
  }
  return s;
}

bool contains_all(const IndexSet& superset, const IndexSet& subset) {
  return std::includes(superset.begin(), superset.end(), subset.begin(),
                       subset.end());
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

int symmetric_difference_size(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return static_cast<int>(out.size());
}

}  // namespace smle
