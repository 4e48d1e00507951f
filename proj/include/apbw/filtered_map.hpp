#ifndef APBW_FILTERED_MAP_HPP
#define APBW_FILTERED_MAP_HPP

#include "apbw/modcat.hpp"

#include <string>
#include <vector>

namespace apbw {

// A filtered A-linear map between free R-modules with degree-labelled bases,
// together with the four verdicts the PBW theorems assert.  The verdict
// booleans are reproducible from the stored matrix and the module data.
struct FilteredMapReport {
  std::string name;
  int truncation = 0;
  std::vector<std::string> domain_labels, codomain_labels;
  std::vector<int> domain_degrees, codomain_degrees;
  RMat matrix; // codomain x domain

  bool a_linear = false;
  bool filtered = false;
  bool bijective_per_degree = false;
  bool gr_canonical = false;
  bool all_ok() const { return a_linear && filtered && bijective_per_degree && gr_canonical; }
};

} // namespace apbw

#endif
