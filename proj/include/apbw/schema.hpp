#ifndef APBW_SCHEMA_HPP
#define APBW_SCHEMA_HPP

#include "apbw/algebroid.hpp"
#include "apbw/modcat.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace apbw {

struct ProblemOptions {
  int truncation = 3;
  std::optional<int> degree_bound;
  int budget = 10000;
};

// A parsed problem document.  Owns the ring and algebroid so that elements
// holding raw pointers stay valid for the document's lifetime.
struct ProblemDocument {
  std::shared_ptr<CoefficientRing> ring;
  std::shared_ptr<Algebroid> algebroid;
  AdaptedPair pair;
  std::map<std::string, FlatModule> modules;
  ProblemOptions options;

  FlatModule unit() const;                    // 1_A
  FlatModule quotient() const;                // L/A
  // named module, or the two built-in names "1" and "L/A"
  FlatModule named_module(const std::string& name) const;
  std::vector<std::string> module_names() const;
};

// Parses the JSON problem document; throws Error(Structural) with position
// information on malformed input.
ProblemDocument parse_problem(const std::string& json_text);

// Canonical serialization: sorted keys, canonicalized coefficient strings.
// parse(serialize(doc)) == serialize-identical (round-trip invariant).
std::string serialize_problem(const ProblemDocument& doc);

} // namespace apbw

#endif
