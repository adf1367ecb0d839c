#include "csx/syntax.hpp"

namespace csx {

Spec desugar(Spec spec) {
  for (auto& s : spec.scenarios) {
    s.tests.clear();
    s.tests.reserve(s.expectations.size());
    for (const auto& e : s.expectations)
      s.tests.push_back(TestCase{e, s.bindings, s.constraints, s.objective});
  }
  return spec;
}

} // namespace csx
