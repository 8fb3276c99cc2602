#include "flop/multiseries.hpp"

namespace flop {

int VarSpec::logy_index(const std::string& name) const {
  for (int i = 0; i < nl(); ++i)
    if (logy[i] == name) return i;
  throw SpecError("unknown logy variable: " + name);
}

}  // namespace flop
