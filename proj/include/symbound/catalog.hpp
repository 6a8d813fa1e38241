#pragma once

// Reference systems used by the property suites, the acceptance checks and
// the CLI `--system` shortcuts.

#include <string>
#include <vector>

#include "symbound/systems.hpp"

namespace symbound {

struct CatalogEntry {
  std::string name;
  HamiltonianSystem system;
};

inline std::vector<CatalogEntry> catalog() {
  return {
      {"harmonic", HamiltonianSystem::newtonian("-q")},
      {"harmonic-separable", HamiltonianSystem::separable("p^2/2", "q^2/2")},
      {"harmonic-general", HamiltonianSystem::general("p^2/2 + q^2/2")},
      {"pendulum", HamiltonianSystem::newtonian("-sin(q)")},
      {"pendulum-separable", HamiltonianSystem::separable("p^2/2", "-cos(q)")},
      {"saddle", HamiltonianSystem::newtonian("q")},
      {"free-particle", HamiltonianSystem::newtonian("0")},
      {"double-well", HamiltonianSystem::separable("p^2/2", "q^4/4 - q^2/2")},
      {"relativistic", HamiltonianSystem::separable("sqrt(1 + p^2)", "2*q^2")},
      {"hyperbolic", HamiltonianSystem::general("p*q")},
      {"coupled", HamiltonianSystem::general("(p^2 + q^2)/2 + 0.3*p*q")},
  };
}

inline const HamiltonianSystem* find_catalog_system(const std::vector<CatalogEntry>& entries, const std::string& name) {
  for (const auto& e : entries) {
    if (e.name == name) return &e.system;
  }
  return nullptr;
}

}  // namespace symbound
