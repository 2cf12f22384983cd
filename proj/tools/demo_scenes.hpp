#pragma once

#include <string>
#include <vector>

#include "squidget/persistence.hpp"

namespace squidget::demos {

struct Demo {
  std::string name;
  Document initial;
  EventLog log;
};

/// arrange-shapes, light-switch, move-rotate-path, boat-moon-nested.
std::vector<Demo> build_all();

}  // namespace squidget::demos
