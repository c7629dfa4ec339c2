#pragma once

// Reader for transposed ranking tables: row p holds every agent's p-th
// object as 1-based indices; '#' starts a comment line.

#include "necmatch/core.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace necmatch::testing {

inline FullProfile load_ranking_table(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<ObjectId>> rankings(n);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t o = 0;
      if (!(row >> o) || o == 0 || o > n) throw std::runtime_error(path + ": bad entry");
      rankings[i].push_back(object(o - 1));
    }
  }
  return FullProfile(n, std::move(rankings));
}

} // namespace necmatch::testing
