#include "aircomp/types.hpp"

#include <algorithm>

namespace aircomp {

bool Schedule::contains(int k) const {
  return std::find(users.begin(), users.end(), k) != users.end();
}

std::vector<int> Schedule::sorted() const {
  std::vector<int> s = users;
  std::sort(s.begin(), s.end());
  return s;
}

void Schedule::validate(int k_total) const {
  for (int u : users) {
    if (u < 0 || u >= k_total) {
      throw ConfigError("schedule index " + std::to_string(u) +
                        " outside [0, " + std::to_string(k_total) + ")");
    }
  }
  std::vector<int> s = sorted();
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
    throw ConfigError("schedule contains duplicate user indices");
  }
}

bool same_user_set(const Schedule& a, const Schedule& b) {
  return a.sorted() == b.sorted();
}

}  // namespace aircomp
