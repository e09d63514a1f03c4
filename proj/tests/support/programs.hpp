#pragma once

#include <functional>
#include <string>
#include <vector>

namespace kum::testing {

using Word = std::vector<std::string>;

// Calls `visit` for every word over `symbols` of length ≤ max_len.
inline void for_each_word(const std::vector<std::string>& symbols, std::size_t max_len,
                          const std::function<void(const Word&)>& visit) {
  Word w;
  std::function<void()> walk = [&] {
    visit(w);
    if (w.size() == max_len) return;
    for (const auto& s : symbols) {
      w.push_back(s);
      walk();
      w.pop_back();
    }
  };
  walk();
}

}  // namespace kum::testing
