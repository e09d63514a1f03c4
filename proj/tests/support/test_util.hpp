#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "kum/lang/parse.hpp"
#include "kum/lang/print.hpp"

namespace kum {

// gtest printer: readable graphs in failure messages.
inline void PrintTo(const StorageGraph& g, std::ostream* os) { *os << "\n" << lang::print_graph(g); }

}  // namespace kum

namespace kum::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string sample(const std::string& name) { return std::string(KUM_SAMPLES) + "/" + name; }

inline Program program_or_throw(const std::string& text) {
  auto r = lang::parse_program(text);
  if (!r.ok()) {
    std::string msg;
    for (const auto& d : r.diagnostics) msg += lang::format(d) + "\n";
    throw std::runtime_error(msg);
  }
  return *r.value;
}

inline StorageGraph graph_or_throw(const std::string& text) {
  auto r = lang::parse_graph(text);
  if (!r.ok()) {
    std::string msg;
    for (const auto& d : r.diagnostics) msg += lang::format(d) + "\n";
    throw std::runtime_error(msg);
  }
  return *r.value;
}

}  // namespace kum::testing
