#pragma once

#include <random>
#include <string>

#include "kum/core/program.hpp"

namespace kum::testing {

// Random program that is well-scoped and parses without errors. Patterns and
// actions are not checked for runtime sanity; only the surface is exercised.
Program random_program(std::mt19937_64& rng);

// Mutates a byte string: flips, inserts, deletes, duplicates ranges and
// splices in tokens of the language.
std::string mutate(std::string text, std::mt19937_64& rng);

}  // namespace kum::testing
