#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "kum/core/canonical.hpp"
#include "kum/core/encode.hpp"
#include "kum/core/machine.hpp"
#include "kum/lang/parse.hpp"

namespace {

using namespace kum;

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(KUM_SAMPLES) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Ring with chords every third node, labels cycling over three letters.
StorageGraph ring(std::size_t n) {
  StorageGraph g("ring");
  const char* labels[] = {"A", "B", "C"};
  for (std::size_t i = 1; i <= n; ++i) g.add_node(NodeId{static_cast<std::uint32_t>(i)}, Label{labels[i % 3]});
  for (std::size_t i = 1; i <= n; ++i)
    g.add_edge(NodeId{static_cast<std::uint32_t>(i)}, NodeId{static_cast<std::uint32_t>(i % n + 1)});
  for (std::size_t i = 1; i + n / 2 <= n; i += 3)
    g.add_edge(NodeId{static_cast<std::uint32_t>(i)}, NodeId{static_cast<std::uint32_t>(i + n / 2)});
  g.set_active(NodeId{1});
  return g;
}

void BM_CanonicalHash(benchmark::State& state) {
  const auto g = ring(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(canonical_hash(g));
}
BENCHMARK(BM_CanonicalHash)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

// Fully symmetric: every node has the same label.
void BM_CanonicalHashUniformCycle(benchmark::State& state) {
  StorageGraph g("cycle");
  const auto n = static_cast<std::uint32_t>(state.range(0));
  for (std::uint32_t i = 1; i <= n; ++i) g.add_node(NodeId{i}, Label{"A"});
  for (std::uint32_t i = 1; i <= n; ++i) g.add_edge(NodeId{i}, NodeId{i % n + 1});
  g.set_active(NodeId{1});
  for (auto _ : state) benchmark::DoNotOptimize(canonical_hash(g));
}
BENCHMARK(BM_CanonicalHashUniformCycle)->Arg(16)->Arg(64);

void BM_ParseProgram(benchmark::State& state) {
  const auto text = slurp("append.kum");
  for (auto _ : state) benchmark::DoNotOptimize(lang::parse_program(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseProgram);

void BM_RunAppend(benchmark::State& state) {
  const auto program = *lang::parse_program(slurp("append.kum")).value;
  std::vector<std::string> word(static_cast<std::size_t>(state.range(0)), "a");
  word.insert(word.begin() + static_cast<std::ptrdiff_t>(word.size() / 2), "sep");
  const auto input = initial_state(encode_input(word, {"a", "b", "sep"}));
  for (auto _ : state) benchmark::DoNotOptimize(run(input, program, 10000));
}
BENCHMARK(BM_RunAppend)->Arg(8)->Arg(32);

void BM_RunAppendUnhashed(benchmark::State& state) {
  const auto program = *lang::parse_program(slurp("append.kum")).value;
  std::vector<std::string> word(32, "b");
  word.insert(word.begin() + 16, "sep");
  const auto input = initial_state(encode_input(word, {"a", "b", "sep"}));
  RunOptions o;
  o.hash_ops = false;
  for (auto _ : state) benchmark::DoNotOptimize(run(input, program, 10000, o));
}
BENCHMARK(BM_RunAppendUnhashed);

}  // namespace
