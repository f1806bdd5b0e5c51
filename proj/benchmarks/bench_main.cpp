#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "loom/engine.hpp"
#include "loom/knowledge.hpp"
#include "loom/parser.hpp"
#include "loom/snapshot.hpp"

namespace {

const std::filesystem::path kRoot(LOOM_SOURCE_DIR);

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lrrh_text() {
  std::string all;
  for (const char* f : {"01_narrative_voice.xapi", "02_orders.xapi", "03_telling.xapi",
                        "04_swallowing.xapi", "05_impersonating.xapi", "06_emerging.xapi"}) {
    all += slurp(kRoot / "corpus/lrrh" / f);
  }
  return all;
}

loom::Agent lrrh_agent() {
  loom::KnowledgeBase kb;
  loom::load_knowledge_file(kb, kRoot / "knowledge/lrrh.kb");
  return loom::Agent(std::move(kb));
}

void BM_ParseCorpus(benchmark::State& state) {
  const std::string text = lrrh_text();
  for (auto _ : state) {
    auto story = loom::parse_story(text);
    benchmark::DoNotOptimize(story.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseCorpus);

/// One second of shadow diffusion with the prior telling in memory and the swallowing scene in focus.
void BM_ShadowTick(benchmark::State& state) {
  loom::Agent teller = lrrh_agent();
  teller.run_story(loom::parse_story(slurp(kRoot / "corpus/lrrh/prior_telling.xapi")), 1.0);
  teller.rest();
  loom::Agent base = lrrh_agent();
  loom::restore_memory_json(base, loom::memory_snapshot_json(teller));
  base.run_story(loom::parse_story(slurp(kRoot / "corpus/lrrh/04_swallowing.xapi")), 0.0);
  for (auto _ : state) {
    state.PauseTiming();
    loom::Agent a = base;
    state.ResumeTiming();
    a.diffuse(1.0);
    benchmark::DoNotOptimize(a.shadows());
  }
}
BENCHMARK(BM_ShadowTick)->Unit(benchmark::kMicrosecond);

void BM_RunCorpus(benchmark::State& state) {
  const auto story = loom::parse_story(lrrh_text());
  const loom::Agent base = lrrh_agent();
  for (auto _ : state) {
    loom::Agent a = base;
    a.run_story(story, static_cast<double>(state.range(0)) / 10.0);
    benchmark::DoNotOptimize(a.world().clock);
  }
}
BENCHMARK(BM_RunCorpus)->Arg(0)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
