#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "loom/engine.hpp"
#include "loom/errors.hpp"
#include "loom/knowledge.hpp"
#include "loom/params.hpp"
#include "loom/parser.hpp"
#include "loom/snapshot.hpp"

namespace {

using nlohmann::ordered_json;

enum Exit { ok = 0, parse_failure = 1, semantic_failure = 2, io_failure = 3 };

struct RunConfig {
  std::string knowledge;
  std::vector<std::string> stories;
  double pacing = 1.0;
  bool strict = false;
  bool lenient_nouns = false;
  std::vector<std::string> params;
  std::string config;
  std::string snapshot_in;
  std::string snapshot_out;
  std::string trace;
  bool dump_shadows = false;
  bool dump_hs = false;
  bool dump_identity = false;
  std::size_t top = 5;
};

/// An error with the story location that caused it.
struct Located {
  std::string where;
  int code;
  std::string message;
};

void emit(const ordered_json& j) { std::cout << j.dump() << '\n'; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw loom::IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int code_of(const loom::Error& e) {
  if (dynamic_cast<const loom::IoError*>(&e)) return io_failure;
  if (dynamic_cast<const loom::ParseError*>(&e)) return parse_failure;
  return semantic_failure;
}

loom::Params make_params(const RunConfig& cfg) {
  loom::Params p;
  if (!cfg.config.empty()) loom::load_params_file(p, cfg.config);
  for (const auto& kv : cfg.params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw loom::Error("--param expects key=value, got '" + kv + "'");
    p.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (cfg.strict) p.strict = true;
  if (cfg.lenient_nouns) p.strict_nouns = false;
  return p;
}

loom::Agent make_agent(const RunConfig& cfg) {
  for (const auto& path : cfg.stories) {
    if (!std::filesystem::is_regular_file(path)) throw loom::IoError("no such story '" + path + "'");
  }
  if (cfg.pacing < 0) throw loom::Error("pacing must be >= 0");
  loom::Params params = make_params(cfg);
  loom::KnowledgeBase kb;
  if (!cfg.knowledge.empty()) {
    if (!std::filesystem::is_regular_file(cfg.knowledge)) {
      throw loom::IoError("no such knowledge file '" + cfg.knowledge + "'");
    }
    loom::load_knowledge_file(kb, cfg.knowledge);
  }
  loom::Agent agent(std::move(kb), params);
  if (!cfg.snapshot_in.empty()) loom::load_memory_snapshot(agent, cfg.snapshot_in);
  return agent;
}

std::string opt_label(const loom::Agent& agent, const std::optional<loom::Id>& id) {
  return id ? agent.label(*id) : std::string();
}

ordered_json hs_record(const loom::Agent& agent, const loom::HeadlessShadow& hs, std::size_t rank) {
  ordered_json j;
  j["record"] = "headless";
  j["rank"] = rank;
  j["support"] = hs.support;
  j["kind"] = std::string(loom::to_string(hs.kind));
  j["verb"] = agent.knowledge().dominant_name(hs.verb);
  j["subject"] = opt_label(agent, hs.subject);
  j["object"] = hs.object_attributes ? agent.knowledge().describe(*hs.object_attributes)
                                     : opt_label(agent, hs.object);
  j["scene"] = agent.scene_name(hs.scene);
  j["representative"] = agent.label(hs.representative);
  j["members"] = hs.body.size();
  return j;
}

void dump_hs(const loom::Agent& agent, std::size_t limit) {
  auto clusters = agent.headless_shadows();
  for (std::size_t i = 0; i < clusters.size() && i < limit; ++i) emit(hs_record(agent, clusters[i], i + 1));
}

void dump_shadows(const loom::Agent& agent) {
  for (const auto& [focus, body] : agent.shadows().bodies()) {
    for (const auto& [member, weight] : body) {
      emit({{"record", "shadow"},
            {"focusComponent", agent.label(focus)},
            {"member", agent.label(member)},
            {"weight", weight}});
    }
  }
}

void dump_focus(const loom::Agent& agent) {
  for (const auto& [id, entry] : agent.world().focus) {
    emit({{"record", "focus"}, {"component", agent.label(id)}, {"weight", entry.weight}});
  }
}

void dump_identity(const loom::Agent& agent) {
  for (const auto& l : agent.identity().links()) {
    emit({{"record", "identity"},
          {"kind", std::string(loom::to_string(l.kind))},
          {"a", agent.label(l.a)},
          {"b", agent.label(l.b)},
          {"provenance", std::string(loom::to_string(l.origin))}});
  }
}

void final_report(const loom::Agent& agent) {
  const loom::World& w = agent.world();
  std::size_t inferred = 0;
  for (const auto& [id, v] : w.vis) inferred += v.inferred ? 1 : 0;
  std::map<std::string, std::size_t> by_origin;
  for (const auto& l : agent.identity().links()) {
    if (l.kind == loom::IdentityKind::somatic) ++by_origin[std::string(loom::to_string(l.origin))];
  }
  ordered_json summary = {{"record", "summary"},
                          {"instances", w.instances.size()},
                          {"vis", w.vis.size()},
                          {"inferred_vis", inferred},
                          {"scenes", w.scenes.size()},
                          {"in_focus", w.focus.size()},
                          {"in_memory", w.memory.size()},
                          {"identity_links", agent.identity().links().size()},
                          {"somatic_links", by_origin},
                          {"clock", w.clock}};
  emit(summary);
  for (const auto& [id, s] : w.scenes) {
    emit({{"record", "scene"},
          {"id", id.value},
          {"name", s.name},
          {"members", s.members.size()},
          {"archived", s.archived},
          {"current", w.current_scene == id}});
  }
  for (const auto& [name, overlay] : agent.knowledge().lexicon().proper_nouns) {
    auto closure = agent.proper_noun_closure(name);
    if (closure.empty()) continue;
    ordered_json members = ordered_json::array();
    for (auto id : closure) members.push_back(agent.label(id));
    emit({{"record", "identity_closure"},
          {"proper_noun", name},
          {"size", closure.size()},
          {"members", members}});
  }
}

/// Runs every story file in order. Errors carry file and line.
std::optional<Located> run_stories(loom::Agent& agent, const RunConfig& cfg) {
  for (const auto& path : cfg.stories) {
    std::vector<loom::SentenceAst> story;
    try {
      story = loom::parse_story(read_file(path));
    } catch (const loom::Error& e) {
      return Located{path, code_of(e), e.what()};
    }
    for (const auto& s : story) {
      try {
        agent.step(s, cfg.pacing);
      } catch (const loom::Error& e) {
        return Located{path + ":" + std::to_string(s.line), code_of(e), e.what()};
      }
    }
  }
  return std::nullopt;
}

int report_error(const Located& e) {
  std::cerr << "loom: " << e.where << ": " << e.message << '\n';
  return e.code;
}

int report_error(const loom::Error& e) {
  std::cerr << "loom: " << e.what() << '\n';
  return code_of(e);
}

std::unique_ptr<std::ofstream> open_trace(loom::Agent& agent, const std::string& path) {
  if (path.empty()) return nullptr;
  auto out = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*out) throw loom::IoError("cannot write trace '" + path + "'");
  std::ofstream* raw = out.get();
  agent.set_trace_sink([raw](const loom::TraceRecord& r) { *raw << loom::to_json_line(r) << '\n'; });
  return out;
}

int cmd_parse(const std::vector<std::string>& files) {
  for (const auto& path : files) {
    try {
      for (const auto& s : loom::parse_story(read_file(path))) {
        emit({{"record", "sentence"},
              {"file", path},
              {"line", s.line},
              {"depth", s.depth()},
              {"xapi", loom::to_xapi(s)}});
      }
    } catch (const loom::Error& e) {
      return report_error(Located{path, code_of(e), e.what()});
    }
  }
  return ok;
}

int cmd_run(const RunConfig& cfg, bool predict) {
  try {
    loom::Agent agent = make_agent(cfg);
    auto trace = open_trace(agent, cfg.trace);
    if (auto err = run_stories(agent, cfg)) return report_error(*err);
    if (predict) {
      dump_hs(agent, cfg.top);
    } else {
      final_report(agent);
      if (cfg.dump_identity) dump_identity(agent);
      if (cfg.dump_hs) dump_hs(agent, static_cast<std::size_t>(-1));
    }
    if (cfg.dump_shadows) dump_shadows(agent);
    if (!cfg.snapshot_out.empty()) {
      agent.rest();
      loom::save_memory_snapshot(agent, cfg.snapshot_out);
    }
    if (trace && !*trace) throw loom::IoError("failed writing trace '" + cfg.trace + "'");
  } catch (const loom::Error& e) {
    return report_error(e);
  }
  return ok;
}

int cmd_repl(const RunConfig& cfg) {
  std::optional<loom::Agent> agent;
  std::unique_ptr<std::ofstream> trace;
  try {
    agent.emplace(make_agent(cfg));
    trace = open_trace(*agent, cfg.trace);
    if (auto err = run_stories(*agent, cfg)) return report_error(*err);
  } catch (const loom::Error& e) {
    return report_error(e);
  }
  std::string pending;
  std::string line;
  auto prompt = [&] { std::cerr << (pending.empty() ? "loom> " : "  ... ") << std::flush; };
  prompt();
  while (std::getline(std::cin, line)) {
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (pending.empty() && !trimmed.empty() && trimmed.front() == ':') {
      std::istringstream words(trimmed);
      std::string cmd, arg;
      words >> cmd >> arg;
      if (cmd == ":quit" || cmd == ":q") break;
      if (cmd == ":shadows") {
        dump_shadows(*agent);
      } else if (cmd == ":hs") {
        dump_hs(*agent, static_cast<std::size_t>(-1));
      } else if (cmd == ":focus") {
        dump_focus(*agent);
      } else if (cmd == ":identity") {
        dump_identity(*agent);
      } else if (cmd == ":save") {
        try {
          if (arg.empty()) throw loom::IoError(":save needs a file name");
          loom::Agent copy = *agent;
          copy.set_trace_sink({});
          copy.rest();
          loom::save_memory_snapshot(copy, arg);
        } catch (const loom::Error& e) {
          report_error(e);
        }
      } else {
        std::cerr << "loom: unknown command " << cmd << '\n';
      }
      prompt();
      continue;
    }
    pending += line;
    pending += '\n';
    auto end = pending.find_last_not_of(" \t\r\n");
    bool complete = end != std::string::npos && (pending[end] == '.' || pending[end] == '?');
    if (end == std::string::npos) pending.clear();
    if (complete) {
      try {
        for (const auto& s : loom::parse_story(pending)) {
          auto report = agent->step(s, cfg.pacing);
          emit({{"record", "executed"},
                {"xapi", loom::to_xapi(s)},
                {"vis", report.vis.size()},
                {"created", report.created.size()}});
        }
      } catch (const loom::Error& e) {
        report_error(e);
      }
      pending.clear();
    }
    prompt();
  }
  return ok;
}

void add_run_options(CLI::App* app, RunConfig& cfg) {
  app->add_option("stories", cfg.stories, "Xapi story files, executed in order");
  app->add_option("--knowledge,-k", cfg.knowledge, "Knowledge base file");
  app->add_option("--pacing,-p", cfg.pacing, "Seconds of diffusion after each sentence");
  app->add_flag("--strict", cfg.strict, "Resolution ties and somatic branching are errors");
  app->add_flag("--lenient-nouns", cfg.lenient_nouns, "Unknown nouns become fresh concepts");
  app->add_option("--param", cfg.params, "Parameter override key=value")->take_all();
  app->add_option("--config", cfg.config, "Parameter file with key = value lines");
  app->add_option("--snapshot-in", cfg.snapshot_in, "Load a memory snapshot before the stories");
  app->add_option("--snapshot-out", cfg.snapshot_out, "Save the memory after the stories");
  app->add_option("--trace", cfg.trace, "Write the JSON-lines trace to this file");
  app->add_flag("--dump-shadows", cfg.dump_shadows, "Print shadow bodies at the end");
  app->add_flag("--dump-hs", cfg.dump_hs, "Print headless shadow clusters at the end");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Story understanding agent for Xapi pidgin narratives"};
  app.require_subcommand(1);

  std::vector<std::string> parse_files;
  auto* parse = app.add_subcommand("parse", "Parse stories and print one record per sentence");
  parse->add_option("stories", parse_files)->required();

  RunConfig run_cfg;
  auto* run = app.add_subcommand("run", "Execute stories and print the final report");
  add_run_options(run, run_cfg);
  run->add_flag("--dump-identity", run_cfg.dump_identity, "Print every identity link");

  RunConfig predict_cfg;
  auto* predict = app.add_subcommand("predict", "Execute stories and list the top predictions");
  add_run_options(predict, predict_cfg);
  predict->add_option("--top", predict_cfg.top, "Number of predictions to list");

  RunConfig repl_cfg;
  auto* repl = app.add_subcommand("repl", "Interactive session; stories are read first");
  add_run_options(repl, repl_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : io_failure;
  }

  if (*parse) return cmd_parse(parse_files);
  if (*run) return cmd_run(run_cfg, false);
  if (*predict) return cmd_run(predict_cfg, true);
  return cmd_repl(repl_cfg);
}
