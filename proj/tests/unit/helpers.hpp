#pragma once

#include <filesystem>
#include <string>

#include "loom/engine.hpp"
#include "loom/knowledge.hpp"
#include "loom/parser.hpp"

inline loom::Agent agent_with(const std::string& kb_name, loom::Params params = {}) {
  loom::KnowledgeBase kb;
  loom::load_knowledge_file(kb, std::filesystem::path(LOOM_SOURCE_DIR) / "knowledge" / kb_name);
  return loom::Agent(std::move(kb), params);
}

inline loom::EffectReport say(loom::Agent& a, const std::string& text) {
  return a.execute(loom::parse_story(text).at(0));
}

inline loom::EffectReport tell(loom::Agent& a, const std::string& text, double pacing) {
  return a.step(loom::parse_story(text).at(0), pacing);
}
