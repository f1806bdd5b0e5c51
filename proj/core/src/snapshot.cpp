#include "loom/snapshot.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "loom/errors.hpp"

namespace loom {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json overlay_to_json(const KnowledgeBase& kb, const ConceptOverlay& overlay) {
  json out = json::object();
  for (const auto& [c, e] : overlay.energies()) out[kb.concept_at(c).name] = e;
  return out;
}

ConceptOverlay overlay_from_json(KnowledgeBase& kb, const json& j, ConceptKind kind) {
  ConceptOverlay out(kind);
  for (const auto& [name, energy] : j.items()) {
    if (kind == ConceptKind::attribute && !name.empty() && name.front() == '"') {
      out.merge(kb.intern_proper_noun(name.substr(1)));
      continue;
    }
    out.activate(kb.ensure_concept(name, kind).id, energy.get<double>());
  }
  return out;
}

json ids_to_json(const std::vector<Id>& ids, const std::set<Id>& keep) {
  json out = json::array();
  for (Id id : ids) {
    if (keep.contains(id)) out.push_back(id.value);
  }
  return out;
}

json optional_id(const std::optional<Id>& id, const std::set<Id>& keep) {
  if (id && keep.contains(*id)) return id->value;
  return nullptr;
}

VerbKind verb_kind_from_string(const std::string& s) {
  for (auto k : {VerbKind::action, VerbKind::attribute_set, VerbKind::relation_set,
                 VerbKind::quote, VerbKind::question}) {
    if (to_string(k) == s) return k;
  }
  throw Error("snapshot: unknown verb kind '" + s + "'");
}

}  // namespace

std::string memory_snapshot_json(const Agent& agent) {
  const World& world = agent.world();
  const KnowledgeBase& kb = agent.knowledge();

  std::set<Id> kept;
  std::set<Id> scenes;
  for (const auto& [id, salience] : world.memory.entries()) {
    if (world.in_focus(id)) continue;
    if (world.is_instance(id) || world.is_vi(id)) kept.insert(id);
  }
  for (Id id : kept) {
    if (auto it = world.instances.find(id); it != world.instances.end()) {
      scenes.insert(it->second.scenes.begin(), it->second.scenes.end());
    } else {
      scenes.insert(world.vis.at(id).scene);
    }
  }
  std::set<Id> referable = kept;
  referable.insert(scenes.begin(), scenes.end());
  for (const auto& [id, scene] : world.scenes) {
    for (Id m : scene.ever_members) {
      if (kept.contains(m)) {
        scenes.insert(id);
        referable.insert(id);
      }
    }
  }

  json doc;
  doc["format"] = kFormatVersion;
  doc["next_id"] = world.next_id;

  json js = json::array();
  for (Id sid : scenes) {
    const Scene& s = world.scenes.at(sid);
    json members = json::array();
    for (Id m : s.ever_members) {
      if (kept.contains(m)) members.push_back(m.value);
    }
    js.push_back({{"id", sid.value}, {"name", s.name}, {"members", members}});
  }
  doc["scenes"] = js;

  json ji = json::array();
  json jv = json::array();
  for (Id id : kept) {
    double salience = world.memory.salience(id);
    if (auto it = world.instances.find(id); it != world.instances.end()) {
      const Instance& inst = it->second;
      json scenes_of = json::array();
      for (Id s : inst.scenes) scenes_of.push_back(s.value);
      ji.push_back({{"id", id.value},
                    {"attributes", overlay_to_json(kb, inst.attributes)},
                    {"scenes", scenes_of},
                    {"created", inst.created},
                    {"participation", inst.participation},
                    {"salience", salience}});
      continue;
    }
    const VerbInstance& v = world.vis.at(id);
    json j = {{"id", id.value},
              {"verb", overlay_to_json(kb, v.verb)},
              {"kind", std::string(to_string(v.kind))},
              {"subject", optional_id(v.subject, referable)},
              {"object", optional_id(v.object, referable)},
              {"quoted", optional_id(v.quoted, kept)},
              {"inquit", optional_id(v.inquit, kept)},
              {"scene", v.scene.value},
              {"successors", ids_to_json(v.successors, kept)},
              {"predecessors", ids_to_json(v.predecessors, kept)},
              {"followers", ids_to_json(v.followers, kept)},
              {"anchor", optional_id(v.anchor, kept)},
              {"result", optional_id(v.result, kept)},
              {"inferred", v.inferred},
              {"authoritative", v.authoritative},
              {"created", v.created},
              {"participation", v.participation},
              {"surprise", v.surprise},
              {"salience", salience}};
    if (v.object_attributes) j["object_attributes"] = overlay_to_json(kb, *v.object_attributes);
    jv.push_back(std::move(j));
  }
  doc["instances"] = ji;
  doc["vis"] = jv;

  json jr = json::array();
  for (const auto& r : world.relations) {
    if (kept.contains(r.from) && kept.contains(r.to)) {
      jr.push_back({{"name", r.name}, {"from", r.from.value}, {"to", r.to.value}});
    }
  }
  doc["relations"] = jr;

  json jl = json::array();
  for (const auto& l : agent.identity().links()) {
    if (kept.contains(l.a) && kept.contains(l.b)) {
      jl.push_back({{"kind", std::string(to_string(l.kind))},
                    {"a", l.a.value},
                    {"b", l.b.value},
                    {"created", l.created},
                    {"origin", std::string(to_string(l.origin))}});
    }
  }
  doc["identity"] = jl;
  return doc.dump(1);
}

void restore_memory_json(Agent& agent, std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("snapshot is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<int>() != kFormatVersion) throw Error("unsupported snapshot format");
    World& world = agent.mutable_world();
    KnowledgeBase& kb = agent.knowledge();
    const std::uint32_t base = world.next_id - 1;
    auto id_of = [&](const json& j) { return Id(base + j.get<std::uint32_t>()); };
    auto opt_id = [&](const json& j, const char* key) -> std::optional<Id> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return id_of(j.at(key));
    };
    auto id_list = [&](const json& j) {
      std::vector<Id> out;
      for (const auto& x : j) out.push_back(id_of(x));
      return out;
    };

    for (const auto& s : doc.at("scenes")) {
      Scene scene;
      scene.id = id_of(s.at("id"));
      scene.name = s.at("name").get<std::string>();
      scene.archived = true;
      for (const auto& m : s.at("members")) scene.ever_members.insert(id_of(m));
      world.scenes.emplace(scene.id, std::move(scene));
    }
    for (const auto& j : doc.at("instances")) {
      Instance inst;
      inst.id = id_of(j.at("id"));
      inst.attributes = overlay_from_json(kb, j.at("attributes"), ConceptKind::attribute);
      for (const auto& s : j.at("scenes")) inst.scenes.insert(id_of(s));
      inst.created = j.at("created").get<double>();
      inst.participation = j.at("participation").get<int>();
      world.memory.restore(inst.id, j.at("salience").get<double>());
      world.demoted.insert(inst.id);
      world.instances.emplace(inst.id, std::move(inst));
    }
    for (const auto& j : doc.at("vis")) {
      VerbInstance v;
      v.id = id_of(j.at("id"));
      v.verb = overlay_from_json(kb, j.at("verb"), ConceptKind::verb);
      v.kind = verb_kind_from_string(j.at("kind").get<std::string>());
      v.subject = opt_id(j, "subject");
      v.object = opt_id(j, "object");
      if (j.contains("object_attributes")) {
        v.object_attributes = overlay_from_json(kb, j.at("object_attributes"), ConceptKind::attribute);
      }
      v.quoted = opt_id(j, "quoted");
      v.inquit = opt_id(j, "inquit");
      v.scene = id_of(j.at("scene"));
      v.successors = id_list(j.at("successors"));
      v.predecessors = id_list(j.at("predecessors"));
      v.followers = id_list(j.at("followers"));
      v.anchor = opt_id(j, "anchor");
      v.result = opt_id(j, "result");
      v.inferred = j.at("inferred").get<bool>();
      v.authoritative = j.at("authoritative").get<bool>();
      v.created = j.at("created").get<double>();
      v.participation = j.at("participation").get<int>();
      v.surprise = j.at("surprise").get<double>();
      world.memory.restore(v.id, j.at("salience").get<double>());
      world.demoted.insert(v.id);
      world.vis.emplace(v.id, std::move(v));
    }
    for (const auto& r : doc.at("relations")) {
      world.relations.push_back(
          {r.at("name").get<std::string>(), id_of(r.at("from")), id_of(r.at("to")), std::nullopt});
    }
    for (const auto& l : doc.at("identity")) {
      auto kind = identity_kind_from_string(l.at("kind").get<std::string>());
      if (!kind) throw Error("snapshot: unknown identity kind");
      agent.mutable_identity().restore(IdentityLink{*kind, id_of(l.at("a")), id_of(l.at("b")),
                                                    l.at("created").get<double>(),
                                                    LinkOrigin::restored});
    }
    world.next_id = base + doc.at("next_id").get<std::uint32_t>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed snapshot: ") + e.what());
  }
}

void save_memory_snapshot(const Agent& agent, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write snapshot '" + path.string() + "'");
  out << memory_snapshot_json(agent) << '\n';
  if (!out) throw IoError("cannot write snapshot '" + path.string() + "'");
}

void load_memory_snapshot(Agent& agent, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open snapshot '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  restore_memory_json(agent, buffer.str());
}

}  // namespace loom
