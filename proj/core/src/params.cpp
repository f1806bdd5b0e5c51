#include "loom/params.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

#include "loom/errors.hpp"
#include "loom/knowledge.hpp"

namespace loom {
namespace {

using Field = std::variant<double Params::*, std::size_t Params::*, bool Params::*>;

const std::vector<std::pair<std::string_view, Field>>& fields() {
  static const std::vector<std::pair<std::string_view, Field>> table = {
      {"lambda_instance", &Params::lambda_instance},
      {"lambda_action", &Params::lambda_action},
      {"lambda_stative", &Params::lambda_stative},
      {"evict", &Params::evict},
      {"push_out", &Params::push_out},
      {"respiro", &Params::respiro},
      {"alpha", &Params::alpha},
      {"beta", &Params::beta},
      {"gamma", &Params::gamma},
      {"theta_hs", &Params::theta_hs},
      {"theta_inst", &Params::theta_inst},
      {"w_time", &Params::w_time},
      {"w_part", &Params::w_part},
      {"salience_decay", &Params::salience_decay},
      {"shadow_top_k", &Params::shadow_top_k},
      {"max_inferences", &Params::max_inferences},
      {"da_substeps", &Params::da_substeps},
      {"max_da_step", &Params::max_da_step},
      {"proper_noun_area", &Params::proper_noun_area},
      {"infer_identity", &Params::infer_identity},
      {"sigma_id", &Params::sigma_id},
      {"strict", &Params::strict},
      {"strict_nouns", &Params::strict_nouns},
      {"strict_verbs", &Params::strict_verbs},
  };
  return table;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

void Params::set(std::string_view key, std::string_view value) {
  std::string k = trim(key);
  std::string v = trim(value);
  for (const auto& [name, field] : fields()) {
    if (name != k) continue;
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(this->*member)>;
          if constexpr (std::is_same_v<T, bool>) {
            std::string lv = normalize_word(v);
            if (lv == "true" || lv == "1" || lv == "yes" || lv == "on") {
              this->*member = true;
            } else if (lv == "false" || lv == "0" || lv == "no" || lv == "off") {
              this->*member = false;
            } else {
              throw Error("parameter '" + k + "' expects a boolean, got '" + v + "'");
            }
          } else {
            T parsed{};
            auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
            if (ec != std::errc{} || ptr != v.data() + v.size()) {
              throw Error("parameter '" + k + "' expects a number, got '" + v + "'");
            }
            if constexpr (std::is_floating_point_v<T>) {
              if (parsed < 0.0) throw Error("parameter '" + k + "' must be non-negative");
            }
            this->*member = parsed;
          }
        },
        field);
    return;
  }
  throw Error("unknown parameter '" + k + "'");
}

std::vector<std::string> Params::keys() {
  std::vector<std::string> out;
  for (const auto& [name, field] : fields()) out.emplace_back(name);
  return out;
}

void load_params_text(Params& params, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    try {
      params.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(number) + ": " + e.what());
    }
  }
}

void load_params_file(Params& params, const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  load_params_text(params, buffer.str());
}

}  // namespace loom
