#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace loom {

/// Tunable dynamics of one agent. Defaults are the reference configuration
/// used by the corpus tests; every field can be overridden by name.
struct Params {
  // Focus decay (per second) and eviction.
  double lambda_instance = 0.05;
  double lambda_action = 0.2;
  double lambda_stative = 0.1;
  double evict = 0.05;
  double push_out = 0.5;
  /// Minimum pause (seconds) after a sentence that lets the agent
  /// instantiate predicted events.
  double respiro = 2.0;

  // Shadow dynamics.
  double alpha = 0.3;
  double beta = 0.5;
  double gamma = 0.4;
  double theta_hs = 0.5;
  double theta_inst = 0.3;
  double w_time = 0.01;
  double w_part = 0.2;
  double salience_decay = 0.001;
  std::size_t shadow_top_k = 16;

  std::size_t max_inferences = 8;
  std::size_t da_substeps = 10;
  /// Upper bound on one diffusion sub-step; keeps the explicit update stable
  /// for long pauses.
  double max_da_step = 1.0;

  double proper_noun_area = 0.1;

  bool infer_identity = false;
  double sigma_id = 0.6;

  /// Strict mode: resolution ties and somatic branching are errors.
  bool strict = false;
  /// Unknown nouns are errors unless lenient.
  bool strict_nouns = true;
  /// Unknown verbs are errors only when strict.
  bool strict_verbs = false;

  /// Sets a field by name from its textual value. Throws loom::Error for
  /// unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);

  static std::vector<std::string> keys();
};

/// Reads `key = value` lines (with `#` comments) into `params`.
void load_params_file(Params& params, const std::filesystem::path& path);
void load_params_text(Params& params, std::string_view text);

}  // namespace loom
