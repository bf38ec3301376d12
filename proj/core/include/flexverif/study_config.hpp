#pragma once

#include <string>

#include "flexverif/casestudy.hpp"
#include "flexverif/explorer.hpp"
#include "flexverif/toml.hpp"

namespace flexverif {

/// Builds a StudyConfig from a parsed config table. `base_dir` anchors
/// relative model paths (usually the config file's directory).
StudyConfig study_config_from_toml(const toml::Table& table,
                                   const std::string& base_dir);

StudyConfig load_study_config(const std::string& path);

/// Emits the default home-care study as TOML. `model_ref` is written to the
/// `model` key ("casestudy" for the built-in generator, or a .mdp path);
/// action attributes are included so file-based models stay self-contained.
std::string default_study_toml(const casestudy::HomecareParams& params = {},
                               const std::string& model_ref = "casestudy");

}  // namespace flexverif
