#pragma once

#include <map>
#include <string>
#include <variant>

#include <json.hpp>

#include "phhinf/sys.hpp"

namespace phhinf::sys {

using Json = nlohmann::ordered_json;

// Directory of MatrixMarket files plus manifest.json listing them.
void save_blocks(const std::string& dir, const std::string& kind,
                 const std::map<std::string, Matrix>& blocks, const Json& meta = Json::object());
Json load_manifest(const std::string& dir);
Matrix load_block(const std::string& dir, const Json& manifest, const std::string& name);

void save(const std::string& dir, const StateSpace& ss, const Json& meta = Json::object());
void save(const std::string& dir, const PHSystem& ph, const Json& meta = Json::object());
StateSpace load_state_space(const std::string& dir);
PHSystem load_ph_system(const std::string& dir);

// Either kind; a "ph_system" manifest yields the PHSystem.
std::variant<StateSpace, PHSystem> load_system(const std::string& dir);

}  // namespace phhinf::sys
