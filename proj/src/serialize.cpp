#include "phhinf/serialize.hpp"

#include <filesystem>
#include <fstream>

namespace phhinf::sys {

namespace fs = std::filesystem;

void save_blocks(const std::string& dir, const std::string& kind,
                 const std::map<std::string, Matrix>& blocks, const Json& meta) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  Json manifest;
  manifest["format"] = "phhinf";
  manifest["version"] = 1;
  manifest["kind"] = kind;
  Json files = Json::object();
  for (const auto& [name, M] : blocks) {
    std::string file = name + ".mtx";
    matkit::write_matrix_market((fs::path(dir) / file).string(), M);
    files[name] = {{"file", file}, {"rows", M.rows()}, {"cols", M.cols()}};
  }
  manifest["blocks"] = files;
  if (!meta.empty()) manifest["meta"] = meta;
  std::ofstream f(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write manifest in " + dir);
  f << manifest.dump(2) << "\n";
}

Json load_manifest(const std::string& dir) {
  std::ifstream f(fs::path(dir) / "manifest.json");
  if (!f) throw Error(ErrorCode::kIo, "no manifest.json in " + dir);
  try {
    return Json::parse(f);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kIo, std::string("bad manifest: ") + e.what());
  }
}

Matrix load_block(const std::string& dir, const Json& manifest, const std::string& name) {
  if (!manifest.contains("blocks") || !manifest["blocks"].contains(name))
    throw Error(ErrorCode::kIo, "manifest has no block " + name);
  const Json& b = manifest["blocks"][name];
  Matrix M = matkit::read_matrix_market((fs::path(dir) / b["file"].get<std::string>()).string());
  if (M.rows() != b["rows"].get<long>() || M.cols() != b["cols"].get<long>())
    throw Error(ErrorCode::kIo, "block " + name + " size disagrees with manifest");
  return M;
}

void save(const std::string& dir, const StateSpace& ss, const Json& meta) {
  save_blocks(dir, "state_space", {{"A", ss.A()}, {"B", ss.B()}, {"C", ss.C()}, {"D", ss.D()}},
              meta);
}

void save(const std::string& dir, const PHSystem& ph, const Json& meta) {
  save_blocks(dir, "ph_system", {{"J", ph.J()}, {"R", ph.R()}, {"Q", ph.Q()}, {"B", ph.B()}},
              meta);
}

StateSpace load_state_space(const std::string& dir) {
  Json m = load_manifest(dir);
  if (m.value("kind", "") == "ph_system") return ph_to_ss(load_ph_system(dir));
  Matrix D = m["blocks"].contains("D") ? load_block(dir, m, "D") : Matrix();
  Matrix A = load_block(dir, m, "A"), B = load_block(dir, m, "B"), C = load_block(dir, m, "C");
  if (D.size() == 0) return StateSpace(A, B, C);
  return StateSpace(A, B, C, D);
}

PHSystem load_ph_system(const std::string& dir) {
  Json m = load_manifest(dir);
  if (m.value("kind", "") != "ph_system" && !m["blocks"].contains("J"))
    throw Error(ErrorCode::kIo, dir + " does not hold a pH system");
  return PHSystem(load_block(dir, m, "J"), load_block(dir, m, "R"), load_block(dir, m, "Q"),
                  load_block(dir, m, "B"));
}

std::variant<StateSpace, PHSystem> load_system(const std::string& dir) {
  Json m = load_manifest(dir);
  if (m["blocks"].contains("J")) return load_ph_system(dir);
  return load_state_space(dir);
}

}  // namespace phhinf::sys
