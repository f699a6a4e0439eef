#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phhinf/serialize.hpp"
#include "phhinf/synth.hpp"

namespace phhinf::cli {

using sys::Json;

struct ModelSpec {
  std::string model = "dc";  // msd | dc | directory of a saved PHSystem
  int n_masses = 5;
  double mass = 4.0;
  double stiffness = 4.0;
  double damping = 1.0;
};

sys::PHSystem load_model(const ModelSpec& ms);
Json model_json(const ModelSpec& ms);

// "none", "0", "<alpha>Q", "<alpha>*Q", "<alpha>Xmax", or a MatrixMarket path.
Matrix parse_P(const std::string& text, const sys::PHSystem& ph);

std::vector<double> gamma_grid(double lo, double hi, int count);

struct SweepRow {
  double gamma;
  synth::Variant variant;
  double norm;  // nan on failure
  bool bound_satisfied;
  std::string reason;
};

struct SweepConfig {
  std::vector<double> gammas = gamma_grid(1.05, 3.95, 30);
  std::vector<synth::Variant> variants{synth::Variant::kClassical, synth::Variant::kModified};
  Matrix P;
  int jobs = 1;
};

std::vector<SweepRow> run_sweep(const sys::PHSystem& ph, const SweepConfig& cfg);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// --jobs if positive, else PHHINF_JOBS, else 1.
int resolve_jobs(int flag);

Json certificate_json(const synth::Controller& c, const sys::StateSpace& plant);
void save_controller(const std::string& dir, const synth::Controller& c, const Json& meta);

// Exit codes: 0 ok, 2 inadmissible configuration, 1 solver failure.
int exit_code_for(const Error& e);

int run(int argc, char** argv);

}  // namespace phhinf::cli
