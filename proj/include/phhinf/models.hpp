#pragma once

#include "phhinf/sys.hpp"

namespace phhinf::models {

// Chain of n_masses masses, wall at the last one, forces on masses 1 and 2.
// States are interleaved (q1, p1, q2, p2, ...).
struct MsdConfig {
  int n_masses = 5;
  double mass = 4.0;
  double stiffness = 4.0;
  double damping = 1.0;
};

// Gyrator-coupled electrical and mechanical ports, states (flux, momentum).
struct DcMotorConfig {
  double gyrator = 1.0;
  double resistance = 2.0;
  double friction = 1.0;
  double inductance = 1.0;
  double inertia = 2.0;
};

sys::PHSystem msd_chain(const MsdConfig& cfg = {});
sys::PHSystem dc_motor(const DcMotorConfig& cfg = {});

}  // namespace phhinf::models
