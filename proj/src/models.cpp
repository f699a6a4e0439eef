#include "phhinf/models.hpp"

namespace phhinf::models {

sys::PHSystem msd_chain(const MsdConfig& cfg) {
  const int N = cfg.n_masses;
  if (N < 2) throw Error(ErrorCode::kInvalidArgument, "msd chain needs at least 2 masses");
  if (!(cfg.mass > 0.0) || !(cfg.stiffness > 0.0) || !(cfg.damping > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "mass, stiffness and damping must be positive");
  const int n = 2 * N;
  Matrix J = Matrix::Zero(n, n), R = Matrix::Zero(n, n), Q = Matrix::Zero(n, n);
  Matrix B = Matrix::Zero(n, 2);
  const double k = cfg.stiffness;
  for (int i = 0; i < N; ++i) {
    const int q = 2 * i, p = 2 * i + 1;
    J(q, p) = 1.0;
    J(p, q) = -1.0;
    R(p, p) = cfg.damping;
    Q(p, p) = 1.0 / cfg.mass;
    Q(q, q) = i == 0 ? k : 2.0 * k;
    if (i + 1 < N) {
      Q(q, q + 2) = -k;
      Q(q + 2, q) = -k;
    }
  }
  B(1, 0) = 1.0;
  B(3, 1) = 1.0;
  return sys::PHSystem(J, R, Q, B);
}

sys::PHSystem dc_motor(const DcMotorConfig& cfg) {
  if (!(cfg.resistance > 0.0) || !(cfg.friction > 0.0) || !(cfg.inductance > 0.0) ||
      !(cfg.inertia > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "motor parameters must be positive");
  Matrix J(2, 2), R(2, 2), Q(2, 2), B(2, 1);
  J << 0.0, -cfg.gyrator, cfg.gyrator, 0.0;
  R << cfg.resistance, 0.0, 0.0, cfg.friction;
  Q << 1.0 / cfg.inductance, 0.0, 0.0, 1.0 / cfg.inertia;
  B << 1.0, 0.0;
  return sys::PHSystem(J, R, Q, B);
}

}  // namespace phhinf::models
