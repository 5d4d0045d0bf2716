#include "r2dnet/sim2d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace r2dnet {

namespace {

void check_grid(const BoundaryConditions& bc, int n1, int n2, int nh, int nv) {
  if (n1 <= 0 || n2 <= 0) throw Error(ErrorKind::InvalidArgument, "grid must be at least 1x1");
  if (static_cast<int>(bc.xh0.size()) != n2 || static_cast<int>(bc.xv0.size()) != n1) {
    throw Error(ErrorKind::DimensionMismatch,
                "boundary lengths (" + std::to_string(bc.xh0.size()) + ", " +
                    std::to_string(bc.xv0.size()) + ") do not match grid (" + std::to_string(n2) +
                    ", " + std::to_string(n1) + ")");
  }
  for (const auto& x : bc.xh0) {
    if (x.size() != nh) throw Error(ErrorKind::DimensionMismatch, "x_h boundary has wrong size");
  }
  for (const auto& x : bc.xv0) {
    if (x.size() != nv) throw Error(ErrorKind::DimensionMismatch, "x_v boundary has wrong size");
  }
}

void guard(const Vector& x, int i, int j) {
  if (!x.allFinite() || (x.size() > 0 && x.cwiseAbs().maxCoeff() > kDivergenceLimit)) {
    throw NonFiniteStateError(i, j,
                              "state diverged at (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ")");
  }
}

Vector sample(const InputField& field, int i, int j, int dim) {
  if (!field) return Vector::Zero(dim);
  Vector v = field(i, j);
  if (v.size() != dim) throw Error(ErrorKind::DimensionMismatch, "input field has wrong size");
  return v;
}

void allocate_plant(Grid2DTrajectory& traj, const RoesserBlocks& model, int n1, int n2,
                    const BoundaryConditions& bc) {
  traj.n1 = n1;
  traj.n2 = n2;
  traj.xh = VectorField(n1 + 1, n2, model.nh());
  traj.xv = VectorField(n1, n2 + 1, model.nv());
  traj.u = VectorField(n1, n2, model.m());
  traj.y = VectorField(n1, n2, model.p());
  for (int j = 0; j < n2; ++j) traj.xh(0, j) = bc.xh0[static_cast<size_t>(j)];
  for (int i = 0; i < n1; ++i) traj.xv(i, 0) = bc.xv0[static_cast<size_t>(i)];
}

// One Roesser step at (i, j) for an arbitrary field pair.
void advance(const RoesserBlocks& model, VectorField& xh, VectorField& xv, const Vector& u, int i,
             int j) {
  const Vector& h = xh(i, j);
  const Vector& v = xv(i, j);
  Vector next_h = model.a11 * h + model.a12 * v + model.b1 * u;
  Vector next_v = model.a21 * h + model.a22 * v + model.b2 * u;
  guard(next_h, i, j);
  guard(next_v, i, j);
  xh(i + 1, j) = std::move(next_h);
  xv(i, j + 1) = std::move(next_v);
}

class ClosedLoop {
 public:
  ClosedLoop(const DiscreteRoesser2D& plant, const ControllerSpec& ctrl,
             const ClosedLoopOptions& options, const BoundaryConditions& bc, int n1, int n2)
      : plant_(plant), options_(options), n1_(n1), n2_(n2) {
    plant.validate();
    check_grid(bc, n1, n2, plant.nh(), plant.nv());
    if (options.trigger && !options.plant_quantizer) {
      throw Error(ErrorKind::InvalidArgument, "event-triggered runs need a plant quantizer");
    }
    const bool plant_feedthrough = !plant.d.isZero(0.0);
    if (const auto* gain = std::get_if<StaticGain>(&ctrl)) {
      if (plant.m() != plant.p()) {
        throw Error(ErrorKind::DimensionMismatch, "static gain needs a square plant (m = p)");
      }
      if (!std::isfinite(gain->k)) throw Error(ErrorKind::NonFiniteValue, "static gain");
      if (plant_feedthrough) {
        throw Error(ErrorKind::AlgebraicLoop, "static controller requires plant D = 0");
      }
      gain_ = gain->k;
    } else {
      dynamic_ = &std::get<DynamicController>(ctrl);
      const auto& model = dynamic_->model;
      model.validate();
      if (model.m() != plant.p() || model.p() != plant.m()) {
        throw Error(ErrorKind::DimensionMismatch, "controller is not conformable with the plant");
      }
      check_grid(dynamic_->boundary, n1, n2, model.nh(), model.nv());
      if (plant_feedthrough && !model.d.isZero(0.0)) {
        throw Error(ErrorKind::AlgebraicLoop, "plant and controller both have feedthrough");
      }
    }
    plant_feedthrough_ = plant_feedthrough;

    allocate_plant(traj_, plant, n1, n2, bc);
    traj_.y_quant = VectorField(n1, n2, plant.p());
    traj_.u_c = VectorField(n1, n2, plant.p());
    traj_.y_c = VectorField(n1, n2, plant.m());
    traj_.y_c_quant = VectorField(n1, n2, plant.m());
    if (dynamic_) {
      const auto& model = dynamic_->model;
      traj_.xh_c = VectorField(n1 + 1, n2, model.nh());
      traj_.xv_c = VectorField(n1, n2 + 1, model.nv());
      for (int j = 0; j < n2; ++j) traj_.xh_c(0, j) = dynamic_->boundary.xh0[static_cast<size_t>(j)];
      for (int i = 0; i < n1; ++i) traj_.xv_c(i, 0) = dynamic_->boundary.xv0[static_cast<size_t>(i)];
    }
    if (options.trigger) traj_.y_probe = VectorField(n1, n2, plant.p());
  }

  Grid2DTrajectory run() {
    std::vector<Vector> held;
    for (int j = 0; j < n2_; ++j) {
      if (!options_.trigger) {
        run_column(j, nullptr);
        traj_.trigger_instants.push_back(j);
        continue;
      }
      if (j == 0) {
        held = run_column(j, nullptr);
        store_probe(j, held);
        traj_.trigger_instants.push_back(j);
        continue;
      }
      const std::vector<Vector> probe = run_column(j, &held);
      store_probe(j, probe);
      if (trigger_step(*options_.trigger, probe, held)) {
        held = run_column(j, nullptr);
        traj_.trigger_instants.push_back(j);
      }
    }
    return std::move(traj_);
  }

 private:
  Vector quantize_plant(const Vector& y) const {
    return options_.plant_quantizer ? quantize_vec(*options_.plant_quantizer, y) : y;
  }
  Vector quantize_controller(const Vector& y) const {
    return options_.controller_quantizer ? quantize_vec(*options_.controller_quantizer, y) : y;
  }

  Vector controller_output(const Vector& u_c, int i, int j) const {
    if (!dynamic_) return gain_ * u_c;
    const auto& model = dynamic_->model;
    return model.c1 * traj_.xh_c(i, j) + model.c2 * traj_.xv_c(i, j) + model.d * u_c;
  }

  void store_probe(int j, const std::vector<Vector>& column) {
    for (int i = 0; i < n1_; ++i) traj_.y_probe(i, j) = column[static_cast<size_t>(i)];
  }

  // Computes column j; returns Q_p(y(i, j)) for every i. With held == nullptr
  // the controller receives these fresh values, otherwise the held ones.
  std::vector<Vector> run_column(int j, const std::vector<Vector>* held) {
    std::vector<Vector> fresh(static_cast<size_t>(n1_));
    const int m = plant_.m();
    const int p = plant_.p();
    for (int i = 0; i < n1_; ++i) {
      const Vector r_p = sample(options_.r_p, i, j, m);
      const Vector r_c = sample(options_.r_c, i, j, p);
      const Vector free_y = plant_.c1 * traj_.xh(i, j) + plant_.c2 * traj_.xv(i, j);

      Vector y, y_q, sent, u_c, y_c, y_c_q, u_p;
      if (plant_feedthrough_) {
        // Controller is strictly proper here, so its output comes first.
        y_c = controller_output(Vector::Zero(p), i, j);
        y_c_q = quantize_controller(y_c);
        u_p = r_p - y_c_q;
        y = free_y + plant_.d * u_p;
        y_q = quantize_plant(y);
        sent = held ? (*held)[static_cast<size_t>(i)] : y_q;
        u_c = r_c + sent;
      } else {
        y = free_y;
        y_q = quantize_plant(y);
        sent = held ? (*held)[static_cast<size_t>(i)] : y_q;
        u_c = r_c + sent;
        y_c = controller_output(u_c, i, j);
        y_c_q = quantize_controller(y_c);
        u_p = r_p - y_c_q;
      }

      advance(plant_, traj_.xh, traj_.xv, u_p, i, j);
      if (dynamic_) advance(dynamic_->model, traj_.xh_c, traj_.xv_c, u_c, i, j);

      traj_.u(i, j) = u_p;
      traj_.y(i, j) = y;
      traj_.y_quant(i, j) = sent;
      traj_.u_c(i, j) = u_c;
      traj_.y_c(i, j) = y_c;
      traj_.y_c_quant(i, j) = y_c_q;
      fresh[static_cast<size_t>(i)] = std::move(y_q);
    }
    return fresh;
  }

  const DiscreteRoesser2D& plant_;
  const ClosedLoopOptions& options_;
  const DynamicController* dynamic_ = nullptr;
  double gain_ = 0.0;
  bool plant_feedthrough_ = false;
  int n1_;
  int n2_;
  Grid2DTrajectory traj_;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit fit_nonnegative_slope(const std::vector<double>& x, const std::vector<double>& y,
                              size_t count) {
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (size_t k = 0; k < count; ++k) {
    mean_x += x[k];
    mean_y += y[k];
  }
  mean_x /= static_cast<double>(count);
  mean_y /= static_cast<double>(count);
  double sxx = 0.0;
  double sxy = 0.0;
  for (size_t k = 0; k < count; ++k) {
    sxx += (x[k] - mean_x) * (x[k] - mean_x);
    sxy += (x[k] - mean_x) * (y[k] - mean_y);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? std::max(0.0, sxy / sxx) : 0.0;
  fit.intercept = mean_y - fit.slope * mean_x;
  return fit;
}

bool close(double a, double b) {
  return std::abs(a - b) <= 0.05 * std::max({std::abs(a), std::abs(b), 1e-12});
}

}  // namespace

Grid2DTrajectory simulate_open_loop(const DiscreteRoesser2D& disc, const BoundaryConditions& bc,
                                    const InputField& input, int n1, int n2) {
  disc.validate();
  check_grid(bc, n1, n2, disc.nh(), disc.nv());
  Grid2DTrajectory traj;
  allocate_plant(traj, disc, n1, n2, bc);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const Vector u = sample(input, i, j, disc.m());
      traj.y(i, j) = disc.c1 * traj.xh(i, j) + disc.c2 * traj.xv(i, j) + disc.d * u;
      advance(disc, traj.xh, traj.xv, u, i, j);
      traj.u(i, j) = u;
    }
  }
  return traj;
}

Grid2DTrajectory simulate_closed_loop(const DiscreteRoesser2D& disc, const ControllerSpec& ctrl,
                                      const ClosedLoopOptions& options,
                                      const BoundaryConditions& bc, int n1, int n2) {
  return ClosedLoop(disc, ctrl, options, bc, n1, n2).run();
}

bool trigger_step(const TriggerParams& params, std::span<const Vector> current,
                  std::span<const Vector> held) {
  if (current.size() != held.size()) {
    throw Error(ErrorKind::DimensionMismatch, "current and held columns differ in length");
  }
  if (!(params.eps_sq > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps_sq must be positive");
  const double eps = std::sqrt(params.eps_sq);
  double lhs = 0.0;
  double energy = 0.0;
  for (size_t i = 0; i < current.size(); ++i) {
    if (current[i].size() != held[i].size()) {
      throw Error(ErrorKind::DimensionMismatch, "column entries differ in size");
    }
    const Vector e = current[i] - held[i];
    lhs += (eps * e + (params.nu_c / eps) * current[i]).squaredNorm();
    energy += current[i].squaredNorm();
  }
  return lhs > params.threshold_coeff * energy;
}

double recursion_residual(const DiscreteRoesser2D& disc, const Grid2DTrajectory& traj) {
  double worst = 0.0;
  auto update = [&](const Vector& stored, const Vector& expected) {
    if (expected.size() == 0) return;
    const double diff = (stored - expected).cwiseAbs().maxCoeff();
    worst = std::max(worst, diff / (1.0 + expected.cwiseAbs().maxCoeff()));
  };
  for (int j = 0; j < traj.n2; ++j) {
    for (int i = 0; i < traj.n1; ++i) {
      const Vector& h = traj.xh(i, j);
      const Vector& v = traj.xv(i, j);
      const Vector& u = traj.u(i, j);
      update(traj.xh(i + 1, j), disc.a11 * h + disc.a12 * v + disc.b1 * u);
      update(traj.xv(i, j + 1), disc.a21 * h + disc.a22 * v + disc.b2 * u);
      update(traj.y(i, j), disc.c1 * h + disc.c2 * v + disc.d * u);
    }
  }
  return worst;
}

GainEstimate estimate_l2_gain(const Grid2DTrajectory& traj, const InputField& reference,
                              OutputSelection selection) {
  GainEstimate out;
  if (traj.n1 == 0 || traj.n2 == 0) return out;
  const VectorField& output =
      selection == OutputSelection::Transmitted && !traj.y_quant.empty() ? traj.y_quant : traj.y;

  const size_t count = static_cast<size_t>(traj.n2);
  std::vector<double> cum_in(count);
  std::vector<double> cum_out(count);
  double in = 0.0;
  double energy = 0.0;
  for (int j = 0; j < traj.n2; ++j) {
    for (int i = 0; i < traj.n1; ++i) {
      energy += output(i, j).squaredNorm();
      if (reference) in += reference(i, j).squaredNorm();
    }
    cum_in[static_cast<size_t>(j)] = in;
    cum_out[static_cast<size_t>(j)] = energy;
  }

  if (in == 0.0) {
    out.gamma_sq = 0.0;
    out.offset = energy;
    out.converged = close(cum_out[(count - 1) / 2], energy);
    return out;
  }
  const LineFit full = fit_nonnegative_slope(cum_in, cum_out, count);
  const LineFit half = fit_nonnegative_slope(cum_in, cum_out, std::max<size_t>(2, count / 2));
  out.gamma_sq = full.slope;
  out.offset = full.intercept;
  out.converged = close(full.slope, half.slope) && close(full.intercept, half.intercept);
  return out;
}

}  // namespace r2dnet
