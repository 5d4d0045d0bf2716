#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

#include "r2dnet/cli.hpp"
#include "r2dnet/dissipativity.hpp"
#include "r2dnet/network.hpp"
#include "r2dnet/quantize.hpp"

namespace r2dnet::cli {

namespace {

std::ofstream open_output(const RunConfig& config, const std::string& name) {
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw ConfigError("cannot write '" + (dir / name).string() + "'");
  return out;
}

std::string cell(const Vector& v) {
  std::string out;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k > 0) out += ';';
    out += format_number(v(k));
  }
  return out;
}

FeasibilityOptions lmi_options(const RunConfig& config) {
  FeasibilityOptions options;
  options.tol = config.lmi_tol;
  return options;
}

const char* status_name(RhoStatus status) {
  switch (status) {
    case RhoStatus::Ok: return "ok";
    case RhoStatus::Clamped: return "clamped";
    case RhoStatus::Budget: return "budget";
  }
  return "?";
}

struct ResolvedLoop {
  LoopIndices idx;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

// Fills in rho_p, rho_c and the betas the config leaves to be computed.
// Returns nullopt (after logging) when a search runs out.
std::optional<ResolvedLoop> resolve_loop(const RunConfig& config, std::ostream& log) {
  ResolvedLoop loop;
  loop.idx.nu_p = config.nu_p;
  loop.idx.nu_c = config.nu_c;
  loop.idx.delta_p = config.delta_p;
  loop.idx.delta_c = config.delta_c;
  loop.idx.rho_c = config.rho_c ? *config.rho_c : static_gain_indices(config.controller_k, config.nu_c);
  if (config.rho_p) {
    loop.idx.rho_p = *config.rho_p;
  } else {
    const auto found = maximize_rho(sampled_plant(config), config.nu_p, config.rho_tol, lmi_options(config));
    if (found.status == RhoStatus::Budget) {
      log << "error: rho_p search exhausted its iteration budget\n";
      return std::nullopt;
    }
    loop.idx.rho_p = found.rho;
  }
  if (config.beta_search) {
    const auto betas = search_beta(loop.idx);
    if (!betas) {
      log << "error: no beta pair makes both q-values negative\n";
      return std::nullopt;
    }
    loop.beta1 = betas->first;
    loop.beta2 = betas->second;
  } else {
    loop.beta1 = config.beta1;
    loop.beta2 = config.beta2;
  }
  return loop;
}

double column_energy(const VectorField& y, int j) {
  double e = 0.0;
  for (int i = 0; i < y.rows(); ++i) e += y(i, j).squaredNorm();
  return e;
}

double column_max(const VectorField& y, int j) {
  double m = 0.0;
  for (int i = 0; i < y.rows(); ++i) m = std::max(m, y(i, j).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

int cmd_discretize(const RunConfig& config, std::ostream& log) {
  const auto disc = sampled_plant(config);
  auto out = open_output(config, "discrete_model.csv");
  const std::pair<const char*, const Matrix*> blocks[] = {
      {"A11", &disc.a11}, {"A12", &disc.a12}, {"A21", &disc.a21}, {"A22", &disc.a22}, {"B1", &disc.b1},
      {"B2", &disc.b2},   {"C1", &disc.c1},   {"C2", &disc.c2},   {"D", &disc.d},
  };
  for (const auto& [name, m] : blocks) {
    out << "block," << name << ',' << m->rows() << ',' << m->cols() << '\n';
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      for (Eigen::Index j = 0; j < m->cols(); ++j) {
        if (j > 0) out << ',';
        out << format_number((*m)(i, j));
      }
      out << '\n';
    }
  }
  log << "discretize h1=" << format_number(config.sampling.h1) << " h2=" << format_number(config.sampling.h2)
      << " nh=" << disc.nh() << " nv=" << disc.nv() << " m=" << disc.m() << " p=" << disc.p() << '\n';
  return kSuccess;
}

int cmd_sweep_rho(const RunConfig& config, const Range& h1, const Range& h2, std::ostream& log) {
  struct Point {
    double h1 = 0.0;
    double h2 = 0.0;
    double rho = 0.0;
    std::string status;
  };
  std::vector<Point> points;
  for (int a = 0; a < h1.count; ++a) {
    for (int b = 0; b < h2.count; ++b) points.push_back({h1.at(a), h2.at(b), 0.0, {}});
  }

  const auto model = plant_model(config);
  const auto options = lmi_options(config);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < points.size(); k = next++) {
      auto& pt = points[k];
      try {
        const auto disc = sample_exact(model, SamplingSpec{pt.h1, pt.h2});
        const auto found = maximize_rho(disc, config.nu_p, config.rho_tol, options);
        pt.rho = found.rho;
        pt.status = status_name(found.status);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InfeasibleEverywhere) throw;
        pt.rho = std::numeric_limits<double>::quiet_NaN();
        pt.status = "infeasible";
      }
    }
  };
  const unsigned threads = std::max(1u, std::min(std::thread::hardware_concurrency(),
                                                 static_cast<unsigned>(points.size())));
  std::vector<std::future<void>> jobs;
  for (unsigned t = 0; t < threads; ++t) jobs.push_back(std::async(std::launch::async, worker));
  for (auto& job : jobs) job.get();

  auto out = open_output(config, "fig4.csv");
  out << "h1,h2,rho_max,status\n";
  bool exhausted = false;
  for (const auto& pt : points) {
    out << format_number(pt.h1) << ',' << format_number(pt.h2) << ',' << format_number(pt.rho) << ','
        << pt.status << '\n';
    exhausted = exhausted || pt.status == "budget";
  }
  log << "sweep-rho points=" << points.size() << " nu=" << format_number(config.nu_p) << '\n';
  if (exhausted) log << "warning: at least one point hit the iteration budget\n";
  return exhausted ? kSearchExhausted : kSuccess;
}

int cmd_simulate(const RunConfig& config, SimulationMode mode, std::ostream& log) {
  const auto disc = sampled_plant(config);
  const auto bc = plant_boundary(config);

  Grid2DTrajectory traj;
  const char* mode_name = "open";
  if (mode == SimulationMode::Open) {
    traj = simulate_open_loop(disc, bc, {}, config.n1, config.n2);
  } else {
    ClosedLoopOptions options;
    mode_name = "closed";
    if (mode != SimulationMode::Closed) {
      options.plant_quantizer = LogQuantizerSpec::from_delta(config.delta_p, config.dead_zone_p);
      options.controller_quantizer = LogQuantizerSpec::from_delta(config.delta_c, config.dead_zone_c);
      mode_name = "closed-quantized";
    }
    if (mode == SimulationMode::ClosedTriggered) {
      const auto loop = resolve_loop(config, log);
      if (!loop) return kSearchExhausted;
      options.trigger = trigger_params(loop->idx, loop->beta1, loop->beta2, config.theta1, config.theta2);
      mode_name = "closed-triggered";
    }
    traj = simulate_closed_loop(disc, StaticGain{config.controller_k}, options, bc, config.n1, config.n2);
  }

  const bool looped = mode != SimulationMode::Open;
  std::vector<char> triggered(static_cast<size_t>(config.n2), 0);
  for (int j : traj.trigger_instants) triggered[static_cast<size_t>(j)] = 1;

  auto out = open_output(config, "traj.csv");
  out << "i,j,y,y_transmitted,u_p,triggered\n";
  for (int j = 0; j < traj.n2; ++j) {
    for (int i = 0; i < traj.n1; ++i) {
      const Vector& sent = looped ? traj.y_quant(i, j) : traj.y(i, j);
      out << i << ',' << j << ',' << cell(traj.y(i, j)) << ',' << cell(sent) << ',' << cell(traj.u(i, j)) << ','
          << static_cast<int>(triggered[static_cast<size_t>(j)]) << '\n';
    }
  }
  if (looped) {
    auto trig = open_output(config, "triggers.csv");
    trig << "j_k\n";
    for (int j : traj.trigger_instants) trig << j << '\n';
  }

  double max_abs = 0.0;
  for (int j = 0; j < traj.n2; ++j) max_abs = std::max(max_abs, column_max(traj.y, j));
  const double first = column_energy(traj.y, 0);
  const double last = column_energy(traj.y, traj.n2 - 1);
  const double ratio = first > 0.0 ? last / first : (last > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  const char* trend = ratio > 1.01 ? "diverging" : (ratio < 0.99 ? "decaying" : "bounded");
  log << "summary mode=" << mode_name << " n1=" << traj.n1 << " n2=" << traj.n2
      << " max_abs_y=" << format_number(max_abs) << " y00=" << format_number(traj.y(0, 0).cwiseAbs().maxCoeff())
      << " last_column_max=" << format_number(column_max(traj.y, traj.n2 - 1))
      << " column_energy_ratio=" << format_number(ratio) << " trend=" << trend
      << " triggers=" << traj.trigger_instants.size() << '\n';
  return kSuccess;
}

int cmd_check(const RunConfig& config, std::ostream& log) {
  const auto loop = resolve_loop(config, log);
  if (!loop) {
    log << "stable=0\n";
    return kSearchExhausted;
  }
  const auto report = quantized_loop_report(loop->idx, loop->beta1, loop->beta2);
  const auto design = controller_design_check(loop->idx, loop->beta1, loop->beta2);
  auto line = [&log](const char* key, double v) { log << key << '=' << format_number(v) << '\n'; };
  line("rho_p", loop->idx.rho_p);
  line("nu_p", loop->idx.nu_p);
  line("rho_c", loop->idx.rho_c);
  line("nu_c", loop->idx.nu_c);
  line("delta_p", loop->idx.delta_p);
  line("delta_c", loop->idx.delta_c);
  line("beta1", report.beta1);
  line("beta2", report.beta2);
  line("q1", report.q1);
  line("q2", report.q2);
  line("r1", report.r1);
  line("r2", report.r2);
  line("margin_plant_side", design.margin_plant_side);
  line("margin_controller_side", design.margin_controller_side);
  if (report.stable) {
    const auto tp = trigger_params(loop->idx, loop->beta1, loop->beta2, config.theta1, config.theta2);
    line("theta1", tp.theta1);
    line("theta2", tp.theta2);
    line("eps_sq", tp.eps_sq);
    line("threshold_coeff", tp.threshold_coeff);
  }
  log << "stable=" << (report.stable ? 1 : 0) << '\n';
  return report.stable ? kSuccess : kConditionFailed;
}

}  // namespace r2dnet::cli
