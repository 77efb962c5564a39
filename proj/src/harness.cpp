#include "kcm/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "kcm/chain.hpp"
#include "kcm/energy.hpp"

namespace kcm {

namespace fs = std::filesystem;

std::string format17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

RunMode parse_run_mode(const std::string& name) {
  if (name == "fold") return RunMode::kFold;
  if (name == "unfold-tweezer") return RunMode::kUnfoldTweezer;
  if (name == "unfold-ccf") return RunMode::kUnfoldCcf;
  if (name == "certify") return RunMode::kCertify;
  if (name == "sphere-scan") return RunMode::kSphereScan;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

std::string run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kFold: return "fold";
    case RunMode::kUnfoldTweezer: return "unfold-tweezer";
    case RunMode::kUnfoldCcf: return "unfold-ccf";
    case RunMode::kCertify: return "certify";
    case RunMode::kSphereScan: return "sphere-scan";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

class ConfigFile {
 public:
  explicit ConfigFile(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad section header");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
      const std::string key = (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
      values_[key] = trim(line.substr(eq + 1));
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string take(const std::string& key, const std::string& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    return it->second;
  }

  double take_double(const std::string& key, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (trim(it->second.substr(pos)).empty()) return v;
    } catch (...) {
    }
    throw std::runtime_error(path_ + ": key '" + key + "' is not a number: " + it->second);
  }

  long take_long(const std::string& key, long fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    try {
      std::size_t pos = 0;
      const long v = std::stol(it->second, &pos);
      if (trim(it->second.substr(pos)).empty()) return v;
    } catch (...) {
    }
    throw std::runtime_error(path_ + ": key '" + key + "' is not an integer: " + it->second);
  }

  bool take_bool(const std::string& key, bool fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::runtime_error(path_ + ": key '" + key + "' is not a boolean: " + it->second);
  }

  Eigen::Vector3d take_vector3(const std::string& key, const Eigen::Vector3d& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    std::istringstream ss(it->second);
    Eigen::Vector3d v;
    if (ss >> v.x() >> v.y() >> v.z()) return v;
    throw std::runtime_error(path_ + ": key '" + key + "' is not a 3-vector: " + it->second);
  }

  void reject_unconsumed() const {
    for (const auto& [key, value] : values_) {
      if (!consumed_.count(key))
        throw std::runtime_error(path_ + ": unknown config key '" + key + "'");
    }
  }

 private:
  std::string path_;
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

}  // namespace

SimConfig load_config_file(const std::string& path) {
  ConfigFile file(path);
  SimConfig config;
  if (file.has("mode")) config.mode = parse_run_mode(file.take("mode", ""));
  config.seed = static_cast<std::uint64_t>(file.take_long("seed", 1));
  config.out_dir = file.take("out_dir", config.out_dir);
  config.topology_file = file.take("topology.file", config.topology_file);
  config.theta_star_source = file.take("conformation.theta_star", config.theta_star_source);
  config.theta0_source = file.take("conformation.theta0", config.theta0_source);
  config.stretch_eps = file.take_double("conformation.stretch_eps", config.stretch_eps);
  config.dt = file.take_double("integration.dt", config.dt);
  config.steps = static_cast<int>(file.take_long("integration.steps", config.steps));
  config.fold.step = file.take_double("fold.h", config.fold.step);
  config.fold.torque_tolerance =
      file.take_double("fold.torque_tolerance", config.fold.torque_tolerance);
  config.fold.max_iters = static_cast<int>(file.take_long("fold.max_iters", config.fold.max_iters));
  config.x0_nm = file.take_double("tweezer.x0_nm", config.x0_nm);
  config.tweezer_direction = file.take_vector3("tweezer.direction", config.tweezer_direction);
  config.kappa0 = file.take_double("tweezer.kappa0", config.kappa0);
  config.modulation_exponent =
      static_cast<int>(file.take_long("tweezer.m", config.modulation_exponent));
  config.torque_over_last_plane =
      file.take_bool("tweezer.torque_over_last_plane", config.torque_over_last_plane);
  config.p = file.take_double("sontag.p", config.p);
  config.q = file.take_double("sontag.q", config.q);
  config.ccf = file.take("sontag.ccf", config.ccf);
  config.clamp = file.take("sontag.clamp", config.clamp);
  config.alpha_c = file.take_double("chetaev.alpha_c", config.alpha_c);
  config.fd_eps = file.take_double("chetaev.fd_eps", config.fd_eps);
  config.sample_radius = file.take_double("chetaev.sample_radius", config.sample_radius);
  config.certify_samples =
      static_cast<int>(file.take_long("chetaev.certify_samples", config.certify_samples));
  config.sphere_points = static_cast<int>(file.take_long("sphere.points", config.sphere_points));
  config.sphere_radius = file.take_double("sphere.radius", config.sphere_radius);
  config.output_stride = static_cast<int>(file.take_long("outputs.stride", config.output_stride));
  config.energy_csv = file.take("outputs.energy_csv", config.energy_csv);
  config.xyz_path = file.take("outputs.xyz", config.xyz_path);
  config.report_path = file.take("outputs.report", config.report_path);
  file.reject_unconsumed();
  return config;
}

Eigen::VectorXd stretch_direction(const ChainTopology& topology,
                                  const Eigen::VectorXd& theta_star) {
  const KinematicState state = kinematic_state(topology, theta_star);
  const double len = state.end_to_end.norm();
  if (len == 0.0) throw std::runtime_error("stretch_direction: zero end-to-end vector");
  const Eigen::MatrixXd jac = end_to_end_jacobian(topology, state);
  Eigen::VectorXd grad = jac.transpose() * (state.end_to_end / len);
  const double norm = grad.norm();
  if (norm == 0.0) throw std::runtime_error("stretch_direction: end-to-end length is stationary");
  return grad / norm;
}

namespace {

Eigen::VectorXd parse_inline_angles(const std::string& text, int dof, const std::string& what) {
  std::istringstream ss(text);
  std::vector<double> values;
  double v;
  while (ss >> v) values.push_back(v);
  if (static_cast<int>(values.size()) != dof)
    throw std::runtime_error(what + ": expected " + std::to_string(dof) + " angles, got " +
                             std::to_string(values.size()));
  return Eigen::Map<Eigen::VectorXd>(values.data(), dof);
}

Eigen::VectorXd load_angles_file(const std::string& path, int dof) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open conformation file: " + path);
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  if (static_cast<int>(values.size()) != dof)
    throw std::runtime_error(path + ": expected " + std::to_string(dof) + " angles, got " +
                             std::to_string(values.size()));
  return Eigen::Map<Eigen::VectorXd>(values.data(), dof);
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

Eigen::VectorXd resolve_theta_star(const SimConfig& config, const ChainTopology& topology) {
  const int dof = topology.dihedral_count();
  const std::string& src = config.theta_star_source;
  if (src == "builtin") {
    Eigen::VectorXd theta = default_folded_reference();
    if (theta.size() != dof)
      throw std::runtime_error("builtin reference conformation has 22 angles; topology needs " +
                               std::to_string(dof));
    return theta;
  }
  if (starts_with(src, "file ")) return load_angles_file(trim(src.substr(5)), dof);
  return parse_inline_angles(src, dof, "theta_star");
}

Eigen::VectorXd resolve_theta0(const SimConfig& config, const ChainTopology& topology,
                               const Eigen::VectorXd& theta_star) {
  const int dof = topology.dihedral_count();
  std::string src = config.theta0_source;
  if (src == "auto") {
    switch (config.mode) {
      case RunMode::kFold: src = "builtin"; break;
      case RunMode::kUnfoldTweezer:
      case RunMode::kUnfoldCcf: src = "star+stretch"; break;
      default: src = "star"; break;
    }
  }
  if (src == "builtin") {
    Eigen::VectorXd theta = default_initial_conformation();
    if (theta.size() != dof)
      throw std::runtime_error("builtin initial conformation has 22 angles; topology needs " +
                               std::to_string(dof));
    return theta;
  }
  if (src == "star") return theta_star;
  if (src == "star+stretch")
    return theta_star + config.stretch_eps * stretch_direction(topology, theta_star);
  if (starts_with(src, "file ")) return load_angles_file(trim(src.substr(5)), dof);
  return parse_inline_angles(src, dof, "theta0");
}

std::string angles_to_text(const Eigen::VectorXd& theta) {
  std::ostringstream out;
  for (int i = 0; i < theta.size(); ++i) {
    if (i) out << " ";
    out << format17(theta[i]);
  }
  return out.str();
}

struct RunOutcome {
  bool has_trajectory = false;
  std::size_t entries = 0;
  bool converged = false;
  bool aborted = false;
  std::string abort_reason;
  double energy_start = 0.0, energy_end = 0.0;
  double r_nc_start = 0.0, r_nc_end = 0.0;
  double chetaev_start = 0.0, chetaev_end = 0.0;
  long clamp_events = -1;  // CCF runs only
  std::string certification;  // certify runs only
};

void write_report(const SimConfig& config, const ChainTopology& topology,
                  const Eigen::VectorXd& theta_star, const Eigen::VectorXd& theta0,
                  const std::string& resolved_clamp, int resolved_stride,
                  const RunOutcome& outcome, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "kcm-unfold run summary\n";
  out << "\n[config]\n";
  out << "mode: " << run_mode_name(config.mode) << "\n";
  out << "seed: " << config.seed << "\n";
  out << "out_dir: " << config.out_dir << "\n";
  out << "topology: " << (config.topology_file.empty() ? "builtin" : config.topology_file) << "\n";
  out << "planes: " << topology.n_planes() << "\n";
  out << "dihedrals: " << topology.dihedral_count() << "\n";
  out << "atoms: " << topology.atoms().size() << "\n";
  out << "theta_star: " << angles_to_text(theta_star) << "\n";
  out << "theta0: " << angles_to_text(theta0) << "\n";
  out << "stretch_eps: " << format17(config.stretch_eps) << "\n";
  out << "dt: " << format17(config.dt) << "  # implementation default, not a reference value\n";
  out << "steps: " << config.steps << "  # implementation default, not a reference value\n";
  out << "fold.h: " << format17(config.fold.step) << "\n";
  out << "fold.torque_tolerance: " << format17(config.fold.torque_tolerance) << "\n";
  out << "fold.max_iters: " << config.fold.max_iters << "\n";
  out << "tweezer.x0_nm: " << format17(config.x0_nm) << "\n";
  out << "tweezer.direction: "
      << (config.tweezer_direction.isZero()
              ? std::string("along reference end-to-end vector")
              : angles_to_text(Eigen::VectorXd(config.tweezer_direction)))
      << "\n";
  out << "tweezer.kappa0: " << format17(config.kappa0) << "\n";
  out << "tweezer.m: " << config.modulation_exponent << "\n";
  out << "tweezer.torque_over_last_plane: " << (config.torque_over_last_plane ? "true" : "false")
      << "\n";
  out << "sontag.p: " << format17(config.p) << "\n";
  out << "sontag.q: " << format17(config.q) << "\n";
  out << "sontag.ccf: " << config.ccf << "\n";
  out << "sontag.clamp: " << resolved_clamp << "\n";
  out << "chetaev.alpha_c: " << format17(config.alpha_c) << "\n";
  out << "chetaev.fd_eps: " << format17(config.fd_eps) << "\n";
  out << "chetaev.sample_radius: " << format17(config.sample_radius) << "\n";
  out << "chetaev.certify_samples: " << config.certify_samples << "\n";
  out << "sphere.points: " << config.sphere_points << "\n";
  out << "sphere.radius: " << format17(config.sphere_radius) << "\n";
  out << "outputs.stride: " << resolved_stride
      << (config.output_stride == 0 ? "  # auto" : "") << "\n";
  out << "outputs.energy_csv: " << config.energy_csv << "\n";
  out << "outputs.xyz: " << config.xyz_path << "\n";
  out << "outputs.report: " << config.report_path << "\n";

  out << "\n[results]\n";
  if (outcome.has_trajectory) {
    out << "entries: " << outcome.entries << "\n";
    out << "converged: " << (outcome.converged ? "true" : "false") << "\n";
    out << "aborted: " << (outcome.aborted ? "true" : "false") << "\n";
    if (outcome.aborted) out << "abort_reason: " << outcome.abort_reason << "\n";
    out << "G_total_start: " << format17(outcome.energy_start) << "\n";
    out << "G_total_end: " << format17(outcome.energy_end) << "\n";
    out << "r_nc_start: " << format17(outcome.r_nc_start) << "\n";
    out << "r_nc_end: " << format17(outcome.r_nc_end) << "\n";
    out << "c_twz_start: " << format17(outcome.chetaev_start) << "\n";
    out << "c_twz_end: " << format17(outcome.chetaev_end) << "\n";
  }
  if (outcome.clamp_events >= 0) out << "clamp_events: " << outcome.clamp_events << "\n";
  if (!outcome.certification.empty()) {
    out << "\n[certification]\n" << outcome.certification;
  }
}

}  // namespace

void export_xyz(const Trajectory& trajectory, const ChainTopology& topology,
                const std::string& path, int stride) {
  if (trajectory.size() == 0) throw std::invalid_argument("export_xyz: empty trajectory");
  if (stride < 1) throw std::invalid_argument("export_xyz: stride must be >= 1");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write xyz file: " + path);
  const std::size_t n_atoms = topology.atoms().size();
  for (std::size_t i = 0; i < trajectory.size(); i += stride) {
    const KinematicState state = kinematic_state(topology, trajectory.conformations[i]);
    out << n_atoms << "\n";
    out << "step=" << i << " G_total=" << format17(trajectory.energies[i]) << "\n";
    for (std::size_t a = 0; a < n_atoms; ++a) {
      const Eigen::Vector3d& r = state.atom_positions[a];
      out << topology.atoms()[a].element << " " << format17(r.x()) << " " << format17(r.y())
          << " " << format17(r.z()) << "\n";
    }
  }
}

void write_energy_csv(const Trajectory& trajectory, const ChainTopology& topology,
                      const ChetaevParams& params, const std::string& path, int stride) {
  if (stride < 1) throw std::invalid_argument("write_energy_csv: stride must be >= 1");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv file: " + path);
  out << "step,time,G_elec,G_vdw,G_total,r_nc,c_twz\n";
  for (std::size_t i = 0; i < trajectory.size(); i += stride) {
    const KinematicState state = kinematic_state(topology, trajectory.conformations[i]);
    const EnergyBreakdown energy = free_energy(topology, state);
    const double r_nc = state.end_to_end.norm();
    const double chetaev =
        chetaev_core(state.end_to_end - params.r_star, params.r_star, params.alpha_c);
    out << i << "," << format17(trajectory.times[i]) << "," << format17(energy.elec) << ","
        << format17(energy.vdw) << "," << format17(energy.total) << "," << format17(r_nc) << ","
        << format17(chetaev) << "\n";
  }
}

void sphere_scan_csv(const ChainTopology& topology, const ChetaevParams& params, double radius,
                     int points, const std::string& path) {
  if (radius <= 0.0) throw std::invalid_argument("sphere_scan: radius must be positive");
  if (points < 1) throw std::invalid_argument("sphere_scan: need at least one point");
  if (topology.dihedral_count() < 3)
    throw std::invalid_argument("sphere_scan: topology needs at least 3 dihedrals");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv file: " + path);
  out << "dtheta1,dtheta2,dtheta3,c_twz\n";
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < points; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / points;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    Eigen::Vector3d delta(radius * rho * std::cos(phi), radius * rho * std::sin(phi), radius * z);
    Eigen::VectorXd theta = params.theta_star;
    theta[0] += delta.x();
    theta[1] += delta.y();
    theta[2] += delta.z();
    const double value = chetaev_value(params, topology, theta);
    out << format17(delta.x()) << "," << format17(delta.y()) << "," << format17(delta.z()) << ","
        << format17(value) << "\n";
  }
}

void run_experiment(const SimConfig& config) {
  const ChainTopology topology =
      config.topology_file.empty() ? default_topology() : load_topology_file(config.topology_file);
  const Eigen::VectorXd theta_star = resolve_theta_star(config, topology);
  const ChetaevParams params = make_chetaev_params(topology, theta_star, config.alpha_c);
  const Eigen::VectorXd theta0 = resolve_theta0(config, topology, theta_star);

  fs::create_directories(config.out_dir);
  const auto out_path = [&](const std::string& name) {
    return (fs::path(config.out_dir) / name).string();
  };

  const Eigen::Vector3d direction = config.tweezer_direction.isZero()
                                        ? Eigen::Vector3d(params.r_star.normalized())
                                        : Eigen::Vector3d(config.tweezer_direction.normalized());
  const TweezerConfig tweezer =
      make_tweezer_config(topology, config.x0_nm * direction, config.kappa0,
                          config.modulation_exponent, theta_star, config.torque_over_last_plane);

  const ScalarField energy_fn = [&topology](const Eigen::VectorXd& theta) {
    return free_energy(topology, theta).total;
  };

  std::string resolved_clamp = config.clamp;
  RunOutcome outcome;
  Trajectory traj;

  switch (config.mode) {
    case RunMode::kFold: {
      traj = fold_to_convergence(topology, theta0, config.fold);
      break;
    }
    case RunMode::kUnfoldTweezer: {
      traj = simulate_ode(unfold_vector_field(tweezer, topology), energy_fn, theta0, config.dt,
                          config.steps);
      break;
    }
    case RunMode::kUnfoldCcf: {
      CcfChoice choice = CcfChoice::kConeFunction;
      MonotoneFn g = identity_fn();
      if (config.ccf == "cone") {
        choice = CcfChoice::kConeFunction;
      } else if (config.ccf == "g-identity") {
        choice = CcfChoice::kGFamily;
        g = identity_fn();
      } else if (config.ccf == "g-square") {
        choice = CcfChoice::kGFamily;
        g = square_fn();
      } else {
        throw std::invalid_argument("unknown ccf choice '" + config.ccf + "'");
      }
      double clamp_value = 0.0;
      if (config.clamp == "none") {
        clamp_value = 0.0;
        resolved_clamp = "none";
      } else if (config.clamp == "auto") {
        const double tau0 = dihedral_torques(topology, theta0).norm();
        clamp_value = 10.0 * tau0;
        resolved_clamp = clamp_value > 0.0 ? format17(clamp_value) + " (auto)" : "none (auto)";
      } else {
        clamp_value = std::stod(config.clamp);
        resolved_clamp = format17(clamp_value);
      }
      const SontagSettings settings =
          make_sontag_settings(config.p, config.q, choice, std::move(g), clamp_value);
      auto clamp_events = std::make_shared<long>(0);
      traj = simulate_ode(ccf_closed_loop_field(settings, params, topology, clamp_events),
                          energy_fn, theta0, config.dt, config.steps);
      outcome.clamp_events = *clamp_events;
      break;
    }
    case RunMode::kCertify: {
      const InstabilityReport report =
          certify_instability(params, unfold_vector_field(tweezer, topology), topology,
                              config.certify_samples, config.sample_radius, config.seed,
                              config.fd_eps);
      outcome.certification = report.to_text();
      break;
    }
    case RunMode::kSphereScan: {
      sphere_scan_csv(topology, params, config.sphere_radius, config.sphere_points,
                      out_path(config.energy_csv));
      break;
    }
  }

  int stride = config.output_stride;
  if (stride == 0) stride = static_cast<int>(1 + (traj.size() > 0 ? traj.size() - 1 : 0) / 10000);

  if (traj.size() > 0) {
    outcome.has_trajectory = true;
    outcome.entries = traj.size();
    outcome.converged = traj.converged;
    outcome.aborted = traj.aborted;
    outcome.abort_reason = traj.abort_reason;
    outcome.energy_start = traj.energies.front();
    outcome.energy_end = traj.energies.back();
    const KinematicState first = kinematic_state(topology, traj.conformations.front());
    const KinematicState last = kinematic_state(topology, traj.conformations.back());
    outcome.r_nc_start = first.end_to_end.norm();
    outcome.r_nc_end = last.end_to_end.norm();
    outcome.chetaev_start =
        chetaev_core(first.end_to_end - params.r_star, params.r_star, params.alpha_c);
    outcome.chetaev_end =
        chetaev_core(last.end_to_end - params.r_star, params.r_star, params.alpha_c);
    write_energy_csv(traj, topology, params, out_path(config.energy_csv), stride);
    export_xyz(traj, topology, out_path(config.xyz_path), stride);
  }

  write_report(config, topology, theta_star, theta0, resolved_clamp, stride, outcome,
               out_path(config.report_path));
}

}  // namespace kcm
