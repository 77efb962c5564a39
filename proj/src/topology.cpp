#include "kcm/topology.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kcm/units.hpp"

namespace kcm {

namespace {

std::vector<Eigen::Vector3d> accumulate_chain_points(
    const Eigen::Vector3d& origin, const std::vector<Eigen::Vector3d>& body) {
  std::vector<Eigen::Vector3d> points(body.size() + 1);
  points[0] = origin;
  for (std::size_t j = 0; j < body.size(); ++j) points[j + 1] = points[j] + body[j];
  return points;
}

}  // namespace

ChainTopology::ChainTopology(int n_planes, Eigen::Vector3d origin,
                             std::vector<Eigen::Vector3d> zero_unit_axes,
                             std::vector<Eigen::Vector3d> zero_body_vectors,
                             std::vector<AtomSpec> atoms)
    : n_planes_(n_planes),
      origin_(std::move(origin)),
      zero_unit_axes_(std::move(zero_unit_axes)),
      zero_body_vectors_(std::move(zero_body_vectors)),
      atoms_(std::move(atoms)) {
  if (n_planes_ < 1) throw std::invalid_argument("topology: need at least one peptide plane");
  const int dof = dihedral_count();
  if (static_cast<int>(zero_unit_axes_.size()) != dof)
    throw std::invalid_argument("topology: expected " + std::to_string(dof) + " joint axes");
  if (static_cast<int>(zero_body_vectors_.size()) != dof)
    throw std::invalid_argument("topology: expected " + std::to_string(dof) + " body vectors");
  for (const auto& u : zero_unit_axes_) {
    if (std::abs(u.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("topology: joint axis is not a unit vector");
  }
  plane_atoms_.resize(n_planes_);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const AtomSpec& a = atoms_[i];
    if (a.plane < 0 || a.plane >= n_planes_)
      throw std::invalid_argument("topology: atom " + a.name + " has plane out of range");
    if (a.link < 0 || a.link > dof)
      throw std::invalid_argument("topology: atom " + a.name + " has link out of range");
    if (a.lj_epsilon < 0.0 || a.lj_rmin < 0.0)
      throw std::invalid_argument("topology: atom " + a.name + " has negative LJ parameters");
    plane_atoms_[a.plane].push_back(static_cast<int>(i));
  }
  zero_chain_points_ = accumulate_chain_points(origin_, zero_body_vectors_);

  // Nonbonded pair table; same-plane and adjacent-plane pairs are excluded.
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
      if (std::abs(atoms_[i].plane - atoms_[j].plane) < 2) continue;
      NonbondedPair pair;
      pair.a = static_cast<int>(i);
      pair.b = static_cast<int>(j);
      pair.elec_coeff = units::kCoulomb * atoms_[i].charge * atoms_[j].charge / 4.0;
      pair.eps = std::sqrt(atoms_[i].lj_epsilon * atoms_[j].lj_epsilon);
      pair.rmin = atoms_[i].lj_rmin + atoms_[j].lj_rmin;
      pairs_.push_back(pair);
    }
  }
}

Eigen::Vector3d ChainTopology::zero_atom_position(int atom_index) const {
  const AtomSpec& a = atoms_.at(atom_index);
  return zero_chain_points_[a.link] + a.link_offset;
}

void ChainTopology::check_conformation(const Eigen::VectorXd& theta) const {
  if (theta.size() != dihedral_count())
    throw std::invalid_argument("conformation has " + std::to_string(theta.size()) +
                                " entries, expected " + std::to_string(dihedral_count()));
  if (!theta.allFinite()) throw std::invalid_argument("conformation has non-finite entries");
}

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Standard peptide geometry (Angstrom / degrees).
constexpr double kLenNCa = 1.47;
constexpr double kLenCaC = 1.53;
constexpr double kLenCN = 1.32;
constexpr double kLenCO = 1.24;
constexpr double kLenNH = 1.00;
constexpr double kAngNCaC = 110.5;
constexpr double kAngCaCN = 116.5;
constexpr double kAngCNCa = 121.5;

struct NonbondedParams {
  double q, eps, rmin;
};

// Amide/backbone nonbonded parameters for the built-in chain: standard
// partial-charge sign structure and contact radii, with charges and well
// depths deliberately softened (5e-4 / 1e-6 of full-strength values) so the
// built-in chain responds visibly to piconewton-scale trap forces and folds
// to tight torque tolerances in seconds. Full-strength parameter sets can be
// supplied through a topology file.
constexpr double kQ = 5e-4;
constexpr double kE = 1e-6;
constexpr NonbondedParams kParamN{-0.47 * kQ, 0.20 * kE, 1.85};
constexpr NonbondedParams kParamH{+0.31 * kQ, 0.046 * kE, 0.2245};
constexpr NonbondedParams kParamCa{+0.16 * kQ, 0.032 * kE, 2.275};
constexpr NonbondedParams kParamC{+0.51 * kQ, 0.11 * kE, 2.00};
constexpr NonbondedParams kParamO{-0.51 * kQ, 0.12 * kE, 1.70};
constexpr NonbondedParams kParamNTerm{-0.16 * kQ, 0.20 * kE, 1.85};
constexpr NonbondedParams kParamCTerm{0.0, 0.11 * kE, 2.00};

Eigen::Vector3d planar_dir(double angle) { return {std::cos(angle), std::sin(angle), 0.0}; }

struct BackbonePositions {
  std::vector<Eigen::Vector3d> n, ca, c, o, h;  // o[i] for i<N-1, h[i] for i>=1
};

// Extended planar zig-zag walk along +x with alternating turn signs.
BackbonePositions extended_backbone(int n_residues) {
  BackbonePositions bp;
  bp.n.resize(n_residues);
  bp.ca.resize(n_residues);
  bp.c.resize(n_residues);
  bp.o.resize(n_residues);
  bp.h.resize(n_residues);

  double dir = 20.0 * kDeg;
  double sign = -1.0;
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  bp.n[0] = pos;
  for (int i = 0; i < n_residues; ++i) {
    pos += kLenNCa * planar_dir(dir);
    bp.ca[i] = pos;
    dir += sign * (180.0 - kAngNCaC) * kDeg;
    sign = -sign;
    pos += kLenCaC * planar_dir(dir);
    bp.c[i] = pos;
    dir += sign * (180.0 - kAngCaCN) * kDeg;
    sign = -sign;
    if (i + 1 < n_residues) {
      pos += kLenCN * planar_dir(dir);
      bp.n[i + 1] = pos;
      dir += sign * (180.0 - kAngCNCa) * kDeg;
      sign = -sign;
    }
  }
  for (int i = 0; i + 1 < n_residues; ++i) {
    const Eigen::Vector3d bisector =
        ((bp.ca[i] - bp.c[i]).normalized() + (bp.n[i + 1] - bp.c[i]).normalized()).normalized();
    bp.o[i] = bp.c[i] - kLenCO * bisector;
    const Eigen::Vector3d nb =
        ((bp.c[i] - bp.n[i + 1]).normalized() + (bp.ca[i + 1] - bp.n[i + 1]).normalized()).normalized();
    bp.h[i + 1] = bp.n[i + 1] - kLenNH * nb;
  }
  return bp;
}

}  // namespace

ChainTopology default_topology() {
  const int planes = 10;
  const int n_res = planes + 1;
  const BackbonePositions bp = extended_backbone(n_res);

  std::vector<Eigen::Vector3d> axes(2 * n_res);
  std::vector<Eigen::Vector3d> body(2 * n_res);
  for (int i = 0; i < n_res; ++i) {
    axes[2 * i] = (bp.ca[i] - bp.n[i]).normalized();
    axes[2 * i + 1] = (bp.c[i] - bp.ca[i]).normalized();
    body[2 * i] = bp.ca[i] - bp.n[i];
    body[2 * i + 1] = (i + 1 < n_res ? bp.n[i + 1] : bp.c[i]) - bp.ca[i];
  }

  const auto chain_points = accumulate_chain_points(Eigen::Vector3d::Zero(), body);

  std::vector<AtomSpec> atoms;
  auto add = [&](const std::string& name, const std::string& element, int plane, int link,
                 const Eigen::Vector3d& zero_pos, const NonbondedParams& p) {
    AtomSpec a;
    a.name = name;
    a.element = element;
    a.plane = plane;
    a.link = link;
    a.link_offset = zero_pos - chain_points[link];
    a.charge = p.q;
    a.lj_epsilon = p.eps;
    a.lj_rmin = p.rmin;
    atoms.push_back(std::move(a));
  };

  for (int i = 0; i < n_res; ++i) {
    const int res = i + 1;  // 1-based labels
    const int plane_of_residue = std::min(i, planes - 1);
    if (i == 0) {
      add("N1", "N", 0, 0, bp.n[0], kParamNTerm);
    } else {
      // N_i and H_i belong to the peptide unit before residue i.
      add("N" + std::to_string(res), "N", i - 1, 2 * i, bp.n[i], kParamN);
      add("H" + std::to_string(res), "H", i - 1, 2 * i, bp.h[i], kParamH);
    }
    add("CA" + std::to_string(res), "C", plane_of_residue, 2 * i + 1, bp.ca[i], kParamCa);
    if (i + 1 < n_res) {
      add("C" + std::to_string(res), "C", i, 2 * (i + 1), bp.c[i], kParamC);
      add("O" + std::to_string(res), "O", i, 2 * (i + 1), bp.o[i], kParamO);
    } else {
      add("C" + std::to_string(res), "C", planes - 1, 2 * n_res, bp.c[i], kParamCTerm);
    }
  }

  return ChainTopology(planes, Eigen::Vector3d::Zero(), std::move(axes), std::move(body),
                       std::move(atoms));
}

Eigen::VectorXd default_folded_reference() {
  Eigen::VectorXd theta(22);
  theta << 1.34, 1.37, 1.26, 1.29, 1.42, 1.73, 1.65, 1.65, 1.46, 1.62, 1.49, 2.01, 1.31, 0.99,
      1.98, 1.9, 1.59, 1.56, 1.57, 0.93, 1.22, 1.29;
  return theta;
}

Eigen::VectorXd default_initial_conformation() {
  Eigen::VectorXd deg(22);
  deg << 28.3, 28.6, 26.1, 28.7, 27.7, 26.0, 26.6, 27.5, 28.8, 28.8, 26.2, 28.8, 28.8, 27.2, 28.3,
      26.2, 27.1, 28.7, 28.3, 28.8, 27.8, 25.8;
  return deg * kDeg;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

// Text schema, one record per line:
//   version 1
//   planes <P>
//   origin <x> <y> <z>
//   axis <j> <ux> <uy> <uz>      (j = 1..2N, unit vector at theta = 0)
//   body <j> <bx> <by> <bz>      (j = 1..2N, Angstrom)
//   atom <name> <element> <plane> <link> <q> <eps> <rmin> <ox> <oy> <oz>
// Atom offsets are relative to the plane's reference backbone atom (the
// C-alpha at chain point 2*plane-1, planes 1-based in the file).
ChainTopology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file: " + path);

  int planes = -1;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> axes, body;
  struct RawAtom {
    std::string name, element;
    int plane, link;
    double q, eps, rmin;
    Eigen::Vector3d offset;
  };
  std::vector<RawAtom> raw_atoms;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + why);
    };
    if (tag == "version") {
      int v;
      if (!(ss >> v) || v != 1) fail("unsupported topology version");
    } else if (tag == "planes") {
      if (!(ss >> planes)) fail("bad plane count");
    } else if (tag == "origin") {
      if (!(ss >> origin.x() >> origin.y() >> origin.z())) fail("bad origin");
    } else if (tag == "axis" || tag == "body") {
      int j;
      Eigen::Vector3d v;
      if (!(ss >> j >> v.x() >> v.y() >> v.z())) fail("bad " + tag + " record");
      auto& dst = (tag == "axis") ? axes : body;
      if (j != static_cast<int>(dst.size()) + 1) fail(tag + " records out of order");
      dst.push_back(v);
    } else if (tag == "atom") {
      RawAtom a;
      if (!(ss >> a.name >> a.element >> a.plane >> a.link >> a.q >> a.eps >> a.rmin >>
            a.offset.x() >> a.offset.y() >> a.offset.z()))
        fail("bad atom record");
      raw_atoms.push_back(std::move(a));
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (planes < 1) throw std::runtime_error(path + ": missing plane count");

  const auto chain_points = accumulate_chain_points(origin, body);
  std::vector<AtomSpec> atoms;
  for (const auto& r : raw_atoms) {
    if (r.plane < 1 || r.plane > planes)
      throw std::runtime_error(path + ": atom " + r.name + " has plane out of range");
    AtomSpec a;
    a.name = r.name;
    a.element = r.element;
    a.plane = r.plane - 1;
    a.link = r.link;
    if (a.link < 0 || a.link > static_cast<int>(body.size()))
      throw std::runtime_error(path + ": atom " + r.name + " has link out of range");
    const Eigen::Vector3d plane_ref = chain_points.at(2 * r.plane - 1);
    a.link_offset = (plane_ref + r.offset) - chain_points.at(a.link);
    a.charge = r.q;
    a.lj_epsilon = r.eps;
    a.lj_rmin = r.rmin;
    atoms.push_back(std::move(a));
  }
  return ChainTopology(planes, origin, std::move(axes), std::move(body), std::move(atoms));
}

void write_topology_file(const ChainTopology& topology, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write topology file: " + path);
  out << "# kcm chain topology\n";
  out << "version 1\n";
  out << "planes " << topology.n_planes() << "\n";
  const auto& o = topology.origin();
  out << "origin " << format_double(o.x()) << " " << format_double(o.y()) << " "
      << format_double(o.z()) << "\n";
  const auto& axes = topology.zero_unit_axes();
  for (std::size_t j = 0; j < axes.size(); ++j)
    out << "axis " << j + 1 << " " << format_double(axes[j].x()) << " "
        << format_double(axes[j].y()) << " " << format_double(axes[j].z()) << "\n";
  const auto& body = topology.zero_body_vectors();
  for (std::size_t j = 0; j < body.size(); ++j)
    out << "body " << j + 1 << " " << format_double(body[j].x()) << " "
        << format_double(body[j].y()) << " " << format_double(body[j].z()) << "\n";
  for (std::size_t i = 0; i < topology.atoms().size(); ++i) {
    const AtomSpec& a = topology.atoms()[i];
    const Eigen::Vector3d pos = topology.zero_atom_position(static_cast<int>(i));
    const Eigen::Vector3d offset = pos - topology.zero_chain_point(2 * (a.plane + 1) - 1);
    out << "atom " << a.name << " " << a.element << " " << a.plane + 1 << " " << a.link << " "
        << format_double(a.charge) << " " << format_double(a.lj_epsilon) << " "
        << format_double(a.lj_rmin) << " " << format_double(offset.x()) << " "
        << format_double(offset.y()) << " " << format_double(offset.z()) << "\n";
  }
}

}  // namespace kcm
