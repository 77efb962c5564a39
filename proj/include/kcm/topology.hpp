#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace kcm {

/// One atom of the rigid-plane chain model.
///
/// `link` is the 1-based index of the innermost joint whose rotation carries
/// the atom (0 for atoms attached to the fixed chain base). `link_offset` is
/// the atom position relative to the chain point at the tip of body vector
/// `link`, expressed in the zero-conformation frame; the atom moves rigidly
/// with that link.
struct AtomSpec {
  std::string name;
  std::string element;
  int plane = 0;  // peptide plane the atom belongs to (0-based)
  int link = 0;   // 0..2N
  Eigen::Vector3d link_offset = Eigen::Vector3d::Zero();  // Angstrom
  double charge = 0.0;      // elementary charge
  double lj_epsilon = 0.0;  // kcal/mol, pair depth = sqrt(eps_i*eps_j)
  double lj_rmin = 0.0;     // Angstrom, pair minimum distance = rmin_i+rmin_j
};

/// Precombined nonbonded pair (atoms on the same or adjacent planes are
/// excluded; those separations are rigid or quasi-rigid in this model).
struct NonbondedPair {
  int a = 0;
  int b = 0;
  double elec_coeff = 0.0;  // kCoulomb*q_a*q_b/4; potential = elec_coeff/r^2
  double eps = 0.0;         // kcal/mol
  double rmin = 0.0;        // Angstrom
};

/// Immutable description of an N-1 peptide-plane chain with 2N dihedral
/// degrees of freedom: zero-conformation joint axes and body vectors plus the
/// atom list with nonbonded parameters.
class ChainTopology {
 public:
  ChainTopology(int n_planes, Eigen::Vector3d origin,
                std::vector<Eigen::Vector3d> zero_unit_axes,
                std::vector<Eigen::Vector3d> zero_body_vectors,
                std::vector<AtomSpec> atoms);

  int n_planes() const { return n_planes_; }
  int dihedral_count() const { return 2 * (n_planes_ + 1); }
  const Eigen::Vector3d& origin() const { return origin_; }
  const std::vector<Eigen::Vector3d>& zero_unit_axes() const { return zero_unit_axes_; }
  const std::vector<Eigen::Vector3d>& zero_body_vectors() const { return zero_body_vectors_; }
  const std::vector<AtomSpec>& atoms() const { return atoms_; }
  const std::vector<NonbondedPair>& nonbonded_pairs() const { return pairs_; }

  /// Chain point j = origin + sum of the first j zero-conformation body
  /// vectors, j = 0..2N. Point j-1 lies on the axis of joint j.
  const Eigen::Vector3d& zero_chain_point(int j) const { return zero_chain_points_.at(j); }

  /// Absolute atom position at the zero conformation.
  Eigen::Vector3d zero_atom_position(int atom_index) const;

  /// Atom indices belonging to a peptide plane.
  const std::vector<int>& plane_atoms(int plane) const { return plane_atoms_.at(plane); }

  /// Throws std::invalid_argument unless theta has 2N finite entries.
  void check_conformation(const Eigen::VectorXd& theta) const;

 private:
  int n_planes_;
  Eigen::Vector3d origin_;
  std::vector<Eigen::Vector3d> zero_unit_axes_;
  std::vector<Eigen::Vector3d> zero_body_vectors_;
  std::vector<AtomSpec> atoms_;
  std::vector<Eigen::Vector3d> zero_chain_points_;
  std::vector<std::vector<int>> plane_atoms_;
  std::vector<NonbondedPair> pairs_;
};

/// Built-in 10-plane chain (11 residues, 22 dihedrals, 53 atoms) laid out as
/// an extended strand along +x with standard peptide bond geometry.
ChainTopology default_topology();

/// Reference folded conformation for the default 10-plane chain (radians).
Eigen::VectorXd default_folded_reference();

/// Extended starting conformation for folding runs on the default chain.
Eigen::VectorXd default_initial_conformation();

ChainTopology load_topology_file(const std::string& path);
void write_topology_file(const ChainTopology& topology, const std::string& path);

}  // namespace kcm
