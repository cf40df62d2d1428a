// Effective three-atom Hamiltonians: the Ising ring, the transverse drive,
// and the secular (energy-conserving) part of the drive that generates the
// transfer dynamics when the drives are much weaker than the ring coupling.

#pragma once

#include <array>
#include <vector>

#include "aqst/qcore.hpp"

namespace aqst {

// the six states with one or two excitations, in the fixed working order
// used by the restricted matrices
struct SubspaceBasis {
  std::vector<std::string> labels;
  std::vector<Eigen::Index> embedding;  // position of each label in the
                                        // full 8-dim register basis
};

SubspaceBasis single_double_excitation_basis();

// two ways to write the secular drive term for spin i with neighbours j, k:
//   projector: Gamma_i sigma^x_i (1 - sigma^z_j sigma^z_k) / 2, which flips
//              spin i only when its neighbours are anti-aligned and leaves
//              |ggg> and |eee> alone
//   literal:   Gamma_i sigma^x_i (1 - sigma^z_j sigma^z_k / 2), kept as a
//              compatibility switch; it scales the anti-aligned matrix
//              elements by 3/2 and couples out of the excitation subspace
enum class SecularForm { projector, literal };

// Ising ring: j[0] sz1 sz2 + j[1] sz2 sz3 + j[2] sz3 sz1 (diagonal)
DenseOperator build_h_zz(const std::array<double, 3>& j);

// transverse drive: sum_i gamma[i] sigma^x_i
DenseOperator build_h_x(const std::array<double, 3>& gamma);

// secular part of the drive, summed cyclically over (i, j, k)
DenseOperator build_h_secular(const std::array<double, 3>& gamma,
                              SecularForm form = SecularForm::projector);

struct HamiltonianSet {
  DenseOperator h_zz;
  DenseOperator h_x;
  DenseOperator h_eff;  // h_zz + h_x
  DenseOperator h_secular;
};

HamiltonianSet make_hamiltonians(const std::array<double, 3>& j,
                                 const std::array<double, 3>& gamma,
                                 SecularForm form = SecularForm::projector);

// projects a full-register operator onto the subspace; throws domain_error
// if the operator couples the subspace to the states outside it
Matrix restrict_to_subspace(const DenseOperator& h, const SubspaceBasis& basis);

// largest population deviation, over the time grid and all register states,
// between evolution under the full h_zz + h_x and the factorized
// zz-then-secular evolution; j0 is the common ring coupling
double secular_error(double j0, const std::array<double, 3>& gamma,
                     const StateVector& psi0, const std::vector<double>& t_grid);

}  // namespace aqst
