#pragma once

#include <map>
#include <vector>

#include "tpde/tensor.hpp"

namespace tpde {

/// C * (product of single-qubit Paulis). An empty operator map is the identity.
struct PauliTerm {
  double coefficient = 0.0;
  std::map<Index, char> ops;  ///< qubit -> 'X', 'Y' or 'Z'

  /// Lowest and highest qubit touched; {0, 0} for the identity term.
  std::pair<Index, Index> support() const;
};

struct Hamiltonian {
  Index qubits = 0;
  std::vector<PauliTerm> terms;
};

/// 1D open-chain Hubbard model. Spin orbitals are interleaved as
/// 0-up, 0-down, 1-up, 1-down, ... so qubit 2q+s holds site q, spin s.
struct HubbardSpec {
  Index n_sites = 4;
  double hopping = 1.0;
  double onsite = 10.0;

  Index qubits() const { return 2 * n_sites; }
};

/// Jordan-Wigner form of
///   -T sum_{q,s} (c+_{q,s} c_{q+1,s} + h.c.) + U sum_q n_{q,up} n_{q,dn}
///   - (U/2) sum_q (n_{q,up} + n_{q,dn}).
/// Same-spin neighbours sit two qubits apart, so each hop carries one Z on the
/// opposite-spin orbital in between:
///   -T/2 (X Z X + Y Z Y) on (2q+s, 2q+s+1, 2q+s+2).
/// The interaction and chemical potential collapse to (U/4) Z Z - U/4 per site.
/// Term order: hops by site then spin (XZX before YZY), on-site terms, identity.
Hamiltonian build_hubbard(const HubbardSpec& spec);

/// P|v> for the bare Pauli string (coefficient not applied).
CVector apply_pauli(const PauliTerm& term, const CVector& v);
CVector apply_hamiltonian(const Hamiltonian& h, const CVector& v);
CMatrix dense_hamiltonian(const Hamiltonian& h);
/// Pauli string on its contiguous support [lo, hi] as a 2^(hi-lo+1) matrix.
CMatrix pauli_block(const PauliTerm& term);

/// m <- exp(i * angle * C * P) m for a 2^n x 2^n column-major matrix.
void apply_pauli_exp_left(CMatrix& m, const PauliTerm& term, double angle);

/// exp(i * angle * C * P) on the contiguous support of the term. Exact because
/// P^2 = I: cos(angle C) I + i sin(angle C) P.
Tensor pauli_expm_two_site(const PauliTerm& term, double angle);

/// Lowest eigenpairs, repeated according to multiplicity.
struct EigenSolution {
  std::vector<double> energies;
  CMatrix states;  ///< one eigenvector per column
  /// Distance from E_0 to the next distinct level.
  double gap = 0.0;
};

enum class EigenMethod { automatic, dense, lanczos };

/// Dense diagonalization up to 10 qubits, block Lanczos up to 14.
/// Throws ResourceError above that.
EigenSolution exact_eigs(const Hamiltonian& h, Index k,
                         EigenMethod method = EigenMethod::automatic);

/// Diagonals of total particle number and 2*S_z in the computational basis
/// (interleaved spin ordering).
std::vector<int> particle_number_diagonal(Index qubits);
std::vector<int> spin_z2_diagonal(Index qubits);

/// Ground state and first excited state used as preparation targets.
struct TargetPair {
  double e0 = 0.0;
  double e1 = 0.0;
  double gap = 0.0;
  Index excited_multiplicity = 1;
  CVector ground;
  CVector excited;
};

/// If E_1 is degenerate the excited vector is the member of the eigenspace
/// with the largest weight in the ground state's (N, S_z) sector. Both vectors
/// are phase-fixed so their largest-magnitude amplitude is real and positive.
TargetPair select_targets(const Hamiltonian& h, double degeneracy_tol = 1e-8);

}  // namespace tpde
