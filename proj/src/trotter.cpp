#include "tpde/trotter.hpp"

#include <cmath>

#include "tpde/errors.hpp"

namespace tpde {

namespace {

void check(const TrotterSpec& spec) {
  if (spec.slices < 1) throw ValidationError("Trotter slices must be >= 1");
  if (!std::isfinite(spec.dt)) throw ValidationError("Trotter dt must be finite");
}

// Factors of one reverse slice in the order they act on a state
// (rightmost operator first), with the two middle factors merged.
std::vector<std::pair<const PauliTerm*, double>> slice_factors(const Hamiltonian& h, double half) {
  std::vector<std::pair<const PauliTerm*, double>> out;
  const Index k = h.terms.size();
  for (Index b = 0; b < k; ++b) out.emplace_back(&h.terms[b], b + 1 == k ? 2 * half : half);
  for (Index b = k - 1; b-- > 0;) out.emplace_back(&h.terms[b], half);
  return out;
}

CMatrix matrix_power(CMatrix base, Index e) {
  CMatrix result = CMatrix::Identity(base.rows(), base.cols());
  bool first = true;
  while (e > 0) {
    if (e & 1) {
      result = first ? base : CMatrix(result * base);
      first = false;
    }
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

}  // namespace

CMatrix trotter_dense(const Hamiltonian& h, double dt, Index slices, TimeSign sign) {
  if (slices < 1) throw ValidationError("Trotter slices must be >= 1");
  if (h.qubits > 12) throw ResourceError("dense Trotter assembly is limited to 12 qubits");
  const Eigen::Index dim = Eigen::Index{1} << h.qubits;
  CMatrix s = CMatrix::Identity(dim, dim);
  if (h.terms.empty()) return s;
  const double half = dt / (2.0 * static_cast<double>(slices));
  for (const auto& [term, angle] : slice_factors(h, half)) apply_pauli_exp_left(s, *term, angle);
  CMatrix u = matrix_power(std::move(s), slices);
  if (sign == TimeSign::forward) u.adjointInPlace();
  return u;
}

Mpo build_trotter_mpo(const Hamiltonian& h, const TrotterSpec& spec) {
  check(spec);
  TrotterBackend backend = spec.backend;
  if (backend == TrotterBackend::automatic) {
    backend = h.qubits <= 10 ? TrotterBackend::dense : TrotterBackend::mpo;
  }
  if (backend == TrotterBackend::dense) {
    return mpo_from_dense(trotter_dense(h, spec.dt, spec.slices, spec.sign), spec.max_bond,
                          spec.cutoff);
  }
  const double half = spec.dt / (2.0 * static_cast<double>(spec.slices));
  const auto factors = slice_factors(h, half);
  std::vector<Mpo> small;
  for (const auto& [term, angle] : factors) small.push_back(pauli_exponential_mpo(*term, angle, h.qubits));
  Mpo u = identity_mpo(h.qubits);
  for (Index r = 0; r < spec.slices; ++r) {
    for (const auto& f : small) u = mpo_product(f, u, spec.max_bond, spec.cutoff);
  }
  return spec.sign == TimeSign::forward ? adjoint(u) : u;
}

Mpo build_exact_reference_mpo(const Hamiltonian& h, double dt, TimeSign sign, double cutoff,
                              Index max_bond) {
  TrotterSpec spec;
  spec.dt = dt;
  spec.slices = kReferenceSlices;
  spec.sign = sign;
  spec.cutoff = cutoff;
  spec.max_bond = max_bond;
  return build_trotter_mpo(h, spec);
}

}  // namespace tpde
