#include "tpde/hubbard.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <lapacke.h>

#include "tpde/errors.hpp"

namespace tpde {

std::pair<Index, Index> PauliTerm::support() const {
  if (ops.empty()) return {0, 0};
  return {ops.begin()->first, ops.rbegin()->first};
}

Hamiltonian build_hubbard(const HubbardSpec& spec) {
  if (spec.n_sites < 1) throw ValidationError("Hubbard chain needs at least one site");
  Hamiltonian h;
  h.qubits = spec.qubits();
  const double t = spec.hopping;
  const double u = spec.onsite;
  for (Index q = 0; q + 1 < spec.n_sites; ++q) {
    for (Index s = 0; s < 2; ++s) {
      const Index a = 2 * q + s;
      h.terms.push_back({-t / 2, {{a, 'X'}, {a + 1, 'Z'}, {a + 2, 'X'}}});
      h.terms.push_back({-t / 2, {{a, 'Y'}, {a + 1, 'Z'}, {a + 2, 'Y'}}});
    }
  }
  for (Index q = 0; q < spec.n_sites; ++q) {
    h.terms.push_back({u / 4, {{2 * q, 'Z'}, {2 * q + 1, 'Z'}}});
  }
  h.terms.push_back({-u / 4 * static_cast<double>(spec.n_sites), {}});
  return h;
}

namespace {

struct PauliMasks {
  std::uint64_t flip = 0;   // X or Y
  std::uint64_t phase = 0;  // Y or Z: contributes (-1)^bit
  int y_count = 0;
};

PauliMasks masks(const PauliTerm& term, Index n) {
  PauliMasks m;
  for (const auto& [q, op] : term.ops) {
    if (q >= n) throw ShapeError("Pauli term acts outside the register");
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    switch (op) {
      case 'X':
        m.flip |= bit;
        break;
      case 'Y':
        m.flip |= bit;
        m.phase |= bit;
        ++m.y_count;
        break;
      case 'Z':
        m.phase |= bit;
        break;
      default:
        throw ValidationError(std::string("unknown Pauli operator '") + op + "'");
    }
  }
  return m;
}

// i^k
cplx ipow(int k) {
  static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((k % 4) + 4) % 4];
}

// out += c * P v
void accumulate_pauli(const PauliTerm& term, double c, const CVector& v, CVector& out,
                      Index n) {
  const PauliMasks m = masks(term, n);
  const cplx base = c * ipow(m.y_count);
  const auto dim = static_cast<std::uint64_t>(v.size());
  for (std::uint64_t x = 0; x < dim; ++x) {
    // Y|b> = i (-1)^b |1-b>, Z|b> = (-1)^b |b>
    const bool odd = std::popcount(x & m.phase) & 1;
    out(static_cast<Eigen::Index>(x ^ m.flip)) += (odd ? -base : base) * v(static_cast<Eigen::Index>(x));
  }
}

}  // namespace

CVector apply_pauli(const PauliTerm& term, const CVector& v) {
  CVector out = CVector::Zero(v.size());
  const Index n = static_cast<Index>(std::countr_zero(static_cast<std::uint64_t>(v.size())));
  accumulate_pauli(term, 1.0, v, out, n);
  return out;
}

CVector apply_hamiltonian(const Hamiltonian& h, const CVector& v) {
  if (v.size() != (Eigen::Index{1} << h.qubits)) throw ShapeError("vector length mismatch");
  CVector out = CVector::Zero(v.size());
  for (const auto& term : h.terms) accumulate_pauli(term, term.coefficient, v, out, h.qubits);
  return out;
}

CMatrix dense_hamiltonian(const Hamiltonian& h) {
  const Eigen::Index dim = Eigen::Index{1} << h.qubits;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (const auto& term : h.terms) {
    const PauliMasks pm = masks(term, h.qubits);
    const cplx base = term.coefficient * ipow(pm.y_count);
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
      const bool odd = std::popcount(x & pm.phase) & 1;
      m(static_cast<Eigen::Index>(x ^ pm.flip), static_cast<Eigen::Index>(x)) +=
          odd ? -base : base;
    }
  }
  return m;
}

void apply_pauli_exp_left(CMatrix& m, const PauliTerm& term, double angle) {
  const Index n = static_cast<Index>(std::countr_zero(static_cast<std::uint64_t>(m.rows())));
  const PauliMasks pm = masks(term, n);
  const double phi = angle * term.coefficient;
  const cplx c = std::cos(phi);
  const cplx is = cplx(0.0, std::sin(phi)) * ipow(pm.y_count);
  const auto dim = static_cast<std::uint64_t>(m.rows());
  if (pm.flip == 0) {
    // Diagonal: each row picks up exp(+-i phi) times the Y phase (none here).
    for (std::uint64_t x = 0; x < dim; ++x) {
      const bool odd = std::popcount(x & pm.phase) & 1;
      m.row(static_cast<Eigen::Index>(x)) *= c + (odd ? -is : is);
    }
    return;
  }
  // Rows x and x^flip mix; visit each pair once.
  for (std::uint64_t x = 0; x < dim; ++x) {
    const std::uint64_t y = x ^ pm.flip;
    if (y < x) continue;
    const cplx px = (std::popcount(x & pm.phase) & 1) ? -is : is;  // <y|P|x> times i sin
    const cplx py = (std::popcount(y & pm.phase) & 1) ? -is : is;  // <x|P|y> times i sin
    const auto ex = static_cast<Eigen::Index>(x), ey = static_cast<Eigen::Index>(y);
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      const cplx a = m(ex, col), b = m(ey, col);
      m(ex, col) = c * a + py * b;
      m(ey, col) = c * b + px * a;
    }
  }
}

CMatrix pauli_block(const PauliTerm& term) {
  const auto [lo, hi] = term.support();
  PauliTerm local;
  local.coefficient = 1.0;
  for (const auto& [q, op] : term.ops) local.ops[q - lo] = op;
  Hamiltonian h{hi - lo + 1, {local}};
  return dense_hamiltonian(h);
}

Tensor pauli_expm_two_site(const PauliTerm& term, double angle) {
  const CMatrix p = pauli_block(term);
  const double phi = angle * term.coefficient;
  const CMatrix u = std::cos(phi) * CMatrix::Identity(p.rows(), p.cols()) +
                    cplx(0.0, std::sin(phi)) * p;
  return Tensor::from_matrix(u);
}

namespace {

EigenSolution dense_eigs(const Hamiltonian& h, Index k) {
  CMatrix m = dense_hamiltonian(h);
  const auto n = static_cast<lapack_int>(m.rows());
  std::vector<double> w(static_cast<Index>(n));
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n,
                                         reinterpret_cast<lapack_complex_double*>(m.data()),
                                         n, w.data());
  if (info != 0) throw DegenerateError("Hermitian eigensolver failed");
  k = std::min<Index>(k, static_cast<Index>(n));
  EigenSolution out;
  out.energies.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
  out.states = m.leftCols(static_cast<Eigen::Index>(k));
  return out;
}

// Orthonormalize the columns of w against q (twice) and then among themselves.
// Returns the surviving columns.
CMatrix orthonormalize_block(const CMatrix& q, CMatrix w) {
  for (int pass = 0; pass < 2; ++pass) {
    if (q.cols() > 0) w -= q * (q.adjoint() * w);
  }
  CMatrix out(w.rows(), 0);
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    CVector v = w.col(c);
    const double before = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      if (q.cols() > 0) v -= q * (q.adjoint() * v);
      if (out.cols() > 0) v -= out * (out.adjoint() * v);
    }
    const double after = v.norm();
    if (after <= 1e-10 * std::max(before, 1e-300) || after < 1e-14) continue;
    out.conservativeResize(Eigen::NoChange, out.cols() + 1);
    out.col(out.cols() - 1) = v / after;
  }
  return out;
}

// Block Lanczos with full reorthogonalization and restarts from the lowest
// Ritz vectors. The block size exceeds k so degenerate levels are resolved.
EigenSolution lanczos_eigs(const Hamiltonian& h, Index k) {
  const Eigen::Index dim = Eigen::Index{1} << h.qubits;
  const auto block = static_cast<Eigen::Index>(std::min<Index>(k + 4, static_cast<Index>(dim)));
  const Eigen::Index max_basis = std::min<Eigen::Index>(dim, std::max<Eigen::Index>(160, 12 * block));

  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> normal;
  CMatrix start(dim, block);
  for (Eigen::Index i = 0; i < start.size(); ++i) start.data()[i] = cplx(normal(rng), normal(rng));

  EigenSolution out;
  for (int restart = 0; restart < 200; ++restart) {
    CMatrix q = orthonormalize_block(CMatrix(dim, 0), start);
    CMatrix hq(dim, 0);
    Eigen::Index done = 0;
    while (q.cols() < max_basis) {
      const Eigen::Index fresh = q.cols() - done;
      if (fresh == 0) break;
      CMatrix hw(dim, fresh);
      for (Eigen::Index c = 0; c < fresh; ++c) hw.col(c) = apply_hamiltonian(h, q.col(done + c));
      hq.conservativeResize(Eigen::NoChange, q.cols());
      hq.rightCols(fresh) = hw;
      done = q.cols();
      CMatrix next = orthonormalize_block(q, hw);
      const Eigen::Index room = max_basis - q.cols();
      if (next.cols() > room) next.conservativeResize(Eigen::NoChange, room);
      if (next.cols() == 0) break;
      q.conservativeResize(Eigen::NoChange, q.cols() + next.cols());
      q.rightCols(next.cols()) = next;
    }
    if (hq.cols() < q.cols()) {
      const Eigen::Index fresh = q.cols() - hq.cols();
      CMatrix hw(dim, fresh);
      for (Eigen::Index c = 0; c < fresh; ++c) hw.col(c) = apply_hamiltonian(h, q.col(hq.cols() + c));
      hq.conservativeResize(Eigen::NoChange, q.cols());
      hq.rightCols(fresh) = hw;
    }
    CMatrix t = q.adjoint() * hq;
    t = (t + t.adjoint()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(t);
    const Eigen::Index want = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), t.rows());
    const CMatrix ritz = q * eig.eigenvectors().leftCols(block);
    const CMatrix hritz = hq * eig.eigenvectors().leftCols(block);
    double worst = 0.0;
    for (Eigen::Index c = 0; c < want; ++c) {
      worst = std::max(worst, (hritz.col(c) - eig.eigenvalues()(c) * ritz.col(c)).norm());
    }
    if (worst <= 1e-11 || q.cols() == dim) {
      out.energies.resize(static_cast<Index>(want));
      for (Eigen::Index c = 0; c < want; ++c) out.energies[static_cast<Index>(c)] = eig.eigenvalues()(c);
      out.states = ritz.leftCols(want);
      return out;
    }
    start = ritz;
  }
  throw DegenerateError("block Lanczos did not converge");
}

}  // namespace

EigenSolution exact_eigs(const Hamiltonian& h, Index k, EigenMethod method) {
  if (h.qubits > 14) throw ResourceError("exact diagonalization is limited to 14 qubits");
  if (k == 0) throw ValidationError("exact_eigs needs k >= 1");
  if (method == EigenMethod::automatic) {
    method = h.qubits <= 10 ? EigenMethod::dense : EigenMethod::lanczos;
  }
  EigenSolution out = method == EigenMethod::dense ? dense_eigs(h, k) : lanczos_eigs(h, k);
  out.gap = 0.0;
  for (double e : out.energies) {
    if (e - out.energies.front() > 1e-9) {
      out.gap = e - out.energies.front();
      break;
    }
  }
  return out;
}

std::vector<int> particle_number_diagonal(Index qubits) {
  std::vector<int> out(Index{1} << qubits);
  for (Index x = 0; x < out.size(); ++x) out[x] = std::popcount(x);
  return out;
}

std::vector<int> spin_z2_diagonal(Index qubits) {
  std::vector<int> out(Index{1} << qubits);
  for (Index x = 0; x < out.size(); ++x) {
    int s = 0;
    for (Index q = 0; q < qubits; ++q) {
      if ((x >> (qubits - 1 - q)) & 1) s += (q % 2 == 0) ? 1 : -1;
    }
    out[x] = s;
  }
  return out;
}

namespace {

void fix_phase(CVector& v) {
  Eigen::Index best = 0;
  v.cwiseAbs().maxCoeff(&best);
  const cplx a = v(best);
  v *= std::conj(a) / std::abs(a);
}

}  // namespace

TargetPair select_targets(const Hamiltonian& h, double degeneracy_tol) {
  // Enough levels to see a degenerate first excited multiplet in full.
  const Index k = std::min<Index>(Index{1} << h.qubits, 12);
  const EigenSolution sol = exact_eigs(h, k);
  if (sol.energies.size() < 2) throw DegenerateError("spectrum has a single level");
  TargetPair out;
  out.e0 = sol.energies[0];
  out.ground = sol.states.col(0);
  Index first = 1;
  while (first < sol.energies.size() && sol.energies[first] - out.e0 <= degeneracy_tol) ++first;
  if (first == sol.energies.size()) throw DegenerateError("no excited level among computed states");
  out.e1 = sol.energies[first];
  Index last = first;
  while (last + 1 < sol.energies.size() && sol.energies[last + 1] - out.e1 <= degeneracy_tol) ++last;
  out.excited_multiplicity = last - first + 1;
  out.gap = out.e1 - out.e0;

  const CMatrix space = sol.states.middleCols(static_cast<Eigen::Index>(first),
                                              static_cast<Eigen::Index>(out.excited_multiplicity));
  if (out.excited_multiplicity == 1) {
    out.excited = space.col(0);
  } else {
    const auto number = particle_number_diagonal(h.qubits);
    const auto spin = spin_z2_diagonal(h.qubits);
    double n_mean = 0.0, s_mean = 0.0;
    for (Index x = 0; x < number.size(); ++x) {
      const double w = std::norm(out.ground(static_cast<Eigen::Index>(x)));
      n_mean += w * number[x];
      s_mean += w * spin[x];
    }
    const int n_sector = static_cast<int>(std::lround(n_mean));
    const int s_sector = static_cast<int>(std::lround(s_mean));
    CMatrix masked = space;
    for (Index x = 0; x < number.size(); ++x) {
      if (number[x] != n_sector || spin[x] != s_sector) masked.row(static_cast<Eigen::Index>(x)).setZero();
    }
    Eigen::JacobiSVD<CMatrix> svd(masked, Eigen::ComputeThinV);
    const CVector w = svd.matrixV().col(0);
    out.excited = space * w;
    out.excited.normalize();
  }
  fix_phase(out.ground);
  fix_phase(out.excited);
  return out;
}

}  // namespace tpde
