#pragma once

#include <array>
#include <string>
#include <vector>

#include "tpde/circuit.hpp"
#include "tpde/compress.hpp"
#include "tpde/signal.hpp"

namespace tpde {

enum class VariantKind { slices, sweeps };

struct Variant {
  std::string label;
  BrickWallCircuit evol;
  double parameter = 0.0;  ///< slice count m_i or sweep count
};

struct VariantSet {
  VariantKind kind = VariantKind::sweeps;
  std::vector<Variant> variants;
  /// At least two variants of equal width.
  void validate() const;
};

/// Variants from the checkpoints of one compression run.
VariantSet sweep_variants(const CompressResult& run, const std::vector<Index>& sweeps);

enum class SandwichRoute { automatic, dense, mpo };

struct SandwichOptions {
  double cutoff = 1e-12;
  /// Bond budget; the chain stops when the compressed C_n needs more.
  Index max_bond = kUnboundedBond;
  SandwichRoute route = SandwichRoute::automatic;
};

struct SandwichResult {
  std::vector<cplx> values;  ///< v_1 .. v_completed
  std::vector<Index> bonds;  ///< max bond of the compressed C_n
  bool budget_exceeded = false;
  Index stop_step = 0;       ///< first step over budget (0 if none)
};

/// v_n = <prep| C_n |prep> with C_1 = L R and C_{n+1} = L C_n R, compressed as
/// an MPO after every step. L and R act on the last wires of `prep`; leading
/// wires are idle. The dense route forms each product on 2^N x 2^N matrices
/// and truncates by TT-SVD; the mpo route works on MPOs throughout.
SandwichResult sandwich_overlaps(const Mps& prep, const Mpo& left, const BrickWallCircuit& right,
                                 Index steps, const SandwichOptions& opt = {});
SandwichResult sandwich_overlaps(const Mps& prep, const BrickWallCircuit& left,
                                 const BrickWallCircuit& right, Index steps,
                                 const SandwichOptions& opt = {});

struct MLTables {
  /// m[n-1] and l[n-1] hold M(t) and L(t) at t = n dt.
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::VectorXd> l;
  /// Max bond of C_n per chain: first the pairs (i <= j) row by row, then L_i.
  std::vector<std::vector<Index>> bonds;
  Index completed_steps = 0;
};

/// M_ij = |<psi| (U^i dag)^n (U^j)^n |psi>|^2 and
/// L_i = |<psi| e^{+iH n dt} (U^i)^n |psi>|^2, with `exact_forward` the MPO of
/// e^{+iH dt}.
MLTables compute_M_L(const Mps& prep, const VariantSet& variants, const Mpo& exact_forward,
                     Index steps, const SandwichOptions& opt = {});

struct AemWeights {
  Eigen::VectorXd c;
  /// 1 + c^T M c - 2 L^T c with the unregularized M.
  double objective = 0.0;
  bool ridge = false;  ///< M was ill-conditioned and 1e-10 I was added
};

/// 1 + c^T M c - 2 L^T c, the squared Frobenius distance to the exact state.
double aem_objective(const Eigen::MatrixXd& m, const Eigen::VectorXd& l, const Eigen::VectorXd& c);

/// Minimizes aem_objective subject to sum c = 1 and sum |c| <= 3 by
/// enumerating the KKT systems of all sign patterns.
AemWeights solve_weights(const Eigen::MatrixXd& m, const Eigen::VectorXd& l);

/// m_mit(theta, t) = sum_i c_i(t) m_i(theta, t), combined into s_t.
/// measurements[i][n-1] are the four probabilities of variant i at step n.
TimeSeries mitigated_series(const std::vector<AemWeights>& weights,
                            const std::vector<std::vector<std::array<double, 4>>>& measurements,
                            double a0sq, double dt);

}  // namespace tpde
