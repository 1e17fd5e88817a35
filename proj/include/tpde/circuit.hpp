#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tpde/dense.hpp"
#include "tpde/mpo.hpp"
#include "tpde/mps.hpp"

namespace tpde {

using Gate = dense::Gate;

/// One brick-wall layer: gates on pairs (offset + 2j, offset + 2j + 1).
struct Layer {
  Index offset = 0;
  std::vector<Gate> gates;
};

/// Layered nearest-neighbour circuit. Layer 0 acts first; consecutive layers
/// alternate their offsets.
struct BrickWallCircuit {
  Index width = 0;
  std::vector<Layer> layers;

  Index depth() const { return layers.size(); }
  Index gate_count() const;
  /// First qubit of gate j in layer l.
  Index pair_start(Index l, Index j) const { return layers[l].offset + 2 * j; }
  /// Throws ValidationError on non-unitary gates, wrong gate counts or offsets
  /// that do not alternate.
  void validate(double tol = 1e-10) const;
};

/// Number of gates in a layer with the given offset.
Index gates_in_layer(Index width, Index offset);

/// All-identity circuit whose layer l has offset (first_offset + l) mod 2.
BrickWallCircuit identity_circuit(Index width, Index depth, Index first_offset = 0);

BrickWallCircuit adjoint(const BrickWallCircuit& c);
/// `first` acts first, then `second`.
BrickWallCircuit concatenate(const BrickWallCircuit& first, const BrickWallCircuit& second);

/// Applies the circuit to qubits [wire_offset, wire_offset + width) of psi.
void apply_circuit(const BrickWallCircuit& c, CVector& psi, Index wire_offset = 0);
CMatrix to_dense(const BrickWallCircuit& c);

Mps circuit_to_mps(const BrickWallCircuit& c, const Mps& input, Index max_bond, double cutoff);
Mpo circuit_to_mpo(const BrickWallCircuit& c, Index max_bond, double cutoff);

/// Line-oriented text form: a header line "brickwall <width> <depth>", then per
/// layer "layer <offset> <gate count>" followed by one line per gate holding
/// the 16 entries row-major as "re im" pairs.
void write_circuit(std::ostream& os, const BrickWallCircuit& c);
BrickWallCircuit read_circuit(std::istream& is);

/// One JSON object per gate in execution order:
/// {"layer": l, "qubits": [p, p+1], "unitary": [[[re, im], ...], ...]}.
void write_gate_list_jsonl(std::ostream& os, const BrickWallCircuit& c);
BrickWallCircuit read_gate_list_jsonl(std::istream& is, Index width);

}  // namespace tpde
