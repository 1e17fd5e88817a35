#include "tpde/circuit.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "tpde/errors.hpp"

namespace tpde {

Index gates_in_layer(Index width, Index offset) {
  return width > offset + 1 ? (width - offset) / 2 : 0;
}

Index BrickWallCircuit::gate_count() const {
  Index n = 0;
  for (const auto& l : layers) n += l.gates.size();
  return n;
}

void BrickWallCircuit::validate(double tol) const {
  for (Index l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.offset > 1) throw ValidationError("layer offset must be 0 or 1");
    if (l > 0 && layer.offset == layers[l - 1].offset) {
      throw ValidationError("layer offsets must alternate");
    }
    if (layer.gates.size() != gates_in_layer(width, layer.offset)) {
      throw ValidationError("layer has the wrong number of gates");
    }
    for (const auto& g : layer.gates) {
      if ((g.adjoint() * g - Gate::Identity()).norm() > tol) {
        throw ValidationError("circuit gate is not unitary");
      }
    }
  }
}

BrickWallCircuit identity_circuit(Index width, Index depth, Index first_offset) {
  BrickWallCircuit c;
  c.width = width;
  for (Index l = 0; l < depth; ++l) {
    Layer layer;
    layer.offset = (first_offset + l) % 2;
    layer.gates.assign(gates_in_layer(width, layer.offset), Gate::Identity());
    c.layers.push_back(std::move(layer));
  }
  return c;
}

BrickWallCircuit adjoint(const BrickWallCircuit& c) {
  BrickWallCircuit out;
  out.width = c.width;
  for (Index l = c.depth(); l-- > 0;) {
    Layer layer;
    layer.offset = c.layers[l].offset;
    for (const auto& g : c.layers[l].gates) layer.gates.push_back(g.adjoint());
    out.layers.push_back(std::move(layer));
  }
  return out;
}

BrickWallCircuit concatenate(const BrickWallCircuit& first, const BrickWallCircuit& second) {
  if (first.width != second.width) throw ShapeError("concatenate: circuit widths differ");
  BrickWallCircuit out = first;
  out.layers.insert(out.layers.end(), second.layers.begin(), second.layers.end());
  return out;
}

void apply_circuit(const BrickWallCircuit& c, CVector& psi, Index wire_offset) {
  for (Index l = 0; l < c.depth(); ++l) {
    for (Index j = 0; j < c.layers[l].gates.size(); ++j) {
      dense::apply_gate(psi, c.layers[l].gates[j], wire_offset + c.pair_start(l, j));
    }
  }
}

CMatrix to_dense(const BrickWallCircuit& c) {
  const Eigen::Index dim = Eigen::Index{1} << c.width;
  CMatrix u = CMatrix::Identity(dim, dim);
  for (Index l = 0; l < c.depth(); ++l) {
    for (Index j = 0; j < c.layers[l].gates.size(); ++j) {
      dense::apply_gate_left(u, c.layers[l].gates[j], c.pair_start(l, j));
    }
  }
  return u;
}

Mps circuit_to_mps(const BrickWallCircuit& c, const Mps& input, Index max_bond, double cutoff) {
  if (c.width != input.length()) throw ShapeError("circuit width does not match the state");
  Mps s = input;
  for (Index l = 0; l < c.depth(); ++l) {
    for (Index j = 0; j < c.layers[l].gates.size(); ++j) {
      apply_two_site(s, c.layers[l].gates[j], c.pair_start(l, j), max_bond, cutoff);
    }
  }
  return s;
}

Mpo circuit_to_mpo(const BrickWallCircuit& c, Index max_bond, double cutoff) {
  Mpo o = identity_mpo(c.width);
  o.center = 0;
  for (Index l = 0; l < c.depth(); ++l) {
    for (Index j = 0; j < c.layers[l].gates.size(); ++j) {
      apply_gate_left(o, c.layers[l].gates[j], c.pair_start(l, j), max_bond, cutoff);
    }
  }
  return o;
}

void write_circuit(std::ostream& os, const BrickWallCircuit& c) {
  os << "brickwall " << c.width << ' ' << c.depth() << '\n';
  os << std::setprecision(17);
  for (const auto& layer : c.layers) {
    os << "layer " << layer.offset << ' ' << layer.gates.size() << '\n';
    for (const auto& g : layer.gates) {
      for (int r = 0; r < 4; ++r) {
        for (int k = 0; k < 4; ++k) {
          if (r + k > 0) os << ' ';
          os << g(r, k).real() << ' ' << g(r, k).imag();
        }
      }
      os << '\n';
    }
  }
}

BrickWallCircuit read_circuit(std::istream& is) {
  std::string tag;
  BrickWallCircuit c;
  Index depth = 0;
  if (!(is >> tag >> c.width >> depth) || tag != "brickwall") {
    throw ValidationError("circuit file: missing 'brickwall' header");
  }
  for (Index l = 0; l < depth; ++l) {
    Layer layer;
    Index count = 0;
    if (!(is >> tag >> layer.offset >> count) || tag != "layer") {
      throw ValidationError("circuit file: malformed layer header");
    }
    for (Index j = 0; j < count; ++j) {
      Gate g;
      for (int r = 0; r < 4; ++r) {
        for (int k = 0; k < 4; ++k) {
          double re = 0, im = 0;
          if (!(is >> re >> im)) throw ValidationError("circuit file: truncated gate");
          g(r, k) = cplx(re, im);
        }
      }
      layer.gates.push_back(g);
    }
    c.layers.push_back(std::move(layer));
  }
  c.validate(1e-8);
  return c;
}

void write_gate_list_jsonl(std::ostream& os, const BrickWallCircuit& c) {
  for (Index l = 0; l < c.depth(); ++l) {
    for (Index j = 0; j < c.layers[l].gates.size(); ++j) {
      const Gate& g = c.layers[l].gates[j];
      nlohmann::json rows = nlohmann::json::array();
      for (int r = 0; r < 4; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < 4; ++k) row.push_back({g(r, k).real(), g(r, k).imag()});
        rows.push_back(row);
      }
      const Index p = c.pair_start(l, j);
      nlohmann::json line = {{"layer", l}, {"qubits", {p, p + 1}}, {"unitary", rows}};
      os << line.dump() << '\n';
    }
  }
}

BrickWallCircuit read_gate_list_jsonl(std::istream& is, Index width) {
  BrickWallCircuit c;
  c.width = width;
  std::string text;
  while (std::getline(is, text)) {
    if (text.empty()) continue;
    const auto line = nlohmann::json::parse(text);
    const Index l = line.at("layer").get<Index>();
    const Index p = line.at("qubits").at(0).get<Index>();
    if (line.at("qubits").at(1).get<Index>() != p + 1) {
      throw ValidationError("gate list: qubits must be nearest neighbours");
    }
    if (l + 1 < c.layers.size()) throw ValidationError("gate list: layers out of order");
    // Layers without gates (width 2, odd offset) leave no lines; rebuild them.
    while (c.layers.size() <= l) {
      const Index gap = l - c.layers.size();
      c.layers.push_back(Layer{(p + gap) % 2, {}});
    }
    Layer& layer = c.layers[l];
    if (p != layer.offset + 2 * layer.gates.size()) {
      throw ValidationError("gate list: gates out of brick-wall order");
    }
    Gate g;
    const auto& u = line.at("unitary");
    for (int r = 0; r < 4; ++r)
      for (int k = 0; k < 4; ++k)
        g(r, k) = cplx(u.at(r).at(k).at(0).get<double>(), u.at(r).at(k).at(1).get<double>());
    layer.gates.push_back(g);
  }
  c.validate(1e-8);
  return c;
}

}  // namespace tpde
