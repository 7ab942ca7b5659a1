#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "stqaoa/classical_solvers.hpp"
#include "stqaoa/signed_graph.hpp"

namespace stqaoa {

// Dense amplitudes over the 2^n computational basis, little-endian: qubit k
// is bit k of the basis index. Basis strings print qubit 0 leftmost.
struct StateVector {
  int n_qubits = 0;
  std::vector<std::complex<double>> amplitudes;
};

// Dense simulation beyond this size would need multi-gigabyte buffers.
inline constexpr int kMaxQubits = 24;

// Two-generator gate set. ZZ applies exp(i*coeff*theta*sz_i*sz_j) and is
// diagonal; X applies exp(i*theta*sx_i). The angle is
// theta = param_scale * params[param_slot], or theta = param_scale alone for
// fixed-angle gates (param_slot = -1).
struct Gate {
  enum class Kind { zz, x };
  Kind kind = Kind::zz;
  int i = 0;
  int j = -1;           // second qubit, ZZ only
  int coeff = 1;        // +1 or -1, ZZ only
  int param_slot = -1;  // -1 marks a fixed angle
  double param_scale = 1.0;
};

Gate zz_gate(int i, int j, int coeff, int param_slot, double param_scale);
Gate x_gate(int i, int param_slot, double param_scale);

// Gates are applied to the state left to right.
struct Circuit {
  int n_qubits = 0;
  int n_params = 0;
  std::vector<Gate> gates;
};

// Uniform superposition. Throws std::invalid_argument for n < 1 and
// std::length_error beyond kMaxQubits.
StateVector plus_state(int n);

// Applies one gate in place at the given angle.
void apply_gate(StateVector& s, const Gate& g, double theta);

// <sz_i sz_j>: +1 weight where bits i and j agree, -1 where they differ.
double zz_expectation(const StateVector& s, int i, int j);

// Per-qubit <sz_i>.
double z_expectation(const StateVector& s, int i);

// Expected satisfied-edge count: sum over edges of (1 + sign*<sz_u sz_v>)/2.
double objective_expectation(const StateVector& s, const SignedGraph& g);

// k independent draws from |amplitude|^2, each returned as one bit per qubit.
std::vector<std::vector<std::uint8_t>> sample_bitstrings(const StateVector& s, int k,
                                                         std::uint64_t seed);

// Bit string of a basis index with qubit 0 leftmost.
std::string format_basis_state(std::uint64_t index, int n_qubits);

// Circuit families ----------------------------------------------------------
//
// All four builders share the directed-tree gate block
//   ZZ(parent, child, coeff = edge sign) then X(child),
// which at angle pi/4 maps the uniform superposition to the cat state of the
// tree-induced cut.

// Fixed-angle cat-state preparation over t.edge_order; 0 parameters.
Circuit build_exact_st_circuit(const DirectedSpanningTree& t, const SignedGraph& g);

// Variational tree ansatz: per tree edge q, ZZ(parent, child, coeff +1) on
// slot q, then X(child) on slot (n-1)+q. Parameters: n-1 gammas, then n-1
// betas. The exact circuit is the point gamma_q = sign_q*pi/4, beta_q = pi/4.
Circuit build_vst_circuit(const DirectedSpanningTree& t);

// Alternating ansatz: per round q, every edge ZZ(coeff -sign, slot 2q,
// scale 1), then every vertex X(slot 2q+1, scale -1). 2p parameters.
Circuit build_qaoa_circuit(const SignedGraph& g, int p);

// Tree-structured ansatz around a classical solution: per round q with slots
// (3q, 3q+1, 3q+2) = (gamma_c, gamma_T, beta): every non-tree edge
// ZZ(coeff +sign, slot 3q), X(root, slot 3q+2), then per tree edge in order
// ZZ(parent, child, coeff +sign, slot 3q+1) and X(child, slot 3q+2).
// 3r parameters. The point (0, pi/4, pi/4) reproduces the exact circuit's
// state up to global phase.
Circuit build_st_qaoa_circuit(const SignedGraph& g, const DirectedSpanningTree& t, int r);
Circuit build_st_qaoa_circuit(const SignedGraph& g, const SolverResult& result, int r);

// Applies c to the uniform superposition.
StateVector run_circuit(const Circuit& c, const std::vector<double>& params);

// objective_expectation of the circuit output.
double evaluate(const Circuit& c, const std::vector<double>& params, const SignedGraph& g);

// Text form, one gate per line: "ZZ i j coeff slot scale" / "X i slot scale".
// Scales are printed with enough digits to round-trip exactly.
std::string circuit_to_text(const Circuit& c);
Circuit circuit_from_text(const std::string& text, int n_qubits);

// Precompiled evaluator for repeated evaluation of one (circuit, graph) pair.
// Consecutive ZZ gates sharing a parameter slot collapse into one diagonal
// pass over a per-index coefficient table, and the per-basis-state cut values
// are tabulated once. gradient() backpropagates the cost state through the
// circuit, giving all partial derivatives at the cost of about four circuit
// evaluations. Holds scratch buffers, so use one instance per thread.
class Evaluator {
 public:
  Evaluator(const Circuit& c, const SignedGraph& g);

  double value(const std::vector<double>& params);
  std::vector<double> gradient(const std::vector<double>& params);
  int n_params() const { return n_params_; }

 private:
  struct Op {
    enum class Kind { diag_table, diag_zz, x_rot };
    Kind kind = Kind::diag_zz;
    int table = -1;  // diag_table: index into tables_
    int i = 0;       // diag_zz / x_rot qubit
    int j = -1;      // diag_zz second qubit
    int coeff = 1;   // diag_zz
    int param_slot = -1;
    double param_scale = 1.0;
  };

  double angle(const Op& op, const std::vector<double>& params) const;
  void apply_op(std::vector<std::complex<double>>& amps, const Op& op, double theta) const;
  // 2 * Re(<lam| i H |phi>) for the op's generator H.
  double sandwich(const std::vector<std::complex<double>>& lam,
                  const std::vector<std::complex<double>>& phi, const Op& op) const;
  void reset_to_plus(std::vector<std::complex<double>>& amps) const;
  double objective(const std::vector<std::complex<double>>& amps) const;

  int n_qubits_ = 0;
  int n_params_ = 0;
  std::size_t dim_ = 0;
  std::vector<Op> ops_;
  std::vector<std::vector<std::int16_t>> tables_;  // per-index coefficient sums
  std::vector<int> table_absmax_;
  std::vector<std::uint16_t> cut_table_;
  std::vector<std::complex<double>> state_, lam_;
};

}  // namespace stqaoa
