#include "stqaoa/quantum_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "stqaoa/rng.hpp"

namespace stqaoa {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

void check_qubit(int q, int n) {
  if (q < 0 || q >= n) throw std::invalid_argument("qubit index out of range");
}

void check_gate(const Gate& g, int n_qubits, int n_params) {
  check_qubit(g.i, n_qubits);
  if (g.kind == Gate::Kind::zz) {
    check_qubit(g.j, n_qubits);
    if (g.i == g.j) throw std::invalid_argument("ZZ gate needs two distinct qubits");
    if (g.coeff != 1 && g.coeff != -1) throw std::invalid_argument("ZZ coeff must be +1 or -1");
  }
  if (g.param_slot < -1 || g.param_slot >= n_params)
    throw std::invalid_argument("gate param_slot out of range");
}

double gate_angle(const Gate& g, const std::vector<double>& params) {
  return g.param_slot < 0 ? g.param_scale : g.param_scale * params[g.param_slot];
}

void apply_zz(std::vector<std::complex<double>>& amps, int i, int j, int coeff, double theta) {
  // Branchless: the phase real part is shared, only the imaginary sign flips
  // with the bit parity, so index a two-entry table and multiply inline.
  const double c = std::cos(coeff * theta);
  const double s[2] = {std::sin(coeff * theta), -std::sin(coeff * theta)};
  const std::size_t n = amps.size();
  for (std::size_t a = 0; a < n; ++a) {
    const double si = s[((a >> i) ^ (a >> j)) & 1u];
    const std::complex<double> v = amps[a];
    amps[a] = {v.real() * c - v.imag() * si, v.real() * si + v.imag() * c};
  }
}

void apply_x(std::vector<std::complex<double>>& amps, int q, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const std::size_t mask = std::size_t{1} << q;
  const std::size_t n = amps.size();
  for (std::size_t base = 0; base < n; base += mask << 1) {
    for (std::size_t off = 0; off < mask; ++off) {
      const std::size_t i0 = base + off;
      const std::size_t i1 = i0 | mask;
      const std::complex<double> a0 = amps[i0];
      const std::complex<double> a1 = amps[i1];
      amps[i0] = {c * a0.real() - s * a1.imag(), c * a0.imag() + s * a1.real()};
      amps[i1] = {c * a1.real() - s * a0.imag(), c * a1.imag() + s * a0.real()};
    }
  }
}

}  // namespace

Gate zz_gate(int i, int j, int coeff, int param_slot, double param_scale) {
  Gate g;
  g.kind = Gate::Kind::zz;
  g.i = i;
  g.j = j;
  g.coeff = coeff;
  g.param_slot = param_slot;
  g.param_scale = param_scale;
  return g;
}

Gate x_gate(int i, int param_slot, double param_scale) {
  Gate g;
  g.kind = Gate::Kind::x;
  g.i = i;
  g.param_slot = param_slot;
  g.param_scale = param_scale;
  return g;
}

StateVector plus_state(int n) {
  if (n < 1) throw std::invalid_argument("plus_state needs at least one qubit");
  if (n > kMaxQubits) throw std::length_error("plus_state beyond the qubit guard");
  StateVector s;
  s.n_qubits = n;
  s.amplitudes.assign(std::size_t{1} << n, std::pow(2.0, -0.5 * n));
  return s;
}

void apply_gate(StateVector& s, const Gate& g, double theta) {
  check_gate(g, s.n_qubits, g.param_slot + 1);
  if (g.kind == Gate::Kind::zz)
    apply_zz(s.amplitudes, g.i, g.j, g.coeff, theta);
  else
    apply_x(s.amplitudes, g.i, theta);
}

double zz_expectation(const StateVector& s, int i, int j) {
  check_qubit(i, s.n_qubits);
  check_qubit(j, s.n_qubits);
  if (i == j) throw std::invalid_argument("zz_expectation needs two distinct qubits");
  double acc = 0.0;
  const std::size_t n = s.amplitudes.size();
  for (std::size_t a = 0; a < n; ++a) {
    const double p = std::norm(s.amplitudes[a]);
    acc += (((a >> i) ^ (a >> j)) & 1u) ? -p : p;
  }
  return acc;
}

double z_expectation(const StateVector& s, int i) {
  check_qubit(i, s.n_qubits);
  double acc = 0.0;
  const std::size_t n = s.amplitudes.size();
  for (std::size_t a = 0; a < n; ++a) {
    const double p = std::norm(s.amplitudes[a]);
    acc += ((a >> i) & 1u) ? -p : p;
  }
  return acc;
}

double objective_expectation(const StateVector& s, const SignedGraph& g) {
  if (s.n_qubits != g.n_vertices)
    throw std::invalid_argument("state and graph sizes differ");
  double acc = 0.0;
  for (const auto& e : g.edges) acc += 0.5 * (1.0 + e.sign * zz_expectation(s, e.u, e.v));
  return acc;
}

std::vector<std::vector<std::uint8_t>> sample_bitstrings(const StateVector& s, int k,
                                                         std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("need at least one sample");
  const std::size_t dim = s.amplitudes.size();
  std::vector<double> cumulative(dim);
  double acc = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    acc += std::norm(s.amplitudes[a]);
    cumulative[a] = acc;
  }
  cumulative.back() = 1.0;

  rng::Rng r(seed);
  std::vector<std::vector<std::uint8_t>> samples;
  samples.reserve(static_cast<std::size_t>(k));
  for (int draw = 0; draw < k; ++draw) {
    const double u = r.uniform() * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t a = static_cast<std::size_t>(it - cumulative.begin());
    std::vector<std::uint8_t> bits(s.n_qubits);
    for (int q = 0; q < s.n_qubits; ++q) bits[q] = static_cast<std::uint8_t>((a >> q) & 1u);
    samples.push_back(std::move(bits));
  }
  return samples;
}

std::string format_basis_state(std::uint64_t index, int n_qubits) {
  std::string bits(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q)
    if ((index >> q) & 1u) bits[static_cast<std::size_t>(q)] = '1';
  return bits;
}

Circuit build_exact_st_circuit(const DirectedSpanningTree& t, const SignedGraph& g) {
  validate_tree(g, t);
  Circuit c;
  c.n_qubits = g.n_vertices;
  c.n_params = 0;
  for (const auto& e : t.edge_order) {
    c.gates.push_back(zz_gate(e.parent, e.child, e.sign, -1, kQuarterPi));
    c.gates.push_back(x_gate(e.child, -1, kQuarterPi));
  }
  return c;
}

Circuit build_vst_circuit(const DirectedSpanningTree& t) {
  const int n = static_cast<int>(t.parent.size());
  if (static_cast<int>(t.edge_order.size()) != n - 1)
    throw std::invalid_argument("tree must have exactly n-1 edges");
  Circuit c;
  c.n_qubits = n;
  c.n_params = 2 * (n - 1);
  for (int q = 0; q < n - 1; ++q) {
    const auto& e = t.edge_order[static_cast<std::size_t>(q)];
    c.gates.push_back(zz_gate(e.parent, e.child, 1, q, 1.0));
    c.gates.push_back(x_gate(e.child, (n - 1) + q, 1.0));
  }
  return c;
}

Circuit build_qaoa_circuit(const SignedGraph& g, int p) {
  validate_graph(g);
  if (p < 1) throw std::invalid_argument("need at least one round");
  Circuit c;
  c.n_qubits = g.n_vertices;
  c.n_params = 2 * p;
  for (int q = 0; q < p; ++q) {
    for (const auto& e : g.edges) c.gates.push_back(zz_gate(e.u, e.v, -e.sign, 2 * q, 1.0));
    for (int v = 0; v < g.n_vertices; ++v) c.gates.push_back(x_gate(v, 2 * q + 1, -1.0));
  }
  return c;
}

Circuit build_st_qaoa_circuit(const SignedGraph& g, const DirectedSpanningTree& t, int r) {
  validate_tree(g, t);
  if (r < 1) throw std::invalid_argument("need at least one round");

  std::vector<SignedEdge> complement;
  for (const auto& e : g.edges) {
    const int lo = std::min(e.u, e.v);
    const int hi = std::max(e.u, e.v);
    const bool in_tree = t.parent[hi] == lo || t.parent[lo] == hi;
    if (!in_tree) complement.push_back({lo, hi, e.sign});
  }
  std::sort(complement.begin(), complement.end(),
            [](const SignedEdge& a, const SignedEdge& b) {
              return std::pair(a.u, a.v) < std::pair(b.u, b.v);
            });

  Circuit c;
  c.n_qubits = g.n_vertices;
  c.n_params = 3 * r;
  for (int q = 0; q < r; ++q) {
    const int gamma_c = 3 * q;
    const int gamma_t = 3 * q + 1;
    const int beta = 3 * q + 2;
    for (const auto& e : complement) c.gates.push_back(zz_gate(e.u, e.v, e.sign, gamma_c, 1.0));
    c.gates.push_back(x_gate(t.root, beta, 1.0));
    for (const auto& e : t.edge_order) {
      c.gates.push_back(zz_gate(e.parent, e.child, e.sign, gamma_t, 1.0));
      c.gates.push_back(x_gate(e.child, beta, 1.0));
    }
  }
  return c;
}

Circuit build_st_qaoa_circuit(const SignedGraph& g, const SolverResult& result, int r) {
  return build_st_qaoa_circuit(g, result.tree, r);
}

StateVector run_circuit(const Circuit& c, const std::vector<double>& params) {
  if (static_cast<int>(params.size()) != c.n_params)
    throw std::invalid_argument("parameter count mismatch");
  StateVector s = plus_state(c.n_qubits);
  for (const auto& g : c.gates) {
    check_gate(g, c.n_qubits, c.n_params);
    const double theta = gate_angle(g, params);
    if (g.kind == Gate::Kind::zz)
      apply_zz(s.amplitudes, g.i, g.j, g.coeff, theta);
    else
      apply_x(s.amplitudes, g.i, theta);
  }
  return s;
}

double evaluate(const Circuit& c, const std::vector<double>& params, const SignedGraph& g) {
  const StateVector s = run_circuit(c, params);
  return objective_expectation(s, g);
}

std::string circuit_to_text(const Circuit& c) {
  std::ostringstream out;
  char buf[40];
  for (const auto& g : c.gates) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, g.param_scale,
                                         std::chars_format::general, 17);
    const std::string scale(buf, end);
    if (g.kind == Gate::Kind::zz)
      out << "ZZ " << g.i << ' ' << g.j << ' ' << g.coeff << ' ' << g.param_slot << ' '
          << scale << '\n';
    else
      out << "X " << g.i << ' ' << g.param_slot << ' ' << scale << '\n';
  }
  return out.str();
}

Circuit circuit_from_text(const std::string& text, int n_qubits) {
  Circuit c;
  c.n_qubits = n_qubits;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    Gate g;
    if (kind == "ZZ") {
      g.kind = Gate::Kind::zz;
      if (!(fields >> g.i >> g.j >> g.coeff >> g.param_slot >> g.param_scale))
        throw std::runtime_error("circuit text: bad ZZ line: " + line);
    } else if (kind == "X") {
      g.kind = Gate::Kind::x;
      if (!(fields >> g.i >> g.param_slot >> g.param_scale))
        throw std::runtime_error("circuit text: bad X line: " + line);
    } else {
      throw std::runtime_error("circuit text: unknown gate kind: " + line);
    }
    c.n_params = std::max(c.n_params, g.param_slot + 1);
    c.gates.push_back(g);
  }
  for (const auto& g : c.gates) check_gate(g, n_qubits, c.n_params);
  return c;
}

// Evaluator ------------------------------------------------------------------

Evaluator::Evaluator(const Circuit& c, const SignedGraph& g) {
  if (c.n_qubits != g.n_vertices) throw std::invalid_argument("circuit and graph sizes differ");
  if (c.n_qubits < 1) throw std::invalid_argument("empty circuit");
  if (c.n_qubits > kMaxQubits) throw std::length_error("circuit beyond the qubit guard");
  n_qubits_ = c.n_qubits;
  n_params_ = c.n_params;
  dim_ = std::size_t{1} << n_qubits_;

  cut_table_.assign(dim_, 0);
  for (const auto& e : g.edges) {
    const std::size_t mu = std::size_t{1} << e.u;
    const std::size_t mv = std::size_t{1} << e.v;
    const bool count_equal = e.sign == 1;
    for (std::size_t a = 0; a < dim_; ++a) {
      const bool same = ((a & mu) != 0) == ((a & mv) != 0);
      if (same == count_equal) ++cut_table_[a];
    }
  }

  // Group maximal runs of ZZ gates that share a slot and scale into one
  // diagonal pass; runs of length one stay cheap inline parity ops.
  std::size_t idx = 0;
  std::vector<std::vector<Gate>> table_signatures;
  while (idx < c.gates.size()) {
    const Gate& g0 = c.gates[idx];
    check_gate(g0, c.n_qubits, c.n_params);
    if (g0.kind == Gate::Kind::x) {
      Op op;
      op.kind = Op::Kind::x_rot;
      op.i = g0.i;
      op.param_slot = g0.param_slot;
      op.param_scale = g0.param_scale;
      ops_.push_back(op);
      ++idx;
      continue;
    }
    std::size_t run_end = idx + 1;
    while (run_end < c.gates.size()) {
      const Gate& gn = c.gates[run_end];
      if (gn.kind != Gate::Kind::zz || gn.param_slot != g0.param_slot ||
          gn.param_scale != g0.param_scale)
        break;
      check_gate(gn, c.n_qubits, c.n_params);
      ++run_end;
    }
    if (run_end - idx == 1) {
      Op op;
      op.kind = Op::Kind::diag_zz;
      op.i = g0.i;
      op.j = g0.j;
      op.coeff = g0.coeff;
      op.param_slot = g0.param_slot;
      op.param_scale = g0.param_scale;
      ops_.push_back(op);
      ++idx;
      continue;
    }

    std::vector<Gate> signature(c.gates.begin() + static_cast<long>(idx),
                                c.gates.begin() + static_cast<long>(run_end));
    int table = -1;
    for (std::size_t ti = 0; ti < table_signatures.size(); ++ti) {
      const auto& sig = table_signatures[ti];
      if (sig.size() != signature.size()) continue;
      bool same = true;
      for (std::size_t k = 0; k < sig.size(); ++k) {
        if (sig[k].i != signature[k].i || sig[k].j != signature[k].j ||
            sig[k].coeff != signature[k].coeff) {
          same = false;
          break;
        }
      }
      if (same) {
        table = static_cast<int>(ti);
        break;
      }
    }
    if (table < 0) {
      std::vector<std::int16_t> sums(dim_, 0);
      for (const auto& gate : signature) {
        for (std::size_t a = 0; a < dim_; ++a) {
          const int parity = static_cast<int>(((a >> gate.i) ^ (a >> gate.j)) & 1u);
          sums[a] = static_cast<std::int16_t>(sums[a] + (parity ? -gate.coeff : gate.coeff));
        }
      }
      int absmax = 0;
      for (const auto v : sums) absmax = std::max(absmax, std::abs(static_cast<int>(v)));
      table = static_cast<int>(tables_.size());
      tables_.push_back(std::move(sums));
      table_absmax_.push_back(absmax);
      table_signatures.push_back(std::move(signature));
    }
    Op op;
    op.kind = Op::Kind::diag_table;
    op.table = table;
    op.param_slot = g0.param_slot;
    op.param_scale = g0.param_scale;
    ops_.push_back(op);
    idx = run_end;
  }
}

double Evaluator::angle(const Op& op, const std::vector<double>& params) const {
  return op.param_slot < 0 ? op.param_scale : op.param_scale * params[op.param_slot];
}

void Evaluator::apply_op(std::vector<std::complex<double>>& amps, const Op& op,
                         double theta) const {
  switch (op.kind) {
    case Op::Kind::diag_zz:
      apply_zz(amps, op.i, op.j, op.coeff, theta);
      return;
    case Op::Kind::x_rot:
      apply_x(amps, op.i, theta);
      return;
    case Op::Kind::diag_table: {
      const auto& sums = tables_[static_cast<std::size_t>(op.table)];
      const int k = table_absmax_[static_cast<std::size_t>(op.table)];
      std::vector<double> lut_re(static_cast<std::size_t>(2 * k + 1));
      std::vector<double> lut_im(static_cast<std::size_t>(2 * k + 1));
      for (int v = -k; v <= k; ++v) {
        lut_re[static_cast<std::size_t>(v + k)] = std::cos(theta * v);
        lut_im[static_cast<std::size_t>(v + k)] = std::sin(theta * v);
      }
      const double* re = lut_re.data() + k;
      const double* im = lut_im.data() + k;
      for (std::size_t a = 0; a < dim_; ++a) {
        const double c = re[sums[a]];
        const double si = im[sums[a]];
        const std::complex<double> v = amps[a];
        amps[a] = {v.real() * c - v.imag() * si, v.real() * si + v.imag() * c};
      }
      return;
    }
  }
}

double Evaluator::sandwich(const std::vector<std::complex<double>>& lam,
                           const std::vector<std::complex<double>>& phi, const Op& op) const {
  double acc = 0.0;
  switch (op.kind) {
    case Op::Kind::diag_zz: {
      // acc accumulates sum_a (+-1)_a Im(conj(lam_a) phi_a), signed by parity.
      const double sgn[2] = {1.0, -1.0};
      for (std::size_t a = 0; a < dim_; ++a) {
        const double im = lam[a].real() * phi[a].imag() - lam[a].imag() * phi[a].real();
        acc += sgn[((a >> op.i) ^ (a >> op.j)) & 1u] * im;
      }
      return -2.0 * op.coeff * acc;
    }
    case Op::Kind::diag_table: {
      const auto& sums = tables_[static_cast<std::size_t>(op.table)];
      for (std::size_t a = 0; a < dim_; ++a)
        acc += sums[a] * (lam[a].real() * phi[a].imag() - lam[a].imag() * phi[a].real());
      return -2.0 * acc;
    }
    case Op::Kind::x_rot: {
      const std::size_t mask = std::size_t{1} << op.i;
      for (std::size_t a = 0; a < dim_; ++a) {
        const std::complex<double> p = phi[a ^ mask];
        acc += lam[a].real() * p.imag() - lam[a].imag() * p.real();
      }
      return -2.0 * acc;
    }
  }
  return 0.0;
}

void Evaluator::reset_to_plus(std::vector<std::complex<double>>& amps) const {
  amps.assign(dim_, std::pow(2.0, -0.5 * n_qubits_));
}

double Evaluator::objective(const std::vector<std::complex<double>>& amps) const {
  double acc = 0.0;
  for (std::size_t a = 0; a < dim_; ++a) acc += cut_table_[a] * std::norm(amps[a]);
  return acc;
}

double Evaluator::value(const std::vector<double>& params) {
  if (static_cast<int>(params.size()) != n_params_)
    throw std::invalid_argument("parameter count mismatch");
  reset_to_plus(state_);
  for (const auto& op : ops_) apply_op(state_, op, angle(op, params));
  return objective(state_);
}

std::vector<double> Evaluator::gradient(const std::vector<double>& params) {
  if (static_cast<int>(params.size()) != n_params_)
    throw std::invalid_argument("parameter count mismatch");
  reset_to_plus(state_);
  for (const auto& op : ops_) apply_op(state_, op, angle(op, params));

  lam_.resize(dim_);
  for (std::size_t a = 0; a < dim_; ++a) lam_[a] = static_cast<double>(cut_table_[a]) * state_[a];

  std::vector<double> grads(static_cast<std::size_t>(n_params_), 0.0);
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    const Op& op = *it;
    const double theta = angle(op, params);
    if (op.param_slot >= 0)
      grads[static_cast<std::size_t>(op.param_slot)] += op.param_scale * sandwich(lam_, state_, op);
    apply_op(state_, op, -theta);
    apply_op(lam_, op, -theta);
  }
  return grads;
}

}  // namespace stqaoa
