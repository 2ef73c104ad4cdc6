#include "tsgg/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace tsgg::ad {

namespace {

constexpr double kDegreeFloor = 1e-8;

Tape& tape_of(Var a) {
  if (!a.valid()) throw ContractError("operation on an unbound Var");
  return *a.tape();
}

Tape& tape_of(Var a, Var b) {
  Tape& t = tape_of(a);
  if (b.tape() != &t) throw ContractError("operands live on different tapes");
  return t;
}

bool is_row_broadcast(const Matrix& a, const Matrix& b) {
  return b.rows() == 1 && b.cols() == a.cols() && a.rows() > 1;
}

void check_binary(const char* what, const Matrix& a, const Matrix& b) {
  if (a.same_shape(b) || is_row_broadcast(a, b)) return;
  throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " +
                   b.shape_str());
}

Tape::Node unary(Op op, Var a, Matrix value) {
  Tape::Node n;
  n.op = op;
  n.in0 = a.id();
  n.requires_grad = a.requires_grad();
  n.value = std::move(value);
  return n;
}

Tape::Node binary(Op op, Var a, Var b, Matrix value) {
  Tape::Node n;
  n.op = op;
  n.in0 = a.id();
  n.in1 = b.id();
  n.requires_grad = a.requires_grad() || b.requires_grad();
  n.value = std::move(value);
  return n;
}

// Sums an RxC adjoint over rows when the operand was a broadcast row.
Matrix reduce_to(const Matrix& g, const Matrix& operand) {
  if (g.same_shape(operand)) return g;
  Matrix out(1, g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) out[j] += g(i, j);
  return out;
}

template <typename F>
Matrix map(const Matrix& a, F f) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

template <typename F>
Matrix zip(const Matrix& a, const Matrix& b, F f) {
  Matrix out(a.rows(), a.cols());
  if (a.same_shape(b)) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  } else {
    const std::size_t c = a.cols();
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < c; ++j) out(i, j) = f(a(i, j), b[j]);
  }
  return out;
}

}  // namespace

// --- Var / Tape -----------------------------------------------------------

const Matrix& Var::value() const {
  if (!tape_) throw ContractError("value() on an unbound Var");
  return tape_->node(id_).value;
}

double Var::scalar() const {
  const Matrix& v = value();
  if (v.size() != 1) throw ContractError("scalar() on a " + v.shape_str() + " tensor");
  return v[0];
}

bool Var::requires_grad() const { return tape_ && tape_->node(id_).requires_grad; }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::param(Parameter& p) {
  if (auto it = bound_.find(&p); it != bound_.end()) return Var(this, it->second);
  Node n;
  n.value = p.value;
  n.requires_grad = !p.frozen;
  n.param = p.frozen ? nullptr : &p;
  Var v = push(std::move(n));
  bound_.emplace(&p, v.id());
  return v;
}

void Tape::clear() {
  nodes_.clear();
  bound_.clear();
}

Matrix Tape::adjoint(Var v) const {
  const Node& n = nodes_.at(v.id());
  if (!n.touched) return Matrix(n.value.rows(), n.value.cols());
  return n.adj;
}

Matrix& Tape::adj_ref(std::uint32_t id) {
  Node& n = nodes_[id];
  if (!n.touched) {
    n.adj = Matrix(n.value.rows(), n.value.cols());
    n.touched = true;
  }
  return n.adj;
}

void Tape::accumulate(std::uint32_t id, const Matrix& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (!n.touched) {
    n.adj = g;
    n.touched = true;
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) n.adj[i] += g[i];
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw ContractError("backward: loss is not on this tape");
  if (loss.value().size() != 1) {
    throw ContractError("backward: loss must be 1x1, got " + loss.value().shape_str());
  }
  for (Node& n : nodes_) {
    n.touched = false;
    n.adj = Matrix();
  }
  for (auto& [p, id] : bound_) {
    if (nodes_[id].param) p->zero_grad();
  }
  if (!nodes_[loss.id()].requires_grad) return;
  accumulate(loss.id(), Matrix(1, 1, 1.0));
  for (std::int64_t id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.touched || !n.requires_grad) continue;
    if (n.op == Op::Leaf) {
      if (n.param) n.param->grad = n.adj;
      continue;
    }
    propagate(static_cast<std::uint32_t>(id));
  }
}

void Tape::propagate(std::uint32_t id) {
  const Node& n = nodes_[id];
  const Matrix& g = n.adj;
  const Node& A = nodes_[n.in0];
  switch (n.op) {
    case Op::Leaf:
      break;
    case Op::MatMul: {
      const Node& B = nodes_[n.in1];
      if (A.requires_grad) accumulate(n.in0, tsgg::matmul_bt(g, B.value));
      if (B.requires_grad) accumulate(n.in1, tsgg::matmul_at(A.value, g));
      break;
    }
    case Op::MatMulBT: {
      const Node& B = nodes_[n.in1];
      if (A.requires_grad) accumulate(n.in0, tsgg::matmul(g, B.value));
      if (B.requires_grad) accumulate(n.in1, tsgg::matmul_at(g, A.value));
      break;
    }
    case Op::Add:
    case Op::Sub: {
      const Node& B = nodes_[n.in1];
      if (A.requires_grad) accumulate(n.in0, g);
      if (B.requires_grad) {
        Matrix gb = reduce_to(g, B.value);
        if (n.op == Op::Sub)
          for (double& v : gb.data()) v = -v;
        accumulate(n.in1, gb);
      }
      break;
    }
    case Op::Hadamard: {
      const Node& B = nodes_[n.in1];
      if (A.requires_grad) accumulate(n.in0, zip(g, B.value, [](double x, double y) { return x * y; }));
      if (B.requires_grad) {
        Matrix ga(g.rows(), g.cols());
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] = g[i] * A.value[i];
        accumulate(n.in1, reduce_to(ga, B.value));
      }
      break;
    }
    case Op::Affine:
      accumulate(n.in0, map(g, [s = n.attr](double x) { return s * x; }));
      break;
    case Op::Sigmoid: {
      Matrix ga(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = n.value[i];
        ga[i] = g[i] * y * (1.0 - y);
      }
      accumulate(n.in0, ga);
      break;
    }
    case Op::Tanh: {
      Matrix ga(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = n.value[i];
        ga[i] = g[i] * (1.0 - y * y);
      }
      accumulate(n.in0, ga);
      break;
    }
    case Op::Relu:
    case Op::LeakyRelu: {
      const double neg = n.op == Op::Relu ? 0.0 : n.attr;
      Matrix ga(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] = A.value[i] > 0.0 ? g[i] : neg * g[i];
      accumulate(n.in0, ga);
      break;
    }
    case Op::SumAll:
      accumulate(n.in0, Matrix(A.value.rows(), A.value.cols(), g[0]));
      break;
    case Op::SumRows: {
      Matrix ga(A.value.rows(), A.value.cols());
      for (std::size_t i = 0; i < ga.rows(); ++i)
        for (std::size_t j = 0; j < ga.cols(); ++j) ga(i, j) = g[i];
      accumulate(n.in0, ga);
      break;
    }
    case Op::SumCols: {
      Matrix ga(A.value.rows(), A.value.cols());
      for (std::size_t i = 0; i < ga.rows(); ++i)
        for (std::size_t j = 0; j < ga.cols(); ++j) ga(i, j) = g[j];
      accumulate(n.in0, ga);
      break;
    }
    case Op::L2Norm: {
      const double norm = n.value[0];
      if (norm > 0.0) {
        accumulate(n.in0, map(A.value, [k = g[0] / norm](double x) { return k * x; }));
      }
      break;
    }
    case Op::ConcatCols: {
      const Node& B = nodes_[n.in1];
      const std::size_t p = A.value.cols(), q = B.value.cols();
      if (A.requires_grad) {
        Matrix& ga = adj_ref(n.in0);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < p; ++j) ga(i, j) += g(i, j);
      }
      if (B.requires_grad) {
        Matrix& gb = adj_ref(n.in1);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < q; ++j) gb(i, j) += g(i, p + j);
      }
      break;
    }
    case Op::StackRows: {
      std::size_t r0 = 0;
      for (std::uint32_t in : n.inputs) {
        const Node& X = nodes_[in];
        const std::size_t rows = X.value.rows();
        if (X.requires_grad) {
          Matrix& gx = adj_ref(in);
          for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) gx(i, j) += g(r0 + i, j);
        }
        r0 += rows;
      }
      break;
    }
    case Op::Slice: {
      Matrix& ga = adj_ref(n.in0);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) ga(n.i0 + i, n.i1 + j) += g(i, j);
      break;
    }
    case Op::Reshape:
      accumulate(n.in0, Matrix(A.value.rows(), A.value.cols(),
                               std::vector<double>(g.data().begin(), g.data().end())));
      break;
    case Op::Transpose:
      accumulate(n.in0, tsgg::transpose(g));
      break;
    case Op::BroadcastRows:
      accumulate(n.in0, reduce_to(g, A.value));
      break;
    case Op::InstanceNorm: {
      // dx = inv / d * (d * dy - sum(dy) - xhat * sum(dy * xhat)), per row.
      const std::size_t d = g.cols();
      Matrix ga(g.rows(), d);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        double sg = 0.0, sgx = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          sg += g(i, j);
          sgx += g(i, j) * n.value(i, j);
        }
        const double inv = n.aux[i];
        for (std::size_t j = 0; j < d; ++j) {
          ga(i, j) = inv / static_cast<double>(d) *
                     (static_cast<double>(d) * g(i, j) - sg - n.value(i, j) * sgx);
        }
      }
      accumulate(n.in0, ga);
      break;
    }
    case Op::NormalizeAdjacency: {
      const Matrix& a = A.value;
      const Matrix& s = n.aux;
      const std::size_t N = a.rows();
      const double thr = n.attr;
      auto kept = [&](std::size_t i, std::size_t j) {
        return std::abs(a(i, j)) >= thr ? a(i, j) : 0.0;
      };
      // dL/ds_k from the two places s_k appears in out_ij = a'_ij s_i s_j.
      std::vector<double> ds(N, 0.0);
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
          const double w = g(i, j) * kept(i, j);
          ds[i] += w * s[j];
          ds[j] += w * s[i];
        }
      Matrix ga(N, N);
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t l = 0; l < N; ++l) {
          const double v = kept(k, l);
          if (v == 0.0) continue;
          const double sign = v > 0.0 ? 1.0 : -1.0;
          // ds_k / da'_kl = -1/2 d_k^{-3/2} sign(a'_kl) = -1/2 s_k^3 sign.
          ga(k, l) = g(k, l) * s[k] * s[l] - 0.5 * ds[k] * s[k] * s[k] * s[k] * sign;
        }
      accumulate(n.in0, ga);
      break;
    }
  }
}

// --- primitives -----------------------------------------------------------

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  return t.push(binary(Op::MatMul, a, b, tsgg::matmul(a.value(), b.value())));
}

Var matmul_bt(Var a, Var b) {
  Tape& t = tape_of(a, b);
  return t.push(binary(Op::MatMulBT, a, b, tsgg::matmul_bt(a.value(), b.value())));
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a, b);
  check_binary("add", a.value(), b.value());
  return t.push(binary(Op::Add, a, b, zip(a.value(), b.value(), [](double x, double y) { return x + y; })));
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a, b);
  check_binary("sub", a.value(), b.value());
  return t.push(binary(Op::Sub, a, b, zip(a.value(), b.value(), [](double x, double y) { return x - y; })));
}

Var hadamard(Var a, Var b) {
  Tape& t = tape_of(a, b);
  check_binary("hadamard", a.value(), b.value());
  return t.push(
      binary(Op::Hadamard, a, b, zip(a.value(), b.value(), [](double x, double y) { return x * y; })));
}

Var affine(Var a, double scale, double shift) {
  Tape& t = tape_of(a);
  auto n = unary(Op::Affine, a, map(a.value(), [&](double x) { return scale * x + shift; }));
  n.attr = scale;
  n.attr2 = shift;
  return t.push(std::move(n));
}

Var sigmoid(Var a) {
  Tape& t = tape_of(a);
  return t.push(unary(Op::Sigmoid, a, map(a.value(), [](double x) { return tsgg::sigmoid(x); })));
}

Var tanh(Var a) {
  Tape& t = tape_of(a);
  return t.push(unary(Op::Tanh, a, map(a.value(), [](double x) { return std::tanh(x); })));
}

Var relu(Var a) {
  Tape& t = tape_of(a);
  return t.push(unary(Op::Relu, a, map(a.value(), [](double x) { return x > 0.0 ? x : 0.0; })));
}

Var leaky_relu(Var a, double slope) {
  Tape& t = tape_of(a);
  auto n = unary(Op::LeakyRelu, a, map(a.value(), [slope](double x) { return x > 0.0 ? x : slope * x; }));
  n.attr = slope;
  return t.push(std::move(n));
}

Var sum_all(Var a) {
  Tape& t = tape_of(a);
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return t.push(unary(Op::SumAll, a, Matrix(1, 1, s)));
}

Var sum_rows(Var a) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  Matrix out(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out[i] += x(i, j);
  return t.push(unary(Op::SumRows, a, std::move(out)));
}

Var sum_cols(Var a) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  Matrix out(1, x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out[j] += x(i, j);
  return t.push(unary(Op::SumCols, a, std::move(out)));
}

Var l2_norm(Var a) {
  Tape& t = tape_of(a);
  double s = 0.0;
  for (double v : a.value().data()) s += v * v;
  return t.push(unary(Op::L2Norm, a, Matrix(1, 1, std::sqrt(s))));
}

Var concat_cols(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& x = a.value();
  const Matrix& y = b.value();
  if (x.rows() != y.rows()) {
    throw ShapeError("concat_cols: row mismatch " + x.shape_str() + " vs " + y.shape_str());
  }
  Matrix out(x.rows(), x.cols() + y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j);
    for (std::size_t j = 0; j < y.cols(); ++j) out(i, x.cols() + j) = y(i, j);
  }
  return t.push(binary(Op::ConcatCols, a, b, std::move(out)));
}

Var stack_rows(std::span<const Var> rows) {
  if (rows.empty()) throw ContractError("stack_rows: no inputs");
  Tape& t = tape_of(rows.front());
  const std::size_t c = rows.front().cols();
  std::size_t total = 0;
  Tape::Node n;
  n.op = Op::StackRows;
  for (const Var& r : rows) {
    if (r.tape() != &t) throw ContractError("stack_rows: operands live on different tapes");
    if (r.cols() != c) {
      throw ShapeError("stack_rows: column mismatch " + std::to_string(c) + " vs " +
                       r.value().shape_str());
    }
    total += r.rows();
    n.inputs.push_back(r.id());
    n.requires_grad = n.requires_grad || r.requires_grad();
  }
  std::vector<double> data;
  data.reserve(total * c);
  for (const Var& r : rows) data.insert(data.end(), r.value().data().begin(), r.value().data().end());
  n.value = Matrix(total, c, std::move(data));
  return t.push(std::move(n));
}

Var slice(Var a, std::size_t row0, std::size_t nrows, std::size_t col0, std::size_t ncols) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (row0 + nrows > x.rows() || col0 + ncols > x.cols()) {
    throw ShapeError("slice out of range on " + x.shape_str());
  }
  Matrix out(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i)
    for (std::size_t j = 0; j < ncols; ++j) out(i, j) = x(row0 + i, col0 + j);
  auto n = unary(Op::Slice, a, std::move(out));
  n.i0 = row0;
  n.i1 = col0;
  return t.push(std::move(n));
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (rows * cols != x.size()) {
    throw ShapeError("reshape " + x.shape_str() + " to " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  return t.push(unary(Op::Reshape, a,
                      Matrix(rows, cols, std::vector<double>(x.data().begin(), x.data().end()))));
}

Var transpose(Var a) {
  Tape& t = tape_of(a);
  return t.push(unary(Op::Transpose, a, tsgg::transpose(a.value())));
}

Var broadcast_rows(Var a, std::size_t rows) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (x.rows() != 1) throw ShapeError("broadcast_rows expects a row vector, got " + x.shape_str());
  Matrix out(rows, x.cols());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x[j];
  return t.push(unary(Op::BroadcastRows, a, std::move(out)));
}

Var instance_norm(Var a, double eps) {
  Tape& t = tape_of(a);
  if (!(eps > 0.0)) throw ContractError("instance_norm: eps must be positive");
  const Matrix& x = a.value();
  const std::size_t d = x.cols();
  Matrix out(x.rows(), d);
  Matrix inv(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += x(i, j);
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (x(i, j) - mean) * (x(i, j) - mean);
    var /= static_cast<double>(d);
    inv[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) out(i, j) = (x(i, j) - mean) * inv[i];
  }
  auto n = unary(Op::InstanceNorm, a, std::move(out));
  n.aux = std::move(inv);
  n.attr = eps;
  return t.push(std::move(n));
}

Var normalize_adjacency(Var a, double threshold) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (x.rows() != x.cols()) throw ShapeError("normalize_adjacency: non-square " + x.shape_str());
  if (threshold < 0.0) throw ContractError("normalize_adjacency: negative threshold");
  const std::size_t N = x.rows();
  Matrix kept(N, N);
  Matrix s(N, 1);
  for (std::size_t i = 0; i < N; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double v = std::abs(x(i, j)) >= threshold ? x(i, j) : 0.0;
      kept(i, j) = v;
      d += std::abs(v);
    }
    s[i] = d < kDegreeFloor ? 0.0 : 1.0 / std::sqrt(d);
  }
  Matrix out(N, N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out(i, j) = kept(i, j) * s[i] * s[j];
  auto n = unary(Op::NormalizeAdjacency, a, std::move(out));
  n.aux = std::move(s);
  n.attr = threshold;
  return t.push(std::move(n));
}

Var elementwise(Elementwise kind, Var a, Var b, double slope) {
  switch (kind) {
    case Elementwise::Add: return add(a, b);
    case Elementwise::Sub: return sub(a, b);
    case Elementwise::Hadamard: return hadamard(a, b);
    case Elementwise::Sigmoid: return sigmoid(a);
    case Elementwise::Tanh: return tanh(a);
    case Elementwise::LeakyRelu: return leaky_relu(a, slope);
    case Elementwise::Relu: return relu(a);
  }
  throw ContractError("unknown elementwise kind");
}

Var reduce(Reduce kind, Var a) {
  switch (kind) {
    case Reduce::SumAll: return sum_all(a);
    case Reduce::SumRows: return sum_rows(a);
    case Reduce::L2Norm: return l2_norm(a);
  }
  throw ContractError("unknown reduce kind");
}

// --- verification ---------------------------------------------------------

GradCheckReport finite_diff_check(const LossBuilder& f, std::span<Parameter* const> params,
                                  const GradCheckOptions& opts) {
  if (!(opts.eps > 0.0)) throw ContractError("finite_diff_check: eps must be positive");
  auto evaluate = [&f]() {
    Tape t;
    const double v = f(t).scalar();
    if (!std::isfinite(v)) throw NumericError("finite_diff_check: non-finite objective");
    return v;
  };

  {
    Tape t;
    Var loss = f(t);
    if (!std::isfinite(loss.scalar())) throw NumericError("finite_diff_check: non-finite objective");
    for (Parameter* p : params) p->zero_grad();
    t.backward(loss);
  }

  GradCheckReport report;
  for (Parameter* p : params) {
    if (p->frozen) continue;
    const Matrix analytic = p->grad;
    const std::size_t total = p->value.size();
    std::size_t stride = 1;
    if (opts.max_entries_per_param > 0 && total > opts.max_entries_per_param) {
      stride = (total + opts.max_entries_per_param - 1) / opts.max_entries_per_param;
    }
    for (std::size_t idx = 0; idx < total; idx += stride) {
      const double orig = p->value[idx];
      p->value[idx] = orig + opts.eps;
      const double fp = evaluate();
      p->value[idx] = orig - opts.eps;
      const double fm = evaluate();
      p->value[idx] = orig;
      const double numeric = (fp - fm) / (2.0 * opts.eps);
      const double a = analytic[idx];
      const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      ++report.entries_checked;
      if (rel > report.max_rel_error || report.worst_param.empty()) {
        if (rel >= report.max_rel_error) {
          report.max_rel_error = rel;
          report.worst_param = p->name;
          report.worst_index = idx;
          report.worst_analytic = a;
          report.worst_numeric = numeric;
        }
      }
    }
  }
  return report;
}

}  // namespace tsgg::ad
