#pragma once

// Reverse-mode automatic differentiation over dense 2-D tensors.
//
// A Tape records every primitive as a node (value, inputs, attributes).
// Parameters are long-lived leaves owned by model code; binding one to a tape
// creates a leaf node, and backward() writes the accumulated adjoint of that
// leaf into Parameter::grad. Everything else on the tape is transient.

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsgg/matrix.hpp"

namespace tsgg::ad {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  bool frozen = false;  // frozen parameters enter tapes as constants

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad = Matrix(value.rows(), value.cols()); }
};

class Tape;

// Handle to a node on a tape. Cheap to copy; valid until the tape is cleared.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  double scalar() const;
  bool requires_grad() const;
  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* t, std::uint32_t id) : tape_(t), id_(id) {}
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

enum class Op : std::uint8_t {
  Leaf,
  MatMul,
  MatMulBT,
  Add,
  Sub,
  Hadamard,
  Affine,
  Sigmoid,
  Tanh,
  Relu,
  LeakyRelu,
  SumAll,
  SumRows,
  SumCols,
  L2Norm,
  ConcatCols,
  StackRows,
  Slice,
  Reshape,
  Transpose,
  BroadcastRows,
  InstanceNorm,
  NormalizeAdjacency,
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Binds a parameter, snapshotting its value; repeated binds of the same parameter return the same node.
  Var param(Parameter& p);

  // Populates grad of every parameter that was non-frozen when bound. Bound
  // parameters that the loss does not reach end up with a zero grad.
  void backward(Var loss);

  // Adjoint of a node after backward(); zero-shaped if never reached.
  Matrix adjoint(Var v) const;

  void clear();
  std::size_t size() const { return nodes_.size(); }

  // Primitive recording; used by the op functions below.
  struct Node {
    Op op = Op::Leaf;
    bool requires_grad = false;
    bool touched = false;
    Matrix value;
    Matrix adj;
    std::uint32_t in0 = 0, in1 = 0;
    std::vector<std::uint32_t> inputs;  // variadic ops only
    double attr = 0.0, attr2 = 0.0;
    std::size_t i0 = 0, i1 = 0;
    Matrix aux;
    Parameter* param = nullptr;
  };

  Var push(Node node);
  const Node& node(std::uint32_t id) const { return nodes_[id]; }

 private:
  void accumulate(std::uint32_t id, const Matrix& g);
  Matrix& adj_ref(std::uint32_t id);
  void propagate(std::uint32_t id);

  std::deque<Node> nodes_;  // deque: node references stay valid across pushes
  std::unordered_map<Parameter*, std::uint32_t> bound_;
};

// --- primitives -----------------------------------------------------------

Var matmul(Var a, Var b);
Var matmul_bt(Var a, Var b);  // a * b^T

// Binary elementwise ops. `b` may also be a 1xC row vector broadcast over
// the rows of an RxC `a`; any other shape mix is a ShapeError.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);

Var affine(Var a, double scale, double shift);  // scale * a + shift
inline Var scale(Var a, double s) { return affine(a, s, 0.0); }
inline Var one_minus(Var a) { return affine(a, -1.0, 1.0); }

Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
inline constexpr double kLeakySlope = 0.2;
Var leaky_relu(Var a, double slope = kLeakySlope);

Var sum_all(Var a);
Var sum_rows(Var a);  // RxC -> Rx1, each row summed
Var sum_cols(Var a);  // RxC -> 1xC, each column summed
Var l2_norm(Var a);   // sqrt of the sum of squares; zero adjoint at the origin

Var concat_cols(Var a, Var b);
Var stack_rows(std::span<const Var> rows);
Var slice(Var a, std::size_t row0, std::size_t nrows, std::size_t col0, std::size_t ncols);
inline Var row(Var a, std::size_t r) { return slice(a, r, 1, 0, a.cols()); }
Var reshape(Var a, std::size_t rows, std::size_t cols);
Var transpose(Var a);
Var broadcast_rows(Var a, std::size_t rows);  // 1xC -> RxC

// Per-row standardization (x - mean) / sqrt(var + eps), population variance.
Var instance_norm(Var a, double eps);

// A' = A with |a| < threshold zeroed; d_i = sum_j |A'_ij|;
// result = D^-1/2 A' D^-1/2 with d^-1/2 := 0 for d < 1e-8.
Var normalize_adjacency(Var a, double threshold);

enum class Elementwise { Add, Sub, Hadamard, Sigmoid, Tanh, LeakyRelu, Relu };
Var elementwise(Elementwise kind, Var a, Var b = {}, double slope = kLeakySlope);

enum class Reduce { SumAll, SumRows, L2Norm };
Var reduce(Reduce kind, Var a);

// --- verification ---------------------------------------------------------

struct GradCheckOptions {
  double eps = 1e-5;
  // 0 checks every entry; otherwise at most this many evenly spaced entries
  // per parameter tensor.
  std::size_t max_entries_per_param = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
};

using LossBuilder = std::function<Var(Tape&)>;

// Central-difference check of the analytic gradient of `f` with respect to
// `params`. Relative error per entry is |a - n| / max(1e-8, |a| + |n|).
GradCheckReport finite_diff_check(const LossBuilder& f, std::span<Parameter* const> params,
                                  const GradCheckOptions& opts = {});

}  // namespace tsgg::ad
