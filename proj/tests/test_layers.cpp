#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tsgg/layers.hpp"

using namespace tsgg;
using namespace tsgg::nn;
using tsgg::testing::kGradSeeds;
using tsgg::testing::kGradTol;
using tsgg::testing::random_matrix;

namespace {

void zero_all(ParamList ps) {
  for (auto* p : ps) p->value.fill(0.0);
}

// Random values for every parameter, including the zero-initialized vectors.
void randomize(ParamList ps, Rng& rng, double scale = 0.5) {
  for (auto* p : ps)
    for (auto& v : p->value.data()) v = rng.uniform(-scale, scale);
}

}  // namespace

TEST_CASE("linear layer identity and zero input") {
  Rng rng(1);
  LinearParams p = LinearParams::init("lin", 3, 3, rng);
  p.W.value = Matrix::identity(3);
  p.b.value.fill(0.0);
  Tape t;
  Matrix x{{1, -2, 3}, {0.5, 0, 4}};
  CHECK(linear_forward(t, t.constant(x), p).value() == x);

  p.b.value = Matrix{{7, 8, 9}};
  Tape t2;
  CHECK(linear_forward(t2, t2.constant(Matrix(2, 3)), p).value() == Matrix{{7, 8, 9}, {7, 8, 9}});
  CHECK_THROWS_AS(linear_forward(t, t.constant(Matrix(1, 4)), p), ShapeError);
}

TEST_CASE("glorot bounds") {
  Rng rng(2);
  const Matrix w = glorot_uniform(32, 64, rng);
  const double lim = std::sqrt(6.0 / 96.0);
  for (double v : w.data()) CHECK(std::abs(v) <= lim);
}

TEST_CASE("instance norm values") {
  InstanceNormParams p = InstanceNormParams::init("in", 3);
  Tape t;
  const Matrix y = instance_norm(t, t.constant(Matrix{{1, 2, 3}}), p).value();
  CHECK(y(0, 0) == doctest::Approx(-1.2247).epsilon(1e-3));
  CHECK(y(0, 1) == doctest::Approx(0.0));
  CHECK(y(0, 2) == doctest::Approx(1.2247).epsilon(1e-3));

  p.bias.value = Matrix{{0.3, -0.1, 2.0}};
  Tape t2;
  CHECK(instance_norm(t2, t2.constant(Matrix{{4, 4, 4}}), p).value() == p.bias.value);

  InstanceNormParams one = InstanceNormParams::init("one", 1);
  one.bias.value = Matrix{{0.7}};
  CHECK(instance_norm(t, t.constant(Matrix{{123.0}}), one).value() == Matrix{{0.7}});
}

TEST_CASE("instance norm moments follow gain and bias") {
  Rng rng(3);
  InstanceNormParams p = InstanceNormParams::init("in", 50);
  p.gain.value.fill(2.5);
  p.bias.value.fill(-0.4);
  for (int trial = 0; trial < 10; ++trial) {
    Tape t;
    const Matrix y = instance_norm(t, t.constant(random_matrix(rng, 1, 50, -3, 3)), p).value();
    double mean = 0.0;
    for (double v : y.data()) mean += v / 50.0;
    double var = 0.0;
    for (double v : y.data()) var += (v - mean) * (v - mean) / 50.0;
    CHECK(mean == doctest::Approx(-0.4).epsilon(1e-9));
    CHECK(std::sqrt(var) == doctest::Approx(2.5).epsilon(1e-4));
  }
}

TEST_CASE("SRU with zero parameters outputs zeros") {
  Rng rng(4);
  SruLayerParams p = SruLayerParams::init("sru", 5, 8, rng);
  ParamList ps;
  p.collect(ps);
  zero_all(ps);
  Tape t;
  const SruOutput out = sru_layer_forward(t, t.constant(random_matrix(rng, 7, 5)), p, false);
  REQUIRE(out.hidden.size() == 7);
  for (const Var& h : out.hidden) CHECK(h.value() == Matrix(1, 8));
}

TEST_CASE("SRU base case T = 1") {
  Rng rng(5);
  SruLayerParams p = SruLayerParams::init("sru", 3, 4, rng);
  ParamList ps;
  p.collect(ps);
  randomize(ps, rng);
  const Matrix x = random_matrix(rng, 1, 3);
  Tape t;
  const SruOutput out = sru_layer_forward(t, t.constant(x), p, false);
  const Matrix wx = matmul_bt(x, p.W.value);
  const Matrix fx = matmul_bt(x, p.W_f.value);
  const Matrix rx = matmul_bt(x, p.W_r.value);
  const Matrix hx = matmul_bt(x, p.W_h.value);
  for (std::size_t k = 0; k < 4; ++k) {
    const double f = sigmoid(fx(0, k) + p.b_f.value(0, k));
    const double c = (1.0 - f) * wx(0, k);
    const double r = sigmoid(rx(0, k) + p.b_r.value(0, k));
    CHECK(out.cell.value()(0, k) == doctest::Approx(c).epsilon(1e-14));
    CHECK(out.hidden[0].value()(0, k) == doctest::Approx(r * c + (1.0 - r) * hx(0, k)).epsilon(1e-14));
  }
}

TEST_CASE("SRU rejects empty sequences") {
  Rng rng(6);
  SruLayerParams p = SruLayerParams::init("sru", 3, 4, rng);
  Tape t;
  CHECK_THROWS_AS(sru_layer_forward(t, t.constant(Matrix(0, 3)), p, false), ContractError);
}

TEST_CASE("gradient: linear, instance norm, SRU") {
  for (int s = 0; s < kGradSeeds; ++s) {
    Rng rng(300 + s);
    const Matrix x = random_matrix(rng, 5, 3);

    LinearParams lin = LinearParams::init("lin", 3, 4, rng);
    ParamList lp;
    lin.collect(lp);
    auto lf = [&](Tape& t) { return testing::project(t, linear_forward(t, t.constant(x), lin), s); };
    CHECK(ad::finite_diff_check(lf, lp).max_rel_error < kGradTol);

    InstanceNormParams in = InstanceNormParams::init("in", 3);
    ParamList ip;
    in.collect(ip);
    randomize(ip, rng, 1.0);
    auto inf = [&](Tape& t) { return testing::project(t, instance_norm(t, t.constant(x), in), s); };
    CHECK(ad::finite_diff_check(inf, ip).max_rel_error < kGradTol);

    SruLayerParams sru = SruLayerParams::init("sru", 3, 4, rng);
    ParamList sp;
    sru.collect(sp);
    randomize(sp, rng);
    for (bool reversed : {false, true}) {
      auto sf = [&](Tape& t) {
        const SruOutput out = sru_layer_forward(t, t.constant(x), sru, reversed);
        return ad::sum_all(out.hidden[reversed ? 0 : 4]);
      };
      CHECK(ad::finite_diff_check(sf, sp).max_rel_error < kGradTol);
    }
  }
}

TEST_CASE("gradient: bidirectional encoder") {
  for (int s = 0; s < kGradSeeds; ++s) {
    Rng rng(400 + s);
    BiSruEncoderParams enc = BiSruEncoderParams::init("enc", 4, 6, 2, rng);
    ParamList ps;
    enc.collect(ps);
    randomize(ps, rng);
    const MultivariateSeries ts = testing::random_series(rng, 4, 5);
    auto f = [&](Tape& t) { return testing::project(t, encode_series(t, ts, enc), s); };
    CHECK(ad::finite_diff_check(f, ps).max_rel_error < kGradTol);
  }
}

TEST_CASE("encoder latent is 64 wide for any length") {
  Rng rng(7);
  BiSruEncoderParams enc = BiSruEncoderParams::init("enc", 10, 32, 2, rng);
  for (std::size_t T : {1, 11, 20, 50}) {
    Tape t;
    const Var h = encode_series(t, testing::random_series(rng, 10, T), enc);
    CHECK(h.rows() == 1);
    CHECK(h.cols() == 64);
  }
  Tape t;
  CHECK_THROWS_AS(encode_series(t, testing::random_series(rng, 9, 5), enc), ShapeError);

  ParamList ps;
  enc.collect(ps);
  zero_all(ps);
  Tape t2;
  CHECK(encode_series(t2, testing::random_series(rng, 10, 20), enc).value() == Matrix(1, 64));
}

TEST_CASE("encoder is pure") {
  Rng rng(8);
  BiSruEncoderParams enc = BiSruEncoderParams::init("enc", 5, 8, 2, rng);
  const MultivariateSeries ts = testing::random_series(rng, 5, 9);
  Tape a, b;
  CHECK(encode_series(a, ts, enc).value() == encode_series(b, ts, enc).value());
}

TEST_CASE("time reversal with swapped directions swaps latent halves") {
  Rng rng(9);
  const std::size_t H = 6;
  BiSruEncoderParams enc = BiSruEncoderParams::init("enc", 4, H, 2, rng);
  ParamList ps;
  enc.collect(ps);
  randomize(ps, rng);

  // Layer 1 outputs [fwd, bwd] per step; the mirrored model emits [bwd, fwd],
  // so layer 2 input weights get their column halves exchanged.
  auto swap_halves = [H](const Matrix& w) {
    Matrix out(w.rows(), w.cols());
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < 2 * H; ++c) out(r, (c + H) % (2 * H)) = w(r, c);
    return out;
  };
  BiSruEncoderParams mirror = enc;
  for (std::size_t l = 0; l < 2; ++l) std::swap(mirror.layers[l].fwd, mirror.layers[l].bwd);
  for (SruLayerParams* p : {&mirror.layers[1].fwd, &mirror.layers[1].bwd})
    for (ad::Parameter* w : {&p->W, &p->W_f, &p->W_r, &p->W_h}) w->value = swap_halves(w->value);

  const MultivariateSeries ts = testing::random_series(rng, 4, 7);
  Matrix rev(4, 7);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t t = 0; t < 7; ++t) rev(i, t) = ts.values(i, 6 - t);

  Tape ta, tb;
  const Matrix h = encode_series(ta, ts, enc).value();
  const Matrix hr = encode_series(tb, MultivariateSeries(rev), mirror).value();
  for (std::size_t k = 0; k < H; ++k) {
    CHECK(hr(0, k) == doctest::Approx(h(0, k + H)).epsilon(1e-12));
    CHECK(hr(0, k + H) == doctest::Approx(h(0, k)).epsilon(1e-12));
  }
}
