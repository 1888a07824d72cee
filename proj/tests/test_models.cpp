#include <doctest.h>

#include "rbd/nn/checkpoint.hpp"
#include "rbd/nn/classifier.hpp"
#include "rbd/nn/generator.hpp"
#include "rbd/nn/sgd.hpp"
#include "support/oracles.hpp"

using rbd::Mat;
using rbd::Shape3;
using rbd::Vec;
using rbd::nn::ClassifierSpec;
using rbd::nn::GeneratorSpec;
using rbd::nn::NoiseGenerator;
using rbd::nn::PreActResNet;

namespace {

ClassifierSpec tiny_spec() {
  ClassifierSpec spec;
  spec.in_shape = {3, 8, 8};
  spec.num_classes = 3;
  spec.widths = {3, 6};
  spec.blocks = {1, 1};
  return spec;
}

Mat<double> random_batch(Shape3 sh, long n, rbd::Rng& rng) {
  Mat<double> x(sh.size(), n);
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < x.rows(); ++i) x(i, j) = rbd::uniform_in(rng, -1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("tiny classifier stays under 1k parameters") {
  PreActResNet<double> net(tiny_spec());
  long total = 0;
  for (auto* p : net.params()) total += p->size();
  CHECK(total <= 1000);
}

TEST_CASE("cross-entropy parameter gradients match central finite differences") {
  PreActResNet<double> net(tiny_spec());
  rbd::Rng rng(17);
  net.init(rng);
  Mat<double> x = random_batch(net.in_shape(), 4, rng);
  std::vector<int> y{0, 2, 1, 1};

  rbd::nn::zero_grads<double>(net);
  Mat<double> logits = net.forward(x, true);
  auto ce = rbd::nn::cross_entropy(logits, y);
  net.backward(ce.dlogits, false, true);
  Vec<double> analytic = rbd::nn::flat_grad<double>(net);

  Vec<double> theta = rbd::nn::flat_params<double>(net);
  auto set = [&](const Vec<double>& t) { rbd::nn::set_flat_params(net, t); };
  auto eval = [&]() {
    Mat<double> l = net.forward(x, true);
    return static_cast<double>(rbd::nn::cross_entropy(l, y).loss);
  };
  Vec<double> fd = oracle::central_diff(set, set, eval, theta, 1e-6);
  CHECK(oracle::rel_error(analytic, fd) < 1e-3);
}

TEST_CASE("eval-mode input gradients match finite differences") {
  PreActResNet<double> net(tiny_spec());
  rbd::Rng rng(23);
  net.init(rng);
  Mat<double> x = random_batch(net.in_shape(), 2, rng);
  std::vector<int> y{1, 0};

  net.forward(x, true);  // populate running stats away from init
  Mat<double> logits = net.forward(x, false);
  auto ce = rbd::nn::cross_entropy(logits, y);
  Mat<double> dx = net.backward(ce.dlogits, true, false);

  const double eps = 1e-5;
  rbd::Rng probe_rng(5);
  for (int t = 0; t < 12; ++t) {
    const long i = static_cast<long>(rbd::bounded(probe_rng, x.rows()));
    const long j = static_cast<long>(rbd::bounded(probe_rng, x.cols()));
    Mat<double> xp = x, xm = x;
    xp(i, j) += eps;
    xm(i, j) -= eps;
    const double fp = rbd::nn::cross_entropy(net.forward(xp, false), y).loss;
    const double fm = rbd::nn::cross_entropy(net.forward(xm, false), y).loss;
    const double fd = (fp - fm) / (2 * eps);
    CHECK(dx(i, j) == doctest::Approx(fd).epsilon(1e-3));
  }
}

TEST_CASE("zero-weight head yields uniform logits") {
  PreActResNet<double> net(tiny_spec());
  rbd::Rng rng(29);
  net.init(rng);
  auto params = net.params();
  // Final two tensors are the head linear weight and bias.
  params[params.size() - 2]->value.setZero();
  params[params.size() - 1]->value.setZero();
  Mat<double> x = random_batch(net.in_shape(), 3, rng);
  Mat<double> logits = net.forward(x, false);
  CHECK(logits.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eval-mode forward is batch-size independent and deterministic") {
  PreActResNet<double> net(tiny_spec());
  rbd::Rng rng(31);
  net.init(rng);
  Mat<double> x = random_batch(net.in_shape(), 5, rng);
  net.forward(x, true);
  Mat<double> all = net.forward(x, false);
  for (long j = 0; j < x.cols(); ++j) {
    Mat<double> one = net.forward(x.col(j), false);
    CHECK((one - all.col(j)).cwiseAbs().maxCoeff() == 0.0);
  }
  Mat<double> again = net.forward(x, false);
  CHECK((again - all).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("NaN input raises a numerical fault") {
  PreActResNet<double> net(tiny_spec());
  rbd::Rng rng(37);
  net.init(rng);
  Mat<double> x = random_batch(net.in_shape(), 2, rng);
  x(5, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(net.forward(x, false), rbd::NumericalFault);
}

TEST_CASE("sgd_step layer masks") {
  rbd::Rng rng(41);
  PreActResNet<double> masked(tiny_spec()), unmasked(tiny_spec());
  masked.init(rng);
  auto snap = rbd::nn::snapshot<double>(masked);
  rbd::nn::restore(unmasked, snap);

  Mat<double> x = random_batch(masked.in_shape(), 4, rng);
  std::vector<int> y{0, 1, 2, 0};

  SUBCASE("mask covering all layers equals an unmasked step") {
    rbd::nn::sgd_step(masked, x, y, 0.05, 0);
    rbd::nn::sgd_step(unmasked, x, y, 0.05);
    auto a = rbd::nn::flat_params<double>(masked);
    auto b = rbd::nn::flat_params<double>(unmasked);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("suffix mask leaves earlier tensors bitwise unchanged") {
    auto params = masked.params();
    const std::size_t first = params.size() - 4;
    std::vector<Vec<double>> before;
    for (auto* p : params) before.push_back(p->value);
    rbd::nn::sgd_step(masked, x, y, 0.05, first);
    int changed = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if ((params[i]->value - before[i]).cwiseAbs().maxCoeff() != 0.0) {
        ++changed;
        CHECK(i >= first);
      }
    }
    CHECK(changed == 4);
  }

  SUBCASE("zero learning rate leaves parameters unchanged") {
    auto before = rbd::nn::flat_params<double>(masked);
    rbd::nn::sgd_step(masked, x, y, 0.0);
    auto after = rbd::nn::flat_params<double>(masked);
    CHECK((before - after).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("empty batch is rejected") {
    Mat<double> empty(masked.in_shape().size(), 0);
    CHECK_THROWS_AS(rbd::nn::sgd_step(masked, empty, {}, 0.05), rbd::ContractError);
  }
}

TEST_CASE("snapshot/restore round-trips forward outputs bit-exactly") {
  rbd::Rng rng(43);
  PreActResNet<double> net(tiny_spec());
  net.init(rng);
  Mat<double> x = random_batch(net.in_shape(), 3, rng);
  net.forward(x, true);
  Mat<double> ref = net.forward(x, false);
  auto snap = rbd::nn::snapshot<double>(net, "clean", 7);
  CHECK(snap.phase == "clean");

  // Perturb, then restore.
  for (auto* p : net.params()) p->value.array() += 0.25;
  for (auto* b : net.buffers()) b->value.array() += 0.1;
  Mat<double> perturbed = net.forward(x, false);
  CHECK((perturbed - ref).cwiseAbs().maxCoeff() > 0.0);

  rbd::nn::restore(net, snap);
  Mat<double> back = net.forward(x, false);
  CHECK((back - ref).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("restore rejects a mismatched architecture") {
  PreActResNet<double> small(tiny_spec());
  ClassifierSpec other = tiny_spec();
  other.widths = {4, 8};
  PreActResNet<double> big(other);
  rbd::Rng rng(47);
  small.init(rng);
  auto snap = rbd::nn::snapshot<double>(small);
  CHECK_THROWS_AS(rbd::nn::restore(big, snap), rbd::ContractError);
}

TEST_CASE("checkpoint file round-trips a snapshot bit-exactly") {
  rbd::Rng rng(53);
  PreActResNet<float> net(tiny_spec());
  net.init(rng);
  Mat<float> x = random_batch(net.in_shape(), 2, rng).cast<float>();
  net.forward(x, true);
  auto snap = rbd::nn::snapshot<float>(net, "backdoored", 11);
  const auto path = std::filesystem::temp_directory_path() / "rbd_test_ckpt.bin";
  rbd::nn::save_checkpoint(snap, path, {{"note", "test"}});
  nlohmann::json meta;
  auto loaded = rbd::nn::load_checkpoint<float>(path, &meta);
  CHECK(loaded.phase == "backdoored");
  CHECK(loaded.step == 11);
  CHECK(meta.at("note") == "test");
  REQUIRE(loaded.tensors.size() == snap.tensors.size());
  for (std::size_t i = 0; i < snap.tensors.size(); ++i)
    CHECK((loaded.tensors[i].value - snap.tensors[i].value).cwiseAbs().maxCoeff() == 0.0f);
  REQUIRE(loaded.buffers.size() == snap.buffers.size());
  for (std::size_t i = 0; i < snap.buffers.size(); ++i)
    CHECK((loaded.buffers[i].value - snap.buffers[i].value).cwiseAbs().maxCoeff() == 0.0f);
  CHECK_THROWS_AS(rbd::nn::load_checkpoint<double>(path), rbd::ContractError);
  std::filesystem::remove(path);
}

TEST_CASE("generator output matches input shape and is tanh-bounded") {
  GeneratorSpec gspec;
  gspec.in_shape = {3, 8, 8};
  gspec.base_channels = 2;
  NoiseGenerator<double> gen(gspec);
  rbd::Rng rng(59);
  gen.init(rng);
  Mat<double> x = random_batch(gspec.in_shape, 4, rng);
  Mat<double> out = gen.forward(x);
  CHECK(out.rows() == x.rows());
  CHECK(out.cols() == x.cols());
  CHECK(out.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("generator parameter gradients match finite differences") {
  GeneratorSpec gspec;
  gspec.in_shape = {3, 8, 8};
  gspec.base_channels = 2;
  NoiseGenerator<double> gen(gspec);
  rbd::Rng rng(61);
  gen.init(rng);
  Mat<double> x = random_batch(gspec.in_shape, 2, rng);
  Mat<double> target = random_batch(gspec.in_shape, 2, rng);

  auto loss_of = [&]() {
    Mat<double> out = gen.forward(x);
    return 0.5 * (out - target).squaredNorm();
  };
  rbd::nn::zero_grads<double>(gen);
  Mat<double> out = gen.forward(x);
  gen.backward(out - target);
  Vec<double> analytic = rbd::nn::flat_grad<double>(gen);

  Vec<double> theta = rbd::nn::flat_params<double>(gen);
  auto set = [&](const Vec<double>& t) { rbd::nn::set_flat_params(gen, t); };
  Vec<double> fd = oracle::central_diff(set, set, loss_of, theta, 1e-6);
  CHECK(oracle::rel_error(analytic, fd) < 1e-3);
}
