#include <doctest.h>

#include <set>

#include "cwchaos/rng.hpp"

using namespace cwchaos;

TEST_CASE("streams are reproducible and distinct") {
  Engine a = make_engine(5, 0), b = make_engine(5, 0), c = make_engine(5, 1);
  const auto x = a(), y = b(), z = c();
  CHECK(x == y);
  CHECK(x != z);
  std::set<std::uint64_t> seeds;
  for (std::uint64_t t = 0; t < 1000; ++t) seeds.insert(derive_seed(9, t));
  CHECK(seeds.size() == 1000);
}

TEST_CASE("standard complex normal has E|Z|^2 = 1 and E Z^2 = 0") {
  Engine e = make_engine(1, 0);
  RunningStats abs2, re_sq, re_im;
  for (int i = 0; i < 200000; ++i) {
    const cplx z = standard_complex_normal(e);
    abs2.add(std::norm(z));
    re_sq.add((z * z).real());
    re_im.add((z * z).imag());
  }
  CHECK(std::abs(abs2.mean() - 1.0) < 4 * abs2.std_error());
  CHECK(std::abs(re_sq.mean()) < 4 * re_sq.std_error());
  CHECK(std::abs(re_im.mean()) < 4 * re_im.std_error());
}

TEST_CASE("merged statistics equal sequential statistics") {
  RunningStats all, left, right;
  CovarianceStats call(2), cl(2), cr(2);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::sin(i * 0.37) + 0.01 * i;
    const Eigen::Vector2d v(x, x * x);
    all.add(x);
    call.add(v);
    (i < 300 ? left : right).add(x);
    (i < 300 ? cl : cr).add(v);
  }
  left.merge(right);
  cl.merge(cr);
  CHECK(left.count() == all.count());
  CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-13));
  CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  CHECK((cl.mean() - call.mean()).norm() < 1e-13);
  CHECK((cl.mean_covariance() - call.mean_covariance()).norm() < 1e-13);
}

TEST_CASE("block reduction is independent of the thread count") {
  auto sum_blocks = [](std::size_t threads) {
    auto parts = run_blocks<RunningStats>(100000, threads, [](std::size_t b, std::size_t, std::size_t count) {
      Engine e = make_engine(77, b);
      RunningStats s;
      for (std::size_t i = 0; i < count; ++i) s.add(std::norm(standard_complex_normal(e)));
      return s;
    }, 4096);
    RunningStats total;
    for (const auto& p : parts) total.merge(p);
    return total;
  };
  const RunningStats one = sum_blocks(1), four = sum_blocks(4);
  CHECK(one.mean() == four.mean());
  CHECK(one.variance() == four.variance());
}

TEST_CASE("block reduction propagates exceptions") {
  auto bad = [] {
    run_blocks<int>(10, 2, [](std::size_t b, std::size_t, std::size_t) -> int {
      if (b == 3) throw std::runtime_error("boom");
      return 0;
    }, 1);
  };
  CHECK_THROWS_AS(bad(), std::runtime_error);
}
