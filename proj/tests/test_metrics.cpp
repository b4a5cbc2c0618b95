#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "brokerbench/metrics.hpp"
#include "oracles.hpp"

using namespace brokerbench;
using metrics::run_metrics;

TEST_CASE("latency summary on fixed examples") {
  SUBCASE("single element") {
    const auto s = metrics::summarize(std::vector<double>{7});
    CHECK(s.min_us == 7);
    CHECK(s.avg_us == 7);
    CHECK(s.p90_us == 7);
    CHECK(s.p99_us == 7);
    CHECK(s.max_us == 7);
  }
  SUBCASE("1..100") {
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[i] = i + 1;
    // Shuffle: the summary must not depend on reception order.
    std::mt19937 rng(7);
    std::shuffle(v.begin(), v.end(), rng);
    const auto s = metrics::summarize(v);
    CHECK(s.min_us == 1);
    CHECK(s.avg_us == doctest::Approx(50.5));
    CHECK(s.p90_us == 90);
    CHECK(s.p99_us == 99);
    CHECK(s.max_us == 100);
  }
  SUBCASE("constant series") {
    const auto s = metrics::summarize(std::vector<double>{5, 5, 5, 5});
    CHECK(s.min_us == 5);
    CHECK(s.avg_us == 5);
    CHECK(s.p90_us == 5);
    CHECK(s.p99_us == 5);
    CHECK(s.max_us == 5);
  }
  SUBCASE("empty series is a total-loss signal") {
    CHECK_THROWS_WITH_AS(metrics::summarize(std::vector<double>{}),
                         doctest::Contains("empty"), bench_error);
  }
  SUBCASE("negative latency rejected") {
    CHECK_THROWS_AS(metrics::summarize(std::vector<double>{1, -2}), bench_error);
  }
}

TEST_CASE("jitter on fixed examples") {
  CHECK(metrics::jitter(std::vector<double>{5, 5, 5, 5}) == 0);
  CHECK(metrics::jitter(std::vector<double>{10, 12, 11, 15}) == doctest::Approx(7.0 / 3.0));
  CHECK(metrics::jitter(std::vector<double>{0, 10}) == 10);
  CHECK_THROWS_AS(metrics::jitter(std::vector<double>{42}), bench_error);
  CHECK_THROWS_AS(metrics::jitter(std::vector<double>{}), bench_error);
}

TEST_CASE("jitter of a pair is the absolute difference") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(0, 1e6);
  for (int i = 0; i < 200; ++i) {
    const double a = dist(rng), b = dist(rng);
    CHECK(metrics::jitter(std::vector<double>{a, b}) == std::fabs(a - b));
  }
}

TEST_CASE("summary is permutation invariant, jitter is not") {
  const std::vector<double> base{1, 9, 2, 8, 3, 7};
  std::vector<double> shuffled = base;
  std::mt19937 rng(3);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(metrics::summarize(base) == metrics::summarize(shuffled));
  // Reception order matters for jitter: sorted order minimizes it.
  std::vector<double> sorted = base;
  std::sort(sorted.begin(), sorted.end());
  CHECK(metrics::jitter(base) > metrics::jitter(sorted));
}

TEST_CASE("scale equivariance") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(0, 1000);
  std::vector<double> v(25);
  for (double& x : v) x = dist(rng);
  const double k = 3.5;
  std::vector<double> scaled = v;
  for (double& x : scaled) x *= k;
  const auto a = metrics::summarize(v);
  const auto b = metrics::summarize(scaled);
  CHECK(b.min_us == doctest::Approx(k * a.min_us));
  CHECK(b.avg_us == doctest::Approx(k * a.avg_us));
  CHECK(b.p90_us == doctest::Approx(k * a.p90_us));
  CHECK(b.p99_us == doctest::Approx(k * a.p99_us));
  CHECK(b.max_us == doctest::Approx(k * a.max_us));
  CHECK(metrics::jitter(scaled) == doctest::Approx(k * metrics::jitter(v)));
}

TEST_CASE("summary and jitter match the brute-force oracle on short series") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> len_dist(1, 8);
  std::uniform_real_distribution<double> val_dist(0, 5000);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<double> v(static_cast<std::size_t>(len_dist(rng)));
    for (double& x : v) x = val_dist(rng);
    const auto got = metrics::summarize(v);
    const auto want = oracle::summarize(v);
    CHECK(oracle::close_rel(got.min_us, want.min));
    CHECK(oracle::close_rel(got.avg_us, want.avg));
    CHECK(oracle::close_rel(got.p90_us, want.p90));
    CHECK(oracle::close_rel(got.p99_us, want.p99));
    CHECK(oracle::close_rel(got.max_us, want.max));
    if (v.size() >= 2) CHECK(oracle::close_rel(metrics::jitter(v), oracle::jitter(v)));
  }
}

TEST_CASE("throughput on fixed examples") {
  CHECK(metrics::throughput_mb_per_s({1000, 1'000'000, 0, 2'000'000'000}) ==
        doctest::Approx(500.0));
  CHECK(metrics::throughput_mb_per_s({1, 1'000'000, 0, 1'000'000'000}) == doctest::Approx(1.0));
  CHECK(metrics::throughput_mb_per_s({5000, 32768, 0, 1'000'000'000}) ==
        doctest::Approx(163.84));
  CHECK_THROWS_AS(metrics::throughput_mb_per_s({0, 1000, 0, 10}), bench_error);
  CHECK_THROWS_AS(metrics::throughput_mb_per_s({10, 1000, 5, 5}), bench_error);
  CHECK_THROWS_AS(metrics::throughput_mb_per_s({10, 1000, 9, 5}), bench_error);
}

TEST_CASE("throughput halves exactly when the span doubles") {
  const metrics::throughput_input in{777, 4096, 1'000, 2'001'000};
  metrics::throughput_input doubled = in;
  doubled.last_recv_ns = in.first_send_ns + 2 * (in.last_recv_ns - in.first_send_ns);
  CHECK(metrics::throughput_mb_per_s(in) == 2.0 * metrics::throughput_mb_per_s(doubled));
}

namespace {

run_metrics with_avg(double avg) {
  run_metrics m;
  m.latency = {avg, avg, avg, avg, avg};
  m.received = 100;
  m.sent = 100;
  return m;
}

}  // namespace

TEST_CASE("two-level averaging on fixed examples") {
  SUBCASE("subscriber mean of avg latency") {
    const std::vector<run_metrics> subs{with_avg(10), with_avg(20)};
    CHECK(metrics::average_subscribers(subs).latency.avg_us == doctest::Approx(15));
  }
  SUBCASE("single subscriber is identity") {
    run_metrics m = with_avg(33);
    m.jitter_us = 1.5;
    m.throughput_mb_s = 9;
    const std::vector<run_metrics> subs{m};
    CHECK(metrics::average_subscribers(subs) == m);
  }
  SUBCASE("throughput mean") {
    run_metrics a = with_avg(1), b = with_avg(1);
    a.throughput_mb_s = 100;
    b.throughput_mb_s = 300;
    const std::vector<run_metrics> subs{a, b};
    CHECK(metrics::average_subscribers(subs).throughput_mb_s == doctest::Approx(200));
  }
  SUBCASE("run mean over two runs") {
    const std::vector<run_metrics> runs{with_avg(15), with_avg(40)};
    CHECK(metrics::average_runs(runs).latency.avg_us == doctest::Approx(27.5));
  }
  SUBCASE("single run is identity") {
    const std::vector<run_metrics> runs{with_avg(12)};
    CHECK(metrics::average_runs(runs) == with_avg(12));
  }
  SUBCASE("jitter mean over four runs") {
    std::vector<run_metrics> runs;
    for (double j : {1.0, 3.0, 5.0, 7.0}) {
      run_metrics m = with_avg(1);
      m.jitter_us = j;
      runs.push_back(m);
    }
    CHECK(metrics::average_runs(runs).jitter_us == doctest::Approx(4));
  }
  SUBCASE("empty list rejected") {
    CHECK_THROWS_AS(metrics::average_subscribers({}), bench_error);
    CHECK_THROWS_AS(metrics::average_runs({}), bench_error);
  }
}

TEST_CASE("absent jitter stays absent through averaging") {
  run_metrics a = with_avg(10);  // M=1 runs carry no jitter
  run_metrics b = with_avg(20);
  const std::vector<run_metrics> both{a, b};
  CHECK_FALSE(metrics::average_subscribers(both).jitter_us.has_value());

  b.jitter_us = 6.0;
  const std::vector<run_metrics> mixed{a, b};
  CHECK(metrics::average_subscribers(mixed).jitter_us == 6.0);
}

TEST_CASE("hierarchical mean vs grand mean") {
  // Equal subscriber counts per run: the two-level mean IS the grand mean.
  std::vector<run_metrics> run1{with_avg(10), with_avg(20)};
  std::vector<run_metrics> run2{with_avg(30), with_avg(40)};
  std::vector<run_metrics> levels{metrics::average_subscribers(run1),
                                  metrics::average_subscribers(run2)};
  CHECK(metrics::average_runs(levels).latency.avg_us == doctest::Approx(25));

  // Unequal subscriber counts: the hierarchical mean is the defined
  // behavior and differs from the grand mean.
  std::vector<run_metrics> run3{with_avg(10), with_avg(20), with_avg(90)};
  std::vector<run_metrics> run4{with_avg(10)};
  std::vector<run_metrics> levels2{metrics::average_subscribers(run3),
                                   metrics::average_subscribers(run4)};
  const double hierarchical = metrics::average_runs(levels2).latency.avg_us;
  const double grand = (10 + 20 + 90 + 10) / 4.0;
  CHECK(hierarchical == doctest::Approx(25.0));  // (40 + 10) / 2
  CHECK(hierarchical != doctest::Approx(grand));
}
