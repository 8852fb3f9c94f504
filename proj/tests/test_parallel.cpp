#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <numeric>
#include <random>
#include <thread>

#include "plar/parallel.hpp"

using namespace plar;

TEST(ChunkPlan, BalancedContiguousCover) {
  ChunkPlan p(10, 4);
  EXPECT_EQ(p.boundaries(), (std::vector<std::size_t>{0, 3, 6, 8, 10}));
  ChunkPlan q(2, 5);
  EXPECT_EQ(q.chunks(), 5u);
  EXPECT_EQ(q.end(4), 2u);
  EXPECT_THROW(ChunkPlan(3, 0), DomainError);
  for (std::size_t n = 0; n < 40; ++n)
    for (std::size_t k = 1; k < 9; ++k) {
      ChunkPlan c(n, k);
      std::size_t lo = n, hi = 0;
      for (std::size_t i = 0; i < k; ++i) {
        lo = std::min(lo, c.end(i) - c.begin(i));
        hi = std::max(hi, c.end(i) - c.begin(i));
        if (i) {
          ASSERT_EQ(c.begin(i), c.end(i - 1));
        }
      }
      ASSERT_LE(hi - lo, 1u);
      ASSERT_EQ(c.end(k - 1), n);
    }
}

TEST(ChunkedFold, SumsInChunkOrder) {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(chunked_fold(std::span<const double>(v), ChunkPlan(4, 2), [](double x) { return x; }), 10.0);
  std::vector<double> groups{0.0, -0.5};
  EXPECT_DOUBLE_EQ(chunked_fold(std::span<const double>(groups), ChunkPlan(2, 2), [](double x) { return x; }), -0.5);
  EXPECT_THROW(chunked_fold(std::span<const double>(v), ChunkPlan(3, 1), [](double x) { return x; }), DomainError);
}

TEST(ChunkedFold, OneChunkIsLeftToRight) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(1000);
  for (auto& x : v) x = u(rng) * 1e6;
  double seq = 0;
  for (double x : v) seq += x;
  EXPECT_EQ(chunked_fold(std::span<const double>(v), ChunkPlan(v.size(), 1), [](double x) { return x; }), seq);
  const double k = chunked_fold(std::span<const double>(v), ChunkPlan(v.size(), 7), [](double x) { return x; });
  EXPECT_NEAR(k, seq, 1e-12 * std::abs(seq) + 1e-6);
}

TEST(ChunkedFold, BitIdenticalAcrossWorkerCounts) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(10007);
  for (auto& x : v) x = u(rng);
  ChunkPlan plan(v.size(), 16);
  const double ref = chunked_fold(std::span<const double>(v), plan, [](double x) { return x * x; }, 1);
  for (std::size_t w : {2, 4, 8, 32})
    for (int rep = 0; rep < 5; ++rep)
      ASSERT_EQ(chunked_fold(std::span<const double>(v), plan, [](double x) { return x * x; }, w), ref);
}

TEST(BoundedMap, PreservesOrder) {
  auto r = bounded_map(5, [](std::size_t i) { return i; }, 2);
  EXPECT_EQ(r, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  auto slow_first = [](std::size_t i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(i == 0 ? 20 : 0));
    return static_cast<int>(i) * 3;
  };
  EXPECT_EQ(bounded_map(6, slow_first, 8), bounded_map(6, slow_first, 1));
  EXPECT_TRUE(bounded_map(0, [](std::size_t i) { return i; }, 4).empty());
  EXPECT_THROW(bounded_map(3, [](std::size_t i) { return i; }, 0), DomainError);
}

TEST(BoundedMap, RespectsConcurrencyLimit) {
  std::atomic<int> live{0}, peak{0};
  auto job = [&](std::size_t) {
    int now = ++live;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    --live;
    return 0;
  };
  bounded_map(40, job, 3);
  EXPECT_LE(peak.load(), 3);
  peak = 0;
  bounded_map(10, job, 1);
  EXPECT_EQ(peak.load(), 1);
}

TEST(BoundedMap, ReportsFailingJob) {
  for (std::size_t level : {1, 4}) {
    try {
      bounded_map(
          10,
          [](std::size_t i) -> int {
            if (i == 3) throw std::runtime_error("boom");
            return 0;
          },
          level);
      FAIL() << "expected a task error";
    } catch (const TaskError& e) {
      EXPECT_EQ(e.job_index(), 3u);
      EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
      EXPECT_THROW(std::rethrow_exception(e.cause()), std::runtime_error);
    }
  }
}
