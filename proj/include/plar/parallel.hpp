#pragma once

// The two concurrency primitives used by the engine: a chunked fold whose
// partial sums combine in chunk order, and an order-preserving bounded job
// pool. No other part of the library spawns threads.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "plar/tabular.hpp"

namespace plar {

// Contiguous split of [0, total) into `chunks` ranges whose sizes differ by at most one.
class ChunkPlan {
 public:
  ChunkPlan(std::size_t total, std::size_t chunks) : total_(total) {
    if (chunks == 0) throw DomainError("chunk count must be at least 1");
    bounds_.resize(chunks + 1);
    const std::size_t base = total / chunks, extra = total % chunks;
    bounds_[0] = 0;
    for (std::size_t k = 0; k < chunks; ++k) bounds_[k + 1] = bounds_[k] + base + (k < extra ? 1 : 0);
  }

  std::size_t total() const noexcept { return total_; }
  std::size_t chunks() const noexcept { return bounds_.size() - 1; }
  std::size_t begin(std::size_t k) const { return bounds_.at(k); }
  std::size_t end(std::size_t k) const { return bounds_.at(k + 1); }
  const std::vector<std::size_t>& boundaries() const noexcept { return bounds_; }

 private:
  std::size_t total_;
  std::vector<std::size_t> bounds_;
};

// Thrown by bounded_map when a job fails; carries the index of the first failure.
class TaskError : public std::runtime_error {
 public:
  TaskError(std::size_t job, const std::string& what, std::exception_ptr cause)
      : std::runtime_error("job " + std::to_string(job) + " failed: " + what), job_(job), cause_(std::move(cause)) {}
  std::size_t job_index() const noexcept { return job_; }
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  std::size_t job_;
  std::exception_ptr cause_;
};

namespace detail {

inline std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown exception";
  }
}

}  // namespace detail

// Runs job(0..n-1) with at most `level` jobs in flight; results come back in
// job order. level == 1 runs every job on the calling thread, in order.
template <typename Job>
auto bounded_map(std::size_t n, Job&& job, std::size_t level) -> std::vector<decltype(job(std::size_t{}))> {
  using R = decltype(job(std::size_t{}));
  if (level == 0) throw DomainError("model parallelism level must be at least 1");
  std::vector<std::optional<R>> slots(n);

  if (level == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        slots[i].emplace(job(i));
      } catch (...) {
        auto e = std::current_exception();
        throw TaskError(i, detail::describe(e), e);
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::size_t err_job = n;
    std::exception_ptr err;

    auto worker = [&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          slots[i].emplace(job(i));
        } catch (...) {
          std::lock_guard lock(err_mu);
          // keep the lowest failing index among the jobs that ran
          if (i < err_job) {
            err_job = i;
            err = std::current_exception();
          }
          failed = true;
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      const std::size_t threads = std::min(level, n);
      pool.reserve(threads);
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (err) throw TaskError(err_job, detail::describe(err), err);
  }

  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Sums per_item(i) over each chunk of `plan`, then adds the partial sums in
// ascending chunk order. With `workers` > 1 the chunks are summed concurrently;
// the result is bit-identical either way for a fixed plan.
template <typename PerItem>
double chunked_fold(const ChunkPlan& plan, PerItem&& per_item, std::size_t workers = 1) {
  auto chunk_sum = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t i = plan.begin(k); i < plan.end(k); ++i) s += per_item(i);
    return s;
  };
  std::vector<double> partial = bounded_map(plan.chunks(), chunk_sum, std::max<std::size_t>(workers, 1));
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <typename T, typename PerItem>
double chunked_fold(std::span<const T> items, const ChunkPlan& plan, PerItem&& per_item, std::size_t workers = 1) {
  if (plan.total() != items.size()) throw DomainError("chunk plan does not cover the sequence");
  return chunked_fold(plan, [&](std::size_t i) { return per_item(items[i]); }, workers);
}

inline std::size_t hardware_workers() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace plar
