#pragma once

#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <optional>
#include <vector>

namespace bdf {

/// Bounded single-producer single-consumer ring. push blocks while full,
/// pop blocks while empty until close() is called.
template <class T>
class SpscQueue {
 public:
  explicit SpscQueue(std::size_t capacity) : slots_(capacity + 1) {}

  void push(T value) {
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [&] { return next(head_) != tail_; });
    slots_[head_] = std::move(value);
    head_ = next(head_);
    lock.unlock();
    not_empty_.notify_one();
  }

  /// nullopt once the queue is closed and drained.
  std::optional<T> pop() {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return closed_ || tail_ != head_; });
    if (tail_ == head_) return std::nullopt;
    T value = std::move(slots_[tail_]);
    tail_ = next(tail_);
    lock.unlock();
    not_full_.notify_one();
    return value;
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    not_empty_.notify_all();
  }

 private:
  std::size_t next(std::size_t i) const noexcept { return (i + 1) % slots_.size(); }

  std::vector<T> slots_;
  std::size_t head_ = 0;
  std::size_t tail_ = 0;
  bool closed_ = false;
  std::mutex mutex_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
};

}  // namespace bdf
