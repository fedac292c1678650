#pragma once

// Bounded blocking channel: the only cross-thread hand-off in the pipeline.
// Producers block while the queue is at capacity (back pressure, no drops).
// Instrumented with a high-water mark so tests can assert the bound.

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>

namespace zerops {

template <typename T>
class BoundedChannel {
public:
    explicit BoundedChannel(size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

    // Blocks while full. Returns false (item dropped) if the channel is closed.
    bool push(T item) {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return queue_.size() < capacity_ || closed_; });
        if (closed_) return false;
        queue_.push_back(std::move(item));
        if (queue_.size() > max_depth_) max_depth_ = queue_.size();
        not_empty_.notify_one();
        return true;
    }

    // Blocks while empty. Returns nullopt once closed and drained.
    std::optional<T> pop() {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return !queue_.empty() || closed_; });
        return take(lock);
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    bool closed() const {
        std::lock_guard lock(mutex_);
        return closed_;
    }

    size_t depth() const {
        std::lock_guard lock(mutex_);
        return queue_.size();
    }

    size_t max_depth() const {
        std::lock_guard lock(mutex_);
        return max_depth_;
    }

    size_t capacity() const { return capacity_; }

private:
    std::optional<T> take(std::unique_lock<std::mutex>&) {
        if (queue_.empty()) return std::nullopt;  // closed and drained
        T item = std::move(queue_.front());
        queue_.pop_front();
        not_full_.notify_one();
        return item;
    }

    const size_t capacity_;
    mutable std::mutex mutex_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<T> queue_;
    size_t max_depth_ = 0;
    bool closed_ = false;
};

inline constexpr size_t kDefaultQueueCapacity = 64;

}  // namespace zerops
