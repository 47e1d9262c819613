/// @file channel.hpp
/// @brief Bounded, blocking, order-preserving single-producer /
///        single-consumer stream used between pipeline stages.
///
/// Elements move in small batches to keep lock traffic off the hot path;
/// capacity is expressed in elements. A shared RunControl lets a watchdog
/// abort every blocked stage at once.

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace advectflow {

struct RunControl {
    std::atomic<std::uint64_t> progress{0};
    std::atomic<bool> failed{false};
};

class PipelineStalled : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

template <class T>
class Channel {
  public:
    Channel(std::size_t capacity_elements, RunControl* control, std::string name)
        : name_(std::move(name)), control_(control) {
        if (capacity_elements < 1) {
            throw std::invalid_argument("channel capacity must be >= 1");
        }
        batch_size_ = std::min<std::size_t>(capacity_elements, 64);
        max_batches_ = std::max<std::size_t>(1, capacity_elements / batch_size_);
        out_batch_.reserve(batch_size_);
    }

    // --- producer side ---

    void push(T v) {
        out_batch_.push_back(std::move(v));
        if (out_batch_.size() >= batch_size_) {
            send_batch();
        }
    }

    void close() {
        if (!out_batch_.empty()) {
            send_batch();
        }
        {
            std::unique_lock<std::mutex> lock(mu_);
            closed_ = true;
        }
        cv_.notify_all();
    }

    // --- consumer side ---

    /// Returns false once the channel is closed and fully drained.
    bool pop(T& out) {
        if (in_pos_ >= in_batch_.size() && !receive_batch()) {
            return false;
        }
        out = std::move(in_batch_[in_pos_++]);
        return true;
    }

    // --- diagnostics and watchdog hooks ---

    const std::string& name() const { return name_; }
    std::int64_t send_blocks() const { return send_blocks_.load(); }
    std::int64_t recv_blocks() const { return recv_blocks_.load(); }
    std::size_t occupancy() const {
        std::unique_lock<std::mutex> lock(mu_);
        std::size_t n = 0;
        for (const auto& b : queue_) n += b.size();
        return n;
    }

    /// Wakes any blocked end so it can observe a tripped RunControl.
    void interrupt() {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.notify_all();
    }

  private:
    bool failed() const { return control_ && control_->failed.load(); }

    void throw_if_failed() const {
        if (failed()) {
            throw PipelineStalled("pipeline stalled at channel '" + name_ + "'");
        }
    }

    void bump_progress() {
        if (control_) control_->progress.fetch_add(1, std::memory_order_relaxed);
    }

    void send_batch() {
        std::vector<T> batch;
        batch.reserve(batch_size_);
        batch.swap(out_batch_);
        std::unique_lock<std::mutex> lock(mu_);
        if (queue_.size() >= max_batches_) {
            send_blocks_.fetch_add(1, std::memory_order_relaxed);
            cv_.wait(lock, [&] { return queue_.size() < max_batches_ || failed(); });
        }
        throw_if_failed();
        queue_.push_back(std::move(batch));
        lock.unlock();
        cv_.notify_all();
        bump_progress();
    }

    bool receive_batch() {
        std::unique_lock<std::mutex> lock(mu_);
        if (queue_.empty() && !closed_) {
            recv_blocks_.fetch_add(1, std::memory_order_relaxed);
            cv_.wait(lock, [&] { return !queue_.empty() || closed_ || failed(); });
        }
        throw_if_failed();
        if (queue_.empty()) {
            return false;  // closed and drained
        }
        in_batch_ = std::move(queue_.front());
        queue_.pop_front();
        in_pos_ = 0;
        lock.unlock();
        cv_.notify_all();
        bump_progress();
        return true;
    }

    std::string name_;
    RunControl* control_;
    std::size_t batch_size_;
    std::size_t max_batches_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::vector<T>> queue_;
    bool closed_ = false;

    std::vector<T> out_batch_;           // producer-local
    std::vector<T> in_batch_;            // consumer-local
    std::size_t in_pos_ = 0;

    std::atomic<std::int64_t> send_blocks_{0};
    std::atomic<std::int64_t> recv_blocks_{0};
};

}  // namespace advectflow
