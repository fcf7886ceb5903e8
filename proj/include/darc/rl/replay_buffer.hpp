#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "darc/num/rng.hpp"
#include "darc/num/tensor.hpp"

namespace darc::rl {

/// (s, a, r, s', done). Actions live in [0, 1]^n; for the accident task
/// they are the flattened DualAction (a, p_x, p_y).
struct Transition {
    std::vector<double> s;
    std::vector<double> action;
    double r = 0.0;
    std::vector<double> s_next;
    bool done = false;

    bool operator==(const Transition&) const = default;
};

/// Column-stacked minibatch.
struct Batch {
    num::Tensor s;       // [n, obs_dim]
    num::Tensor action;  // [n, action_dim], entries in [0, 1]
    std::vector<double> r;
    num::Tensor s_next;  // [n, obs_dim]
    std::vector<double> done;  // 1.0 for terminal transitions

    std::size_t size() const { return r.size(); }
};

Batch make_batch(const std::vector<const Transition*>& items);

/// Fixed-capacity FIFO store with uniform sampling (with replacement).
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::uint64_t seed);

    void push(Transition tr);
    /// Throws std::logic_error when empty.
    Batch sample(std::size_t n);

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    /// i-th oldest stored transition.
    const Transition& at(std::size_t i) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // slot of the oldest item once full
    std::vector<Transition> items_;
    num::Rng rng_;
};

}  // namespace darc::rl
