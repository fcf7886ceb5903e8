#include "darc/rl/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace darc::rl {

Batch make_batch(const std::vector<const Transition*>& items) {
    if (items.empty()) throw std::invalid_argument("make_batch: no transitions");
    const std::size_t n = items.size();
    const std::size_t obs = items[0]->s.size(), act = items[0]->action.size();
    Batch b;
    b.s = num::Tensor::matrix(n, obs);
    b.s_next = num::Tensor::matrix(n, obs);
    b.action = num::Tensor::matrix(n, act);
    b.r.resize(n);
    b.done.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Transition& tr = *items[i];
        if (tr.s.size() != obs || tr.s_next.size() != obs || tr.action.size() != act) {
            throw std::invalid_argument("make_batch: inconsistent transition sizes");
        }
        std::copy(tr.s.begin(), tr.s.end(), b.s.row(i).begin());
        std::copy(tr.s_next.begin(), tr.s_next.end(), b.s_next.row(i).begin());
        std::copy(tr.action.begin(), tr.action.end(), b.action.row(i).begin());
        b.r[i] = tr.r;
        b.done[i] = tr.done ? 1.0 : 0.0;
    }
    return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
    items_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition tr) {
    if (!items_.empty() &&
        (tr.s.size() != items_[0].s.size() || tr.s_next.size() != tr.s.size() ||
         tr.action.size() != items_[0].action.size())) {
        throw std::invalid_argument("ReplayBuffer::push: transition shape differs from stored ones");
    }
    if (items_.size() < capacity_) {
        items_.push_back(std::move(tr));
        return;
    }
    items_[head_] = std::move(tr);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= items_.size()) throw std::out_of_range("ReplayBuffer::at");
    return items_[(head_ + i) % items_.size()];
}

Batch ReplayBuffer::sample(std::size_t n) {
    if (items_.empty()) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
    std::vector<const Transition*> picked(n);
    for (auto& p : picked) p = &items_[rng_.index(items_.size())];
    return make_batch(picked);
}

}  // namespace darc::rl
