#pragma once

#include <cstdint>
#include <queue>
#include <vector>

namespace sfasim {

/// Future-event set. Events pop in lexicographic (time, rank, seq) order;
/// seq is assigned on insertion, so equal (time, rank) pairs pop FIFO.
/// `rank` lets a caller order simultaneous events of different kinds.
template <class Payload>
class EventQueue {
public:
    struct Event {
        double time;
        std::uint64_t rank;
        std::uint64_t seq;
        Payload payload;
    };

    void push(double time, Payload payload, std::uint64_t rank = 0) {
        heap_.push(Event{time, rank, next_seq_++, std::move(payload)});
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    const Event& top() const { return heap_.top(); }

    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        return e;
    }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) {
                return a.time > b.time;
            }
            if (a.rank != b.rank) {
                return a.rank > b.rank;
            }
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace sfasim
