#pragma once

#include <cstdint>

namespace tessera {

/// Multiply-accumulate counters for the matrix operations performed while
/// training. Used to compare the computational cost of the model families.
struct OpCounter {
    std::uint64_t forward_macs = 0;
    std::uint64_t backward_macs = 0;
    std::uint64_t update_macs = 0;

    std::uint64_t total() const { return forward_macs + backward_macs + update_macs; }

    OpCounter& operator+=(const OpCounter& o) {
        forward_macs += o.forward_macs;
        backward_macs += o.backward_macs;
        update_macs += o.update_macs;
        return *this;
    }
};

}  // namespace tessera
