#pragma once

#include <cstdint>

namespace isosum {

/// Deterministic multiply-add counts. Identical inputs give identical counts.
struct FlopCounter {
    std::uint64_t block_update = 0;    // B <- B + w phi psi A^(i-1) in assembly
    std::uint64_t accumulate = 0;      // scatter of local results into global storage
    std::uint64_t field_eval = 0;      // recursive evaluation of u and its derivatives
    std::uint64_t pointwise = 0;       // F(x) [d^theta u(x)] products in matrix-free apply
    std::uint64_t apply_contract = 0;  // test-side contraction in matrix-free apply
    std::uint64_t coefficient = 0;     // geometry and coefficient-field construction
    std::uint64_t naive = 0;           // quadrature-oracle terms

    FlopCounter& operator+=(const FlopCounter& o) noexcept {
        block_update += o.block_update;
        accumulate += o.accumulate;
        field_eval += o.field_eval;
        pointwise += o.pointwise;
        apply_contract += o.apply_contract;
        coefficient += o.coefficient;
        naive += o.naive;
        return *this;
    }
    friend bool operator==(const FlopCounter&, const FlopCounter&) = default;
};

}  // namespace isosum
