#pragma once

#include <cstddef>
#include <cstdint>

namespace aptw {

struct RunConfig {
    double eq_tol = 1e-9;
    double jump_threshold = 0.05;
    double continuity_modulus = 10.0;  // max q drop per unit price (B-QRUM proxy)
    std::size_t quantile_mesh = 1024;
    double bisection_tol = 1e-9;
    int bisection_max_iter = 200;
    std::uint64_t seed = 20240101;
    bool exact_grid = false;

    // Throws DomainError if any tolerance is non-positive.
    void validate() const;
};

}  // namespace aptw
