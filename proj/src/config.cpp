#include "aptwelfare/config.hpp"

#include "aptwelfare/errors.hpp"

namespace aptw {

void RunConfig::validate() const {
    if (!(eq_tol > 0.0)) throw DomainError("eq_tol must be > 0");
    if (!(jump_threshold > 0.0)) throw DomainError("jump_threshold must be > 0");
    if (!(continuity_modulus > 0.0)) throw DomainError("continuity_modulus must be > 0");
    if (quantile_mesh == 0) throw DomainError("quantile mesh must be > 0");
    if (!(bisection_tol > 0.0)) throw DomainError("bisection tolerance must be > 0");
    if (bisection_max_iter <= 0) throw DomainError("bisection max iterations must be > 0");
}

}  // namespace aptw
