#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "aptwelfare/axioms.hpp"
#include "aptwelfare/config.hpp"
#include "aptwelfare/rationalize.hpp"
#include "aptwelfare/simulate.hpp"
#include "aptwelfare/welfare.hpp"

namespace aptw {

inline constexpr const char* kSchema = "aptwelfare/1";

nlohmann::json to_json(const AxiomReport& r);
nlohmann::json to_json(const std::vector<AxiomReport>& reports);
nlohmann::json to_json(const EVDistribution& d);
nlohmann::json to_json(const ReservationBound& b);
nlohmann::json to_json(const FosdResult& f);
nlohmann::json to_json(const AptRationalization& r);
nlohmann::json to_json(const QRUMPrimitives& q);
nlohmann::json to_json(const EmpiricalEV& e);
nlohmann::json to_json(const RunConfig& c);

/// Applies the keys present in `j` on top of `cfg`; unknown keys are an error.
void apply_config(const nlohmann::json& j, RunConfig& cfg);

/// Population spec:
///   {"kind": "apt", "incomes": [..], "u0_knots": [[y, u], ..] | "linear",
///    "u1_offset": c, "g": {"uniform": [a, b]} | {"knots": [[t, G], ..], "interp": "step"|"linear"}
///                       | {"thresholds": [t, .., "inf"]},
///    "tail_mass": m}
///   {"kind": "qrum", "incomes": [..], "f_knots": [[nu, price], ..] | "eta_uniform": [a, b]}
struct PopulationSpec {
    Population population;
    std::vector<double> incomes;
};
PopulationSpec population_from_json(const nlohmann::json& j);

}  // namespace aptw
