#pragma once

// JSON forms of Hamiltonians, plans, reports and experiment configs.
//
//   Hamiltonian: {"n": 4, "terms": [{"coeff": 0.5, "pauli": "XXII"},
//                                   {"coeff": 1.0, "matrix": [[re, im], ...]}]}
//   Plan:        {"method": "qdrift", "t": 2.0, "seed": 7, ...,
//                 "steps": [{"term": 3, "duration": 0.0125, "rescaled": true}]}

#include <string>

#include "json.hpp"
#include "qdrift/experiments.hpp"
#include "qdrift/formulas.hpp"
#include "qdrift/hamiltonian.hpp"
#include "qdrift/metrics.hpp"

namespace qdrift {

using Json = nlohmann::ordered_json;

Json hamiltonian_to_json(const Hamiltonian& h);
Hamiltonian hamiltonian_from_json(const Json& j);

Json plan_to_json(const ProductFormulaPlan& plan);
ProductFormulaPlan plan_from_json(const Json& j);

Json error_report_to_json(const ErrorReport& r);
Json gate_counts_to_json(const GateCounts& c);

Json config_to_json(const ExperimentConfig& cfg);
// Starts from `base` and overrides the keys present in `j`. Unknown keys and
// mistyped values raise ValidationError naming the key.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base);

// {"config": ..., "metrics": {name: {"mean", "std", "count"}}, "version": ...}
Json summary_to_json(const ExperimentConfig& cfg, const ResultTable& table);

}  // namespace qdrift
