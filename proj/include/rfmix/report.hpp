#pragma once

#include "rfmix/budget.hpp"
#include "rfmix/config.hpp"
#include "rfmix/rbfit.hpp"

#include <json.hpp>

namespace rfmix {

using Json = nlohmann::ordered_json;

// Reals are emitted at round-trip precision; infinities become the strings
// "inf" / "-inf" since JSON has no literal for them.
Json real_json(double x);
Json complex_json(cplx z);

Json to_json(const BudgetReport& r);
Json to_json(const LinearityReport& r);
Json to_json(const IqImbalanceEstimate& e);
Json to_json(const RbFit& f, const RbDataset& data);
Json to_json(const Settings& s);

} // namespace rfmix
