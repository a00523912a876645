#pragma once

#include <string>

#include "json.hpp"

#include "mfpkit/categorize.hpp"
#include "mfpkit/glm.hpp"
#include "mfpkit/mfp.hpp"
#include "mfpkit/model.hpp"
#include "mfpkit/resample.hpp"
#include "mfpkit/selection.hpp"
#include "mfpkit/shrinkage.hpp"
#include "mfpkit/simlab.hpp"

namespace mfpkit::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Non-finite values become null.
Json number(double value);

Json to_json(const Term& term);
Json to_json(const ModelSpec& spec);
Json to_json(const FitResult& fit);
Json to_json(const StepTest& test);
Json to_json(const FunctionDecision& decision);
Json to_json(const SpikeDecision& decision);
Json to_json(const VariableDecision& decision);
Json to_json(const MfpResult& result);
Json to_json(const SelectionTrace& trace);
Json to_json(const ScreenResult& screen);
Json to_json(const StabilityReport& report);
Json to_json(const BifSelection& selection);
Json to_json(const ShrinkageFactors& factors);
Json to_json(const Type1Result& result);
Json to_json(const simlab::SelectionScore& score);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const Json& report);

/// Human-readable report. Every number shown is read from `report`, so the
/// text can be regenerated from the parsed JSON file.
std::string render_text(const Json& report);

}  // namespace mfpkit::cli
