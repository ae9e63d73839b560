#pragma once

#include "reebflow/casimirs.hpp"
#include "reebflow/certificate.hpp"
#include "reebflow/io.hpp"
#include "reebflow/mesh.hpp"
#include "reebflow/steady_triple.hpp"

namespace reebflow {

// JSON forms of module results, as emitted by the CLI.
Json to_json(const MomentTable& t);
Json to_json(const OrbitComparison& c, const MeasuredReebGraph& g1, const MeasuredReebGraph& g2);
Json to_json(const VerificationReport& r);
Json to_json(const GraphCertificate& c);
Json to_json(const BalancedRegion& r);
Json to_json(const CompatibilityReport& r);
Json to_json(const LogFit& f);
// Per-saddle samples and their fitted log coefficients.
Json diagnostics_json(const ExtractionResult& r);
Json to_json(const PushforwardCirculation& p);

}  // namespace reebflow
