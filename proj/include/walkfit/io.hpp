#pragma once

#include "walkfit/classify.hpp"
#include "walkfit/fit.hpp"
#include "walkfit/moments.hpp"
#include "walkfit/types.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace walkfit {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a `t,x,y` CSV. dt is inferred from the time column, which must be
/// strictly increasing with constant spacing (1e-9 relative tolerance).
/// Throws IoError with a distinct message per failure mode (missing file,
/// malformed header/row, non-finite value, non-uniform grid).
Trajectory read_trajectory(const std::string& path);

/// Writes a `t,x,y` CSV with t = i * dt, LF line endings, and shortest
/// round-trip number formatting. Validates the trajectory before touching
/// the filesystem.
void write_trajectory(const Trajectory& traj, const std::string& path);

/// Moments CSV: header `t_s,m2,m4,n_pairs`, full double precision.
MomentCurve read_moments(const std::string& path);
void write_moments(const MomentCurve& curve, const std::string& path);

/// JSON forms (format_version 1). Parameters are keyed by their CLI flag
/// names: D, vb, lbd, ldb for the intermittent family; tau0, gamma, v for
/// the Levy family.
nlohmann::ordered_json to_json(const FitReport& report);
nlohmann::ordered_json to_json(const ClassificationReport& report);
FitReport fit_report_from_json(const nlohmann::ordered_json& j);
ClassificationReport classification_from_json(const nlohmann::ordered_json& j);

void write_report(const FitReport& report, const std::string& path);
void write_report(const ClassificationReport& report, const std::string& path);
FitReport read_fit_report(const std::string& path);
ClassificationReport read_classification_report(const std::string& path);

} // namespace walkfit
