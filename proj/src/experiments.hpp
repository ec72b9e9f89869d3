#pragma once

#include "nvmag/harness.hpp"

namespace nvmag::detail {

/// Fills report.records, report.aggregates and report.attachments for spec.name.
void dispatch(const ExperimentSpec& spec, RunReport& report);

}  // namespace nvmag::detail
