#pragma once

#include <filesystem>
#include <string>

#include "evmaas/milp_model.hpp"

namespace evmaas {

/// Free-format MPS (minimize). Integer columns sit between MARKER
/// INTORG/INTEND lines; all bounds go to the BOUNDS section. Numbers are
/// written in shortest round-trip form, so re-reading reproduces every
/// coefficient exactly.
std::string to_mps(const MILPModel& model, const std::string& name = "EVMAAS");
void write_mps(const MILPModel& model, const std::filesystem::path& path);

}  // namespace evmaas
