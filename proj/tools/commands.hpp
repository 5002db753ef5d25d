#pragma once

#include <filesystem>

#include "scenario.hpp"

namespace efl::cli {

RunReport cmd_lattice_info(const ScenarioConfig& cfg,
                           const std::filesystem::path& out);
RunReport cmd_integrate(const ScenarioConfig& cfg,
                        const std::filesystem::path& out);
RunReport cmd_reconstruct(const ScenarioConfig& cfg,
                          const std::filesystem::path& out);
RunReport cmd_oracle(const ScenarioConfig& cfg, const std::filesystem::path& out);
RunReport cmd_boost_check(const ScenarioConfig& cfg,
                          const std::filesystem::path& out);
RunReport cmd_shell_identity(const ScenarioConfig& cfg,
                             const std::filesystem::path& out);
RunReport cmd_residual(const ScenarioConfig& cfg,
                       const std::filesystem::path& out);
RunReport cmd_phase_check(const ScenarioConfig& cfg,
                          const std::filesystem::path& out);
RunReport cmd_verify(const ScenarioConfig& cfg, const std::filesystem::path& out);
RunReport cmd_converge(const ScenarioConfig& cfg,
                       const std::filesystem::path& out);

}  // namespace efl::cli
