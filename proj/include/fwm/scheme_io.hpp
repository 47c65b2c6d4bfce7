#ifndef FWM_SCHEME_IO_HPP
#define FWM_SCHEME_IO_HPP

#include <string>

#include <fwm/liouville.hpp>

/// JSON import/export of level schemes and drive assignments.
namespace fwm::liouville {

std::string dump_level_scheme(const LevelScheme &scheme);
/// Throws ConfigurationError on malformed documents or broken invariants.
LevelScheme parse_level_scheme(const std::string &text);

std::string dump_drive_assignment(const DriveAssignment &drives);
DriveAssignment parse_drive_assignment(const std::string &text);

} // namespace fwm::liouville

#endif
