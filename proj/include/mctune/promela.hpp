#ifndef MCTUNE_PROMELA_HPP
#define MCTUNE_PROMELA_HPP

#include <string>

#include "mctune/model.hpp"

namespace mctune {

/// Renders the execution model as a self-contained Promela source file with
/// the platform constants substituted, the process definitions, and an ltl
/// block for the over-time property (bound T is a placeholder variable).
///
/// By default the platform is abstracted to one device with one unit, which
/// is how the desk-scale experiments run; full_hierarchy emits the
/// configured nd/nu instead. Generation is deterministic: equal inputs give
/// byte-identical output.
std::string export_promela(const PlatformConfig& platform, const ProblemSpec& problem,
                           bool full_hierarchy = false);

}  // namespace mctune

#endif  // MCTUNE_PROMELA_HPP
