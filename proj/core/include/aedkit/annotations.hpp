#pragma once

#include <filesystem>

#include "aedkit/types.hpp"

namespace aed {

// Plain-text annotations, one event per line: `onset offset label`,
// whitespace-separated, seconds. Blank lines and lines starting with '#'
// are ignored. Parse errors carry the line number.
EventList parse_annotations(const std::filesystem::path& path);
EventList parse_annotation_text(const std::string& text,
                                const std::string& origin = "<string>");

// Writes `onset<TAB>offset<TAB>label` with 6 decimal places.
void write_annotations(const std::filesystem::path& path, const EventList& events);

}  // namespace aed
