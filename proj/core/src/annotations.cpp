#include "aedkit/annotations.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aedkit/errors.hpp"

namespace aed {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

EventList parse_annotation_text(const std::string& text,
                                const std::string& origin) {
  EventList events;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;

    std::istringstream ls(stripped);
    double onset = 0.0, offset = 0.0;
    if (!(ls >> onset >> offset))
      throw FormatError(origin + ":" + std::to_string(line_no) +
                        ": expected `onset offset label`");
    std::string label;
    std::getline(ls, label);
    label = trim(label);
    if (label.empty())
      throw FormatError(origin + ":" + std::to_string(line_no) +
                        ": missing event label");
    if (!(onset < offset))
      throw FormatError(origin + ":" + std::to_string(line_no) +
                        ": onset must be < offset");
    events.push_back({onset, offset, label});
  }
  return events;
}

EventList parse_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw FormatError("annotations: cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_annotation_text(buf.str(), path.string());
}

void write_annotations(const std::filesystem::path& path,
                       const EventList& events) {
  std::ofstream out(path);
  if (!out)
    throw FormatError("annotations: cannot write '" + path.string() + "'");
  char buf[64];
  for (const auto& ev : events) {
    std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t", ev.onset, ev.offset);
    out << buf << ev.label << "\n";
  }
}

}  // namespace aed
