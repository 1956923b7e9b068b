#include "aedkit/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "aedkit/errors.hpp"

namespace aed {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key))
      throw FormatError("manifest: unknown key '" + key + "' in " + where);
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("manifest: cannot open '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("manifest: '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object()) throw FormatError("manifest: top level must be an object");
  reject_unknown_keys(doc, {"labels", "sample_rate", "recordings"}, "manifest");

  Manifest m;
  m.labels = doc.at("labels").get<std::vector<std::string>>();
  m.sample_rate = doc.value("sample_rate", 0.0);

  const auto base = path.parent_path();
  auto resolve = [&base](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  for (const auto& jr : doc.at("recordings")) {
    reject_unknown_keys(jr, {"audio", "annotations", "label", "id"},
                        "recordings entry");
    ManifestEntry e;
    e.audio = resolve(jr.at("audio").get<std::string>());
    if (jr.contains("annotations"))
      e.annotations = resolve(jr["annotations"].get<std::string>());
    e.label = jr.value("label", "");
    e.id = jr.value("id", e.audio.stem().string());
    if (e.label.empty() && e.annotations.empty())
      throw FormatError("manifest: recording '" + e.id +
                        "' needs a label or an annotations file");
    m.recordings.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  json doc;
  doc["labels"] = manifest.labels;
  if (manifest.sample_rate > 0.0) doc["sample_rate"] = manifest.sample_rate;
  doc["recordings"] = json::array();
  for (const auto& e : manifest.recordings) {
    json jr;
    jr["audio"] = e.audio.string();
    if (!e.annotations.empty()) jr["annotations"] = e.annotations.string();
    if (!e.label.empty()) jr["label"] = e.label;
    jr["id"] = e.id;
    doc["recordings"].push_back(std::move(jr));
  }
  std::ofstream out(path);
  if (!out) throw FormatError("manifest: cannot write '" + path.string() + "'");
  out << doc.dump(2) << "\n";
}

}  // namespace aed
