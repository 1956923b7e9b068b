#include "aedkit/container_io.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "aedkit/errors.hpp"

namespace aed {

namespace {

using nlohmann::json;

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& in, const std::string& what) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8))
    throw FormatError("container: truncated " + what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void put_f64_block(std::ostream& out, const double* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, data + i, 8);
    put_u64(out, bits);
  }
}

void get_f64_block(std::istream& in, double* data, std::size_t count,
                   const std::string& what) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t bits = get_u64(in, what);
    std::memcpy(data + i, &bits, 8);
  }
}

void check_magic(std::istream& in, const char* magic, const std::string& path) {
  char buf[8];
  if (!in.read(buf, 8) || std::memcmp(buf, magic, 8) != 0)
    throw FormatError("container: '" + path + "' is not a " +
                      std::string(magic, 8) + " file");
}

std::filesystem::path tags_path(const std::filesystem::path& dict_path) {
  return std::filesystem::path(dict_path.string() + ".tags.jsonl");
}

}  // namespace

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("container: cannot write '" + path.string() + "'");
  out.write("AEDKMAT1", 8);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  put_f64_block(out, m.data(), static_cast<std::size_t>(m.size()));
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("container: cannot open '" + path.string() + "'");
  check_magic(in, "AEDKMAT1", path.string());
  const auto rows = static_cast<Eigen::Index>(get_u64(in, "matrix dims"));
  const auto cols = static_cast<Eigen::Index>(get_u64(in, "matrix dims"));
  if (rows < 0 || cols < 0 || rows * cols > (1LL << 32))
    throw FormatError("container: implausible matrix dims in '" + path.string() + "'");
  Matrix m(rows, cols);
  get_f64_block(in, m.data(), static_cast<std::size_t>(m.size()), "matrix data");
  return m;
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw FormatError("container: cannot write '" + path.string() + "'");
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

void save_gmm(const std::filesystem::path& path, const GmmModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("container: cannot write '" + path.string() + "'");
  out.write("AEDKGMM1", 8);
  const auto k = static_cast<std::uint64_t>(m.components());
  const auto d = static_cast<std::uint64_t>(m.dim());
  put_u64(out, k);
  put_u64(out, d);
  put_f64_block(out, m.weights.data(), k);
  // row per component, row-major so each component's vector is contiguous
  for (std::uint64_t c = 0; c < k; ++c) {
    const Vector row = m.means.row(static_cast<Eigen::Index>(c)).transpose();
    put_f64_block(out, row.data(), d);
  }
  for (std::uint64_t c = 0; c < k; ++c) {
    const Vector row = m.variances.row(static_cast<Eigen::Index>(c)).transpose();
    put_f64_block(out, row.data(), d);
  }
}

GmmModel load_gmm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("container: cannot open '" + path.string() + "'");
  check_magic(in, "AEDKGMM1", path.string());
  const auto k = static_cast<Eigen::Index>(get_u64(in, "gmm dims"));
  const auto d = static_cast<Eigen::Index>(get_u64(in, "gmm dims"));
  if (k < 1 || d < 1 || k * d > (1LL << 28))
    throw FormatError("container: implausible gmm dims in '" + path.string() + "'");
  GmmModel m;
  m.weights.resize(k);
  get_f64_block(in, m.weights.data(), static_cast<std::size_t>(k), "gmm weights");
  m.means.resize(k, d);
  m.variances.resize(k, d);
  Vector row(d);
  for (Eigen::Index c = 0; c < k; ++c) {
    get_f64_block(in, row.data(), static_cast<std::size_t>(d), "gmm means");
    m.means.row(c) = row.transpose();
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    get_f64_block(in, row.data(), static_cast<std::size_t>(d), "gmm variances");
    m.variances.row(c) = row.transpose();
  }
  return m;
}

void save_dictionary(const std::filesystem::path& path, const Dictionary& d) {
  save_matrix(path, d.basis);
  std::ofstream out(tags_path(path));
  if (!out)
    throw FormatError("container: cannot write '" + tags_path(path).string() + "'");
  json meta;
  meta["labels"] = d.event_labels;
  out << meta.dump() << "\n";
  for (const auto& t : d.tags) {
    json rec;
    rec["event"] = t.event;
    rec["cluster"] = t.cluster;
    rec["index"] = t.index;
    rec["label"] = t.event >= 0 &&
                           t.event < static_cast<int>(d.event_labels.size())
                       ? d.event_labels[static_cast<std::size_t>(t.event)]
                       : "";
    out << rec.dump() << "\n";
  }
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  Dictionary d;
  d.basis = load_matrix(path);
  std::ifstream in(tags_path(path));
  if (!in)
    throw FormatError("container: missing tag sidecar '" +
                      tags_path(path).string() + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(tags_path(path).string() + ":" +
                        std::to_string(line_no) + ": " + e.what());
    }
    if (line_no == 1 && rec.contains("labels")) {
      d.event_labels = rec["labels"].get<std::vector<std::string>>();
      continue;
    }
    AtomTag t;
    t.event = rec.at("event").get<int>();
    t.cluster = rec.at("cluster").get<int>();
    t.index = rec.at("index").get<int>();
    d.tags.push_back(t);
  }
  if (static_cast<Eigen::Index>(d.tags.size()) != d.basis.cols())
    throw FormatError("container: tag count does not match atom count for '" +
                      path.string() + "'");
  return d;
}

void save_model(const std::filesystem::path& path, const ClassifierModel& m) {
  json doc;
  doc["format"] = "aedkit-model";
  doc["version"] = 1;
  doc["labels"] = m.event_labels;
  doc["scaling"] = to_string(m.scaling);
  doc["dict_fingerprint"] = m.dict_fingerprint;
  doc["skipped_events"] = m.skipped_events;
  if (m.scaling == FeatureScaling::PerDimMax) {
    std::vector<double> div(m.scale_divisors.data(),
                            m.scale_divisors.data() + m.scale_divisors.size());
    doc["scale_divisors"] = div;
  }
  doc["classifiers"] = json::array();
  for (const auto& c : m.classifiers) {
    json jc;
    jc["event"] = c.event;
    jc["bias"] = c.bias;
    jc["weights"] =
        std::vector<double>(c.weights.data(), c.weights.data() + c.weights.size());
    doc["classifiers"].push_back(std::move(jc));
  }
  std::ofstream out(path);
  if (!out) throw FormatError("model: cannot write '" + path.string() + "'");
  out << doc.dump(2) << "\n";
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("model: cannot open '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("model: '" + path.string() + "': " + e.what());
  }
  if (doc.value("format", "") != "aedkit-model")
    throw FormatError("model: '" + path.string() + "' is not an aedkit model");
  ClassifierModel m;
  m.event_labels = doc.at("labels").get<std::vector<std::string>>();
  m.scaling = scaling_from_string(doc.at("scaling").get<std::string>());
  m.dict_fingerprint = doc.value("dict_fingerprint", "");
  m.skipped_events = doc.value("skipped_events", std::vector<int>{});
  if (doc.contains("scale_divisors")) {
    const auto div = doc["scale_divisors"].get<std::vector<double>>();
    m.scale_divisors =
        Eigen::Map<const Vector>(div.data(), static_cast<Eigen::Index>(div.size()));
  }
  for (const auto& jc : doc.at("classifiers")) {
    LinearClassifier c;
    c.event = jc.at("event").get<int>();
    c.bias = jc.at("bias").get<double>();
    const auto w = jc.at("weights").get<std::vector<double>>();
    c.weights =
        Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
    m.classifiers.push_back(std::move(c));
  }
  return m;
}

}  // namespace aed
