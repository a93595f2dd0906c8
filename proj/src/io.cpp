#include "gbs/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gbs {

namespace {

using njson = nlohmann::json;

// Shortest representation that round-trips exactly; shared by every emitter
// so the same value always prints the same bytes.
std::string num_str(double x) { return njson(x).dump(); }

std::string quote(const std::string& s) { return njson(s).dump(); }

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw validation_error(origin + ": " + msg);
}

njson parse_json(const std::string& text, const std::string& origin) {
  try {
    return njson::parse(text);
  } catch (const njson::parse_error& e) {
    fail(origin, std::string("invalid JSON: ") + e.what());
  }
}

const njson& need(const njson& j, const char* key, const std::string& origin) {
  const auto it = j.find(key);
  if (it == j.end()) fail(origin, std::string("missing field '") + key + "'");
  return *it;
}

void check_format_version(const njson& j, const std::string& origin) {
  const njson& v = need(j, "format_version", origin);
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
    fail(origin, "unsupported format_version " + v.dump() + ", expected " +
                     std::to_string(kFormatVersion));
}

Vector get_vector(const njson& j, const char* key, const std::string& origin) {
  const njson& v = need(j, key, origin);
  if (!v.is_array())
    fail(origin, std::string("field '") + key + "' must be an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      fail(origin, std::string("field '") + key + "' entry " + std::to_string(i) +
                       " must be a number");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

Matrix get_matrix(const njson& j, const char* key, const std::string& origin) {
  const njson& v = need(j, key, origin);
  if (!v.is_array() || v.empty())
    fail(origin, std::string("field '") + key + "' must be a non-empty array of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (!v[r].is_array() || v[r].size() != cols)
      fail(origin, std::string("field '") + key + "' row " + std::to_string(r) +
                       " has " + (v[r].is_array() ? std::to_string(v[r].size()) : "no") +
                       " entries, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) {
      if (!v[r][c].is_number())
        fail(origin, std::string("field '") + key + "' entry (" + std::to_string(r) +
                         ", " + std::to_string(c) + ") must be a number");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          v[r][c].get<double>();
    }
  }
  return out;
}

// Lines of a text file with 1-based numbering; keeps empty lines so numbers
// in error messages match the editor's.
std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string::size_type start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto end = line.find(',', start);
    if (end == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, end - start)));
    start = end + 1;
  }
  return fields;
}

bool try_parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && !s.empty();
}

double field_double(const std::string& s, const std::string& origin, int line,
                    int field) {
  double v = 0;
  if (!try_parse_double(s, v))
    fail(origin, "line " + std::to_string(line) + ", field " + std::to_string(field) +
                     ": not a number: '" + s + "'");
  if (!std::isfinite(v))
    fail(origin, "line " + std::to_string(line) + ", field " + std::to_string(field) +
                     ": value must be finite");
  return v;
}

int field_int(const std::string& s, const std::string& origin, int line, int field) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    fail(origin, "line " + std::to_string(line) + ", field " + std::to_string(field) +
                     ": not an integer: '" + s + "'");
  return v;
}

std::string lower_ext(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

Graph make_graph(Matrix a, const std::string& origin) {
  // Pre-checks duplicate the Graph invariants so messages can carry the
  // offending indices and the file name.
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0.0)
      fail(origin, "adjacency diagonal must be zero, got " + num_str(a(i, i)) +
                       " at (" + std::to_string(i) + ", " + std::to_string(i) + ")");
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-8)
        fail(origin, "adjacency asymmetric at (" + std::to_string(i) + ", " +
                         std::to_string(j) + "): " + num_str(a(i, j)) + " vs " +
                         num_str(a(j, i)));
  }
  try {
    return Graph(std::move(a));
  } catch (const validation_error& e) {
    fail(origin, e.what());
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw validation_error("cannot read file: " + path);
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw resource_error("cannot write file: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw resource_error("cannot write file: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw resource_error("cannot move " + tmp + " into place: " + ec.message());
  }
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

Graph parse_graph_json(const std::string& text, const std::string& origin) {
  const njson j = parse_json(text, origin);
  if (!j.is_object()) fail(origin, "top level must be a JSON object");
  check_format_version(j, origin);
  Matrix a = get_matrix(j, "adjacency", origin);
  if (a.rows() != a.cols())
    fail(origin, "adjacency must be square, got " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()));
  return make_graph(std::move(a), origin);
}

Graph parse_edge_csv(const std::string& text, const std::string& origin) {
  const auto lines = split_lines(text);
  std::map<std::pair<int, int>, double> edges;
  std::map<std::pair<int, int>, int> first_seen;
  int max_node = -1;
  bool saw_data = false;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int lineno = int(li) + 1;
    const std::string line = trim(lines[li]);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (!saw_data) {
      // A leading non-numeric line is treated as a header and skipped.
      double probe = 0;
      if (!try_parse_double(fields[0], probe)) continue;
    }
    if (fields.size() != 2 && fields.size() != 3)
      fail(origin, "line " + std::to_string(lineno) + ": expected 'u,v' or 'u,v,weight', got " +
                       std::to_string(fields.size()) + " fields");
    saw_data = true;
    const int u = field_int(fields[0], origin, lineno, 1);
    const int v = field_int(fields[1], origin, lineno, 2);
    if (u < 0 || v < 0)
      fail(origin, "line " + std::to_string(lineno) + ": node indices must be nonnegative");
    if (u == v)
      fail(origin, "line " + std::to_string(lineno) + ": self loop at node " +
                       std::to_string(u));
    const double w =
        fields.size() == 3 ? field_double(fields[2], origin, lineno, 3) : 1.0;
    if (w < 0.0)
      fail(origin, "line " + std::to_string(lineno) + ": edge weight must be nonnegative");
    const std::pair<int, int> key{std::min(u, v), std::max(u, v)};
    const auto it = edges.find(key);
    if (it != edges.end()) {
      if (it->second != w)
        fail(origin, "line " + std::to_string(lineno) + ": edge (" +
                         std::to_string(key.first) + ", " + std::to_string(key.second) +
                         ") already given weight " + num_str(it->second) + " on line " +
                         std::to_string(first_seen[key]));
    } else {
      edges[key] = w;
      first_seen[key] = lineno;
    }
    max_node = std::max(max_node, std::max(u, v));
  }
  if (!saw_data) fail(origin, "no edges found");
  Matrix a = Matrix::Zero(max_node + 1, max_node + 1);
  for (const auto& [key, w] : edges) {
    a(key.first, key.second) = w;
    a(key.second, key.first) = w;
  }
  return make_graph(std::move(a), origin);
}

Graph ingest_graph(const std::string& path) {
  const std::string ext = lower_ext(path);
  const std::string text = read_file(path);
  if (ext == ".json") return parse_graph_json(text, path);
  if (ext == ".csv") return parse_edge_csv(text, path);
  throw validation_error(path + ": unsupported graph extension '" + ext +
                         "' (expected .json or .csv)");
}

std::string graph_json(const Graph& g) {
  const Matrix& a = g.adjacency.entries;
  std::string out;
  out += "{\n";
  out += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";
  out += "  \"kind\": \"graph\",\n";
  out += "  \"nodes\": " + std::to_string(g.nodes()) + ",\n";
  out += "  \"adjacency\": [\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    out += "    [";
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out += ", ";
      out += num_str(a(i, j));
    }
    out += i + 1 < a.rows() ? "],\n" : "]\n";
  }
  out += "  ]\n";
  out += "}\n";
  return out;
}

std::string samples_jsonl(const SampleBatch& batch) {
  std::string out;
  out += "{\"format_version\":" + std::to_string(kFormatVersion) +
         ",\"kind\":\"samples\",\"modes\":" + std::to_string(batch.modes) +
         ",\"threshold\":" + (batch.threshold ? "true" : "false") +
         ",\"count\":" + std::to_string(batch.samples.size()) + "}\n";
  const char* detector = batch.threshold ? "threshold" : "pnr";
  for (const PhotonPattern& s : batch.samples) {
    out += "{\"pattern\":[";
    for (std::size_t i = 0; i < s.counts.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(s.counts[i]);
    }
    out += "],\"k\":" + std::to_string(s.total()) + ",\"detector\":\"" + detector +
           "\"}\n";
  }
  return out;
}

SampleBatch parse_samples_jsonl(const std::string& text, const std::string& origin) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(origin, "empty samples file");
  const njson header = parse_json(lines[0], origin + ": line 1");
  check_format_version(header, origin);
  const njson& kind = need(header, "kind", origin);
  if (!kind.is_string() || kind.get<std::string>() != "samples")
    fail(origin, "kind must be \"samples\", got " + kind.dump());
  const njson& jm = need(header, "modes", origin);
  if (!jm.is_number_integer() || jm.get<int>() < 1)
    fail(origin, "modes must be a positive integer");
  const int modes = jm.get<int>();
  const njson& jt = need(header, "threshold", origin);
  if (!jt.is_boolean()) fail(origin, "threshold must be a boolean");
  const bool threshold = jt.get<bool>();
  const njson& jc = need(header, "count", origin);
  if (!jc.is_number_integer() || jc.get<int>() < 0)
    fail(origin, "count must be a nonnegative integer");
  const int count = jc.get<int>();
  if (int(lines.size()) - 1 != count)
    fail(origin, "header promises " + std::to_string(count) + " samples, found " +
                     std::to_string(lines.size() - 1));

  SampleBatch batch;
  batch.modes = modes;
  batch.threshold = threshold;
  batch.samples.reserve(static_cast<std::size_t>(count));
  const std::string want_detector = threshold ? "threshold" : "pnr";
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string where = origin + ": line " + std::to_string(li + 1);
    const njson j = parse_json(lines[li], where);
    const njson& jp = need(j, "pattern", where);
    if (!jp.is_array() || int(jp.size()) != modes)
      fail(where, "pattern must have " + std::to_string(modes) + " entries, got " +
                      (jp.is_array() ? std::to_string(jp.size()) : jp.dump()));
    std::vector<int> counts(static_cast<std::size_t>(modes));
    for (int i = 0; i < modes; ++i) {
      if (!jp[std::size_t(i)].is_number_integer())
        fail(where, "pattern entry " + std::to_string(i) + " must be an integer");
      counts[std::size_t(i)] = jp[std::size_t(i)].get<int>();
      if (counts[std::size_t(i)] < 0)
        fail(where, "pattern entry " + std::to_string(i) + " must be nonnegative");
      if (threshold && counts[std::size_t(i)] > 1)
        fail(where, "threshold pattern entries must be 0 or 1, got " +
                        std::to_string(counts[std::size_t(i)]));
    }
    const int total = std::accumulate(counts.begin(), counts.end(), 0);
    const njson& jk = need(j, "k", where);
    if (!jk.is_number_integer() || jk.get<int>() != total)
      fail(where, "k is " + jk.dump() + " but the pattern sums to " +
                      std::to_string(total));
    const njson& jd = need(j, "detector", where);
    if (!jd.is_string() || jd.get<std::string>() != want_detector)
      fail(where, "detector must be \"" + want_detector + "\", got " + jd.dump());
    batch.samples.emplace_back(std::move(counts));
  }
  return batch;
}

StateSpace parse_points_csv(const std::string& text, const std::string& origin) {
  const auto lines = split_lines(text);
  std::vector<std::vector<double>> rows;
  Eigen::Index dim = -1;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int lineno = int(li) + 1;
    const std::string line = trim(lines[li]);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (rows.empty()) {
      double probe = 0;
      if (!try_parse_double(fields[0], probe)) continue;  // header row
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f)
      row.push_back(field_double(fields[f], origin, lineno, int(f) + 1));
    if (dim < 0) dim = Eigen::Index(row.size());
    if (Eigen::Index(row.size()) != dim)
      fail(origin, "line " + std::to_string(lineno) + " has " +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(dim));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(origin, "no points found");
  Matrix coords(Eigen::Index(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      coords(Eigen::Index(r), c) = rows[r][std::size_t(c)];
  try {
    return StateSpace(std::move(coords));
  } catch (const validation_error& e) {
    fail(origin, e.what());
  }
}

StateSpace ingest_points(const std::string& path) {
  return parse_points_csv(read_file(path), path);
}

VibronicInput parse_vibronic_json(const std::string& text,
                                  const std::string& origin) {
  const njson j = parse_json(text, origin);
  if (!j.is_object()) fail(origin, "top level must be a JSON object");
  check_format_version(j, origin);
  Vector w = get_vector(j, "w", origin);
  Vector wp = get_vector(j, "wp", origin);
  Matrix ud = get_matrix(j, "Ud", origin);
  Vector delta = get_vector(j, "delta", origin);
  const njson& jt = need(j, "T", origin);
  if (!jt.is_number()) fail(origin, "field 'T' must be a number");
  try {
    return VibronicInput(std::move(w), std::move(wp), std::move(ud),
                         std::move(delta), jt.get<double>());
  } catch (const validation_error& e) {
    fail(origin, e.what());
  }
}

VibronicInput ingest_vibronic(const std::string& path) {
  return parse_vibronic_json(read_file(path), path);
}

std::string subgraph_json(const DenseSubgraphResult& result) {
  std::string out;
  out += "{\n";
  out += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";
  out += "  \"kind\": \"dense-subgraphs\",\n";
  out += "  \"results\": {";
  bool first_size = true;
  for (const auto& [size, entries] : result.by_size) {
    out += first_size ? "\n" : ",\n";
    first_size = false;
    out += "    \"" + std::to_string(size) + "\": [";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out += i ? ",\n      " : "\n      ";
      out += "{\"density\": " + num_str(entries[i].first) + ", \"nodes\": [";
      for (std::size_t k = 0; k < entries[i].second.size(); ++k) {
        if (k) out += ", ";
        out += std::to_string(entries[i].second[k]);
      }
      out += "]}";
    }
    out += entries.empty() ? "]" : "\n    ]";
  }
  out += first_size ? "}\n" : "\n  }\n";
  out += "}\n";
  return out;
}

std::string clique_json(const std::vector<std::vector<int>>& cliques) {
  std::vector<std::vector<int>> sorted = cliques;
  for (auto& c : sorted) std::sort(c.begin(), c.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::string out;
  out += "{\n";
  out += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";
  out += "  \"kind\": \"cliques\",\n";
  out += "  \"count\": " + std::to_string(sorted.size()) + ",\n";
  out += "  \"cliques\": [";
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += "{\"size\": " + std::to_string(sorted[i].size()) + ", \"nodes\": [";
    for (std::size_t k = 0; k < sorted[i].size(); ++k) {
      if (k) out += ", ";
      out += std::to_string(sorted[i][k]);
    }
    out += "]}";
  }
  out += sorted.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

std::string spectrum_csv(const Spectrum& s) {
  const int bins = int(s.counts.size());
  std::string out;
  out += "# format_version: " + std::to_string(kFormatVersion) + "\n";
  out += "bin_center,count,intensity\n";
  for (int b = 0; b < bins; ++b) {
    const double center = 0.5 * (s.edges(b) + s.edges(b + 1));
    // The broadened profile is tabulated on 4 subintervals per bin, so the
    // center of bin b is grid point 4b + 2.
    out += num_str(center) + "," + std::to_string(s.counts[std::size_t(b)]) + "," +
           num_str(s.intensity(4 * b + 2)) + "\n";
  }
  return out;
}

std::string feature_csv(const std::vector<std::string>& ids,
                        const std::vector<FeatureVector>& features) {
  if (ids.size() != features.size())
    throw validation_error("feature_csv: ids and features must align");
  if (features.empty()) throw validation_error("feature_csv: nothing to emit");
  const auto& events = features[0].events;
  if (events.empty()) throw validation_error("feature_csv: empty event list");
  for (const FeatureVector& f : features) {
    if (f.events.size() != events.size() || f.values.size() != events.size())
      throw validation_error("feature_csv: feature vectors must share one event list");
    for (std::size_t i = 0; i < events.size(); ++i)
      if (f.events[i].k != events[i].k || f.events[i].n_max != events[i].n_max)
        throw validation_error("feature_csv: feature vectors must share one event list");
  }
  for (const std::string& id : ids)
    if (id.find(',') != std::string::npos || id.find('\n') != std::string::npos)
      throw validation_error("feature_csv: graph id contains a comma or newline: " + id);
  std::string out;
  out += "# format_version: " + std::to_string(kFormatVersion) + "\n";
  out += "# p_k<k>_n<n_max>: probability of k total photons with at most n_max per mode\n";
  out += "graph";
  for (const Event& e : events)
    out += ",p_k" + std::to_string(e.k) + "_n" + std::to_string(e.n_max);
  out += "\n";
  for (std::size_t g = 0; g < features.size(); ++g) {
    out += ids[g];
    for (const double v : features[g].values) out += "," + num_str(v);
    out += "\n";
  }
  return out;
}

namespace {

std::string fixed2(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  // Avoid the two spellings of zero so output bytes are stable.
  if (std::string(buf) == "-0.00") return "0.00";
  return buf;
}

std::string svg_open(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) +
         " " + std::to_string(h) + "\">\n<rect width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(h) + "\" fill=\"#ffffff\"/>\n";
}

constexpr const char* kBaseColor = "#4477aa";
constexpr const char* kMutedColor = "#9db8cc";
constexpr const char* kHighlightColor = "#cc3311";

}  // namespace

std::string svg_graph(const Graph& g, const std::vector<int>& highlight) {
  const int n = g.nodes();
  std::set<int> marked;
  for (const int v : highlight) {
    if (v < 0 || v >= n)
      throw validation_error("svg_graph: highlight node " + std::to_string(v) +
                             " out of range");
    marked.insert(v);
  }
  const double cx = 200, cy = 200, radius = 160;
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<double> ys(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * M_PI * i / std::max(1, n) - M_PI / 2.0;
    xs[std::size_t(i)] = cx + radius * std::cos(theta);
    ys[std::size_t(i)] = cy + radius * std::sin(theta);
  }
  std::string out = svg_open(400, 400);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!g.has_edge(i, j)) continue;
      const bool hot = marked.count(i) && marked.count(j);
      out += "<line x1=\"" + fixed2(xs[std::size_t(i)]) + "\" y1=\"" +
             fixed2(ys[std::size_t(i)]) + "\" x2=\"" + fixed2(xs[std::size_t(j)]) +
             "\" y2=\"" + fixed2(ys[std::size_t(j)]) + "\" stroke=\"" +
             (hot ? kHighlightColor : "#c8c8c8") + "\" stroke-width=\"" +
             (hot ? "2.5" : "1") + "\"/>\n";
    }
  for (int i = 0; i < n; ++i) {
    const bool hot = marked.count(i) > 0;
    out += "<circle cx=\"" + fixed2(xs[std::size_t(i)]) + "\" cy=\"" +
           fixed2(ys[std::size_t(i)]) + "\" r=\"9\" fill=\"" +
           (hot ? kHighlightColor : kBaseColor) + "\"/>\n";
    out += "<text x=\"" + fixed2(xs[std::size_t(i)]) + "\" y=\"" +
           fixed2(ys[std::size_t(i)] + 3.0) +
           "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"8\" "
           "fill=\"#ffffff\">" +
           std::to_string(i) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string svg_points(const StateSpace& space, const std::vector<int>& counts) {
  const int n = space.points();
  if (!counts.empty() && int(counts.size()) != n)
    throw validation_error("svg_points: counts must have one entry per point");
  for (const int c : counts)
    if (c < 0) throw validation_error("svg_points: counts must be nonnegative");
  Vector x = space.coords.col(0);
  Vector y = space.dim() >= 2 ? Vector(space.coords.col(1)) : Vector(Vector::Zero(n));
  const double x_lo = x.minCoeff(), x_hi = x.maxCoeff();
  const double y_lo = y.minCoeff(), y_hi = y.maxCoeff();
  const double x_span = x_hi > x_lo ? x_hi - x_lo : 1.0;
  const double y_span = y_hi > y_lo ? y_hi - y_lo : 1.0;
  const double lo_px = 30, hi_px = 370;
  std::string out = svg_open(400, 400);
  for (int i = 0; i < n; ++i) {
    const double px = lo_px + (x(i) - x_lo) / x_span * (hi_px - lo_px);
    const double py = hi_px - (y(i) - y_lo) / y_span * (hi_px - lo_px);
    const int c = counts.empty() ? 0 : counts[std::size_t(i)];
    const double r = c > 0 ? std::min(4.0 + 2.0 * (c - 1), 10.0) : 4.0;
    out += "<circle cx=\"" + fixed2(px) + "\" cy=\"" + fixed2(py) + "\" r=\"" +
           fixed2(r) + "\" fill=\"" + (c > 0 ? kHighlightColor : kMutedColor) +
           "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string svg_spectrum(const Spectrum& s) {
  const int bins = int(s.counts.size());
  const double left = 50, top = 20, plot_w = 570, plot_h = 300;
  const double lo = s.edges(0), hi = s.edges(bins);
  int max_count = 0;
  for (const int c : s.counts) max_count = std::max(max_count, c);
  const double max_int = s.intensity.size() ? s.intensity.maxCoeff() : 0.0;
  std::string out = svg_open(640, 360);
  // One bar per histogram bin, zero-height bars included.
  for (int b = 0; b < bins; ++b) {
    const double x0 = left + plot_w * (s.edges(b) - lo) / (hi - lo);
    const double x1 = left + plot_w * (s.edges(b + 1) - lo) / (hi - lo);
    const double h =
        max_count > 0 ? plot_h * s.counts[std::size_t(b)] / max_count : 0.0;
    out += "<rect x=\"" + fixed2(x0 + 0.5) + "\" y=\"" + fixed2(top + plot_h - h) +
           "\" width=\"" + fixed2(std::max(x1 - x0 - 1.0, 0.5)) + "\" height=\"" +
           fixed2(h) + "\" fill=\"" + kMutedColor + "\"/>\n";
  }
  out += "<polyline fill=\"none\" stroke=\"" + std::string(kHighlightColor) +
         "\" stroke-width=\"1.5\" points=\"";
  for (Eigen::Index i = 0; i < s.grid.size(); ++i) {
    if (i) out += " ";
    const double px = left + plot_w * (s.grid(i) - lo) / (hi - lo);
    const double py =
        top + plot_h * (1.0 - (max_int > 0 ? s.intensity(i) / max_int : 0.0));
    out += fixed2(px) + "," + fixed2(py);
  }
  out += "\"/>\n";
  out += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top + plot_h) +
         "\" x2=\"" + fixed2(left + plot_w) + "\" y2=\"" + fixed2(top + plot_h) +
         "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  char lo_buf[40], hi_buf[40];
  std::snprintf(lo_buf, sizeof lo_buf, "%.6g", lo);
  std::snprintf(hi_buf, sizeof hi_buf, "%.6g", hi);
  out += "<text x=\"" + fixed2(left) + "\" y=\"" + fixed2(top + plot_h + 18) +
         "\" font-family=\"monospace\" font-size=\"11\" fill=\"#333333\">" + lo_buf +
         "</text>\n";
  out += "<text x=\"" + fixed2(left + plot_w) + "\" y=\"" + fixed2(top + plot_h + 18) +
         "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" "
         "fill=\"#333333\">" +
         hi_buf + "</text>\n";
  out += "</svg>\n";
  return out;
}

std::string manifest_json(const RunManifest& m) {
  auto flags = m.flags;
  std::sort(flags.begin(), flags.end());
  auto inputs = m.inputs;
  std::sort(inputs.begin(), inputs.end());
  std::string out;
  out += "{\n";
  out += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";
  out += "  \"artifact_version\": " + quote(kArtifactVersion) + ",\n";
  out += "  \"subcommand\": " + quote(m.subcommand) + ",\n";
  out += "  \"flags\": {";
  for (std::size_t i = 0; i < flags.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += quote(flags[i].first) + ": " + quote(flags[i].second);
  }
  out += flags.empty() ? "},\n" : "\n  },\n";
  out += "  \"inputs\": {";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += quote(inputs[i].first) + ": " + quote(inputs[i].second);
  }
  out += inputs.empty() ? "},\n" : "\n  },\n";
  out += "  \"outputs\": [";
  for (std::size_t i = 0; i < m.outputs.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += quote(m.outputs[i]);
  }
  out += m.outputs.empty() ? "],\n" : "\n  ],\n";
  out += "  \"wall_ms\": " + std::to_string(m.wall_ms) + "\n";
  out += "}\n";
  return out;
}

void write_manifest(const std::string& out_path, const RunManifest& m) {
  write_file_atomic(out_path + ".manifest.json", manifest_json(m));
}

}  // namespace gbs
