#include "bsq/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bsq/errors.hpp"

namespace bsq {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), r.ptr};
}

std::string csv_escape(std::string_view f) {
  if (f.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(f);
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { emit(header); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw std::logic_error("csv row width does not match the header");
  emit(fields);
}

void CsvWriter::emit(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    out_ += csv_escape(fields[i]);
  }
  out_ += "\r\n";
}

std::string sha1_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("sha1 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string git_blob_sha1(std::string_view bytes) {
  std::string buf = "blob " + std::to_string(bytes.size());
  buf.push_back('\0');
  buf.append(bytes);
  return sha1_hex(buf);
}

std::string file_blob_sha1(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return git_blob_sha1(ss.str());
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["params"] = m.params;
  j["inputs"] = m.inputs;
  j["version"] = m.version;
  j["deterministic"] = m.deterministic;
  j["wall_time_s"] = m.deterministic ? nlohmann::json(nullptr) : nlohmann::json(m.wall_time_s);
  auto outs = nlohmann::json::array();
  for (const auto& o : m.outputs) outs.push_back({{"path", o.path}, {"sha1", o.sha1}});
  j["outputs"] = outs;
  return j;
}

void write_output(RunManifest& m, const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  m.outputs.push_back({path.string(), git_blob_sha1(content)});
}

std::filesystem::path write_manifest(const RunManifest& m, const std::filesystem::path& dir,
                                     std::string_view stem) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (std::string(stem) + ".manifest.json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << to_json(m).dump(2) << '\n';
  return path;
}

std::string growth_csv(const GrowthTable& g) {
  CsvWriter csv({"N", "data_norm", "ap_norm", "ratio", "slope_running"});
  for (const auto& r : g.records)
    csv.row({std::to_string(r.N), format_double(r.data_norm), format_double(r.ap_norm), format_double(r.ratio),
             format_double(r.slope_running)});
  return csv.str();
}

namespace {
nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }
}  // namespace

nlohmann::json to_json(const GrowthTable& g) {
  nlohmann::json j;
  j["p"] = g.p;
  j["domain"] = std::string(to_string(g.domain));
  j["s"] = g.s;
  j["sigma"] = g.sigma;
  j["t"] = g.t;
  j["slope"] = num(g.slope);
  j["predicted_slope"] = g.predicted_slope;
  auto rows = nlohmann::json::array();
  for (const auto& r : g.records)
    rows.push_back({{"N", r.N},
                    {"data_norm", r.data_norm},
                    {"ap_norm", r.ap_norm},
                    {"ratio", r.ratio},
                    {"slope_running", num(r.slope_running)}});
  j["records"] = rows;
  j["warnings"] = g.warnings;
  return j;
}

nlohmann::json to_json(const ApResult& a) {
  nlohmann::json j;
  j["t"] = a.t;
  j["domain"] = std::string(to_string(a.domain));
  j["method"] = a.method;
  j["hs_lower"] = a.hs_lower;
  j["mc_half_width"] = a.mc_half_width;
  j["quadrature_rel_change"] = a.quadrature_rel_change;
  auto vals = nlohmann::json::array();
  for (std::size_t i = 0; i < a.values.size(); ++i)
    vals.push_back({a.xi[i], a.weights[i], a.values[i].real(), a.values[i].imag()});
  j["values"] = vals;  // [xi, weight, re, im]
  j["warnings"] = a.warnings;
  return j;
}

nlohmann::json to_json(const ClassCounts& c) { return {c.n1, c.n2, c.n3, c.n4}; }

nlohmann::json diophantine_json(int p) {
  nlohmann::json j;
  j["p"] = p;
  j["triplets"] = triplet_count(p);
  auto sol = nlohmann::json::array();
  for (const auto& c : solve_diophantine(p)) sol.push_back(to_json(c));
  auto cf = nlohmann::json::array();
  for (const auto& c : closed_form_profiles(p)) cf.push_back(to_json(c));
  j["solutions"] = sol;
  j["closed_form"] = cf;
  j["match"] = sol == cf;
  return j;
}

std::string inflation_csv(const InflationTable& t) {
  CsvWriter csv({"N", "K", "dt", "data_norm", "window_sup", "t_at_sup", "window_final"});
  for (const auto& r : t.rows)
    csv.row({std::to_string(r.N), std::to_string(r.K), format_double(r.dt), format_double(r.data_norm),
             format_double(r.window_sup), format_double(r.t_at_sup), format_double(r.window_final)});
  return csv.str();
}

nlohmann::json to_json(const InflationTable& t) {
  nlohmann::json j;
  j["p"] = t.p;
  j["s"] = t.s;
  j["delta"] = t.delta;
  j["t_end"] = t.t_end;
  j["window"] = {t.window_lo, t.window_hi};
  j["strictly_increasing"] = t.strictly_increasing();
  j["max_ratio_to_first"] = t.max_ratio_to_first();
  auto rows = nlohmann::json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"N", r.N},
                    {"K", r.K},
                    {"dt", r.dt},
                    {"data_norm", r.data_norm},
                    {"window_sup", r.window_sup},
                    {"t_at_sup", r.t_at_sup},
                    {"window_final", r.window_final}});
  j["rows"] = rows;
  return j;
}

nlohmann::json to_json(const ProbeResult& r) {
  nlohmann::json j;
  j["xi"] = r.xi;
  j["eps"] = r.eps;
  auto raw = nlohmann::json::array();
  for (const auto& v : r.raw) raw.push_back({v.real(), v.imag()});
  j["raw"] = raw;
  j["value"] = {r.value.real(), r.value.imag()};
  j["disagreement"] = r.disagreement;
  j["converged"] = r.converged;
  j["K"] = r.K;
  j["dt"] = r.dt;
  j["simulations"] = r.simulations;
  return j;
}

TrajectoryCsv::TrajectoryCsv(std::vector<double> s_values, double window_s, int window_lo, int window_hi)
    : s_(std::move(s_values)), window_s_(window_s), lo_(window_lo), hi_(window_hi), csv_([&] {
        std::vector<std::string> h{"t", "window_hs"};
        for (double s : s_) h.push_back("hs_" + format_double(s));
        return h;
      }()) {}

void TrajectoryCsv::record(const SimState& st) {
  std::vector<std::string> row{format_double(st.t), format_double(torus_hs_norm(st.u, window_s_, lo_, hi_))};
  for (double s : s_) row.push_back(format_double(torus_hs_norm(st.u, s)));
  csv_.row(row);
}

}  // namespace bsq
