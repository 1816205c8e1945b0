#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bsq/functional.hpp"
#include "bsq/resonance.hpp"
#include "bsq/simulator.hpp"

namespace bsq {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Shortest round-trip decimal for a double; "nan"/"inf" spelled out.
std::string format_double(double x);

/// RFC 4180 writer: CRLF line ends, fields quoted only when they need it.
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }

private:
  void emit(const std::vector<std::string>& fields);
  std::size_t width_;
  std::string out_;
};

std::string csv_escape(std::string_view field);

std::string sha1_hex(std::string_view bytes);
/// Hash of a file's content the way git names blobs: sha1("blob <size>\0" + content).
std::string git_blob_sha1(std::string_view bytes);
std::string file_blob_sha1(const std::filesystem::path& p);

struct OutputFile {
  std::string path;
  std::string sha1;
};

struct RunManifest {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json inputs = nlohmann::json::object();  // path -> blob hash
  std::string version{kToolVersion};
  double wall_time_s = 0.0;
  bool deterministic = false;  // wall time is left out so reruns are byte-identical
  std::vector<OutputFile> outputs;
};

nlohmann::json to_json(const RunManifest& m);

/// Writes `content` (creating parent directories) and records it in the manifest.
void write_output(RunManifest& m, const std::filesystem::path& path, std::string_view content);
/// Writes <dir>/<stem>.manifest.json.
std::filesystem::path write_manifest(const RunManifest& m, const std::filesystem::path& dir,
                                     std::string_view stem);

std::string growth_csv(const GrowthTable& g);
nlohmann::json to_json(const GrowthTable& g);
nlohmann::json to_json(const ApResult& a);
nlohmann::json to_json(const ClassCounts& c);
nlohmann::json diophantine_json(int p);
std::string inflation_csv(const InflationTable& t);
nlohmann::json to_json(const InflationTable& t);
nlohmann::json to_json(const ProbeResult& r);

/// Trajectory CSV columns: t, window_hs, then one hs_<s> column per requested s.
class TrajectoryCsv {
public:
  TrajectoryCsv(std::vector<double> s_values, double window_s, int window_lo, int window_hi);
  void record(const SimState& st);
  const std::string& str() const { return csv_.str(); }

private:
  std::vector<double> s_;
  double window_s_;
  int lo_, hi_;
  CsvWriter csv_;
};

}  // namespace bsq
