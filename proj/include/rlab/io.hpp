#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rlab/differentials.hpp"
#include "rlab/quadrature.hpp"
#include "rlab/rational_map.hpp"

namespace rlab {

/// SHA-256 digest as lowercase hex.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Shortest-round-trip decimal formatting used for every CSV number, so
/// identical doubles serialize to identical bytes.
std::string fmt_g17(double x);

/// Map description file: JSON with `num` and `den` as lists of [re, im]
/// pairs (ascending degree) and an optional `label`.
struct MapFile {
    Polynomial num, den;
    std::string label;
};

MapFile read_map_file(const std::string& path);                     // ParseError on bad fields
void write_map_file(const std::string& path, const RationalMap& map, const std::string& label,
                    const std::map<std::string, std::string>& extra = {});

/// Experiment description file (JSON): the experiment name, a map file
/// reference, test-function labels, the n schedule, a region, tolerances,
/// and a seed. Unknown experiment-specific knobs land in `params`.
struct ExperimentFile {
    std::string experiment;
    std::string map_path;
    std::string phi = "basis:0";
    std::string mu = "invariant";
    std::vector<int> n_schedule;
    Region region = Region::annulus(Complex{0.0}, 2.0, 4.0);
    double tol = 1e-6;
    std::uint64_t budget = 1u << 22;
    std::uint64_t node_budget = 1u << 22;
    std::uint64_t seed = 1;
    int threads = 0;
    std::map<std::string, double> params;
};

ExperimentFile read_experiment_file(const std::string& path);

/// CSV artifact writer: header row + fmt_g17 bodies, '\n' line endings.
class CsvWriter {
  public:
    CsvWriter(std::string path, std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    void number_row(const std::vector<double>& cells);
    /// Writes the file; returns (sha256 of body, row count).
    std::pair<std::string, std::uint64_t> save();
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::string body_;
    std::uint64_t rows_ = 0;
};

struct Audit {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ArtifactEntry {
    std::string path;
    std::string sha256;
    std::uint64_t rows = 0;
};

/// Serializable record of a run: inputs with digests, seeds, tolerances,
/// emitted artifacts, and audit outcomes.
struct RunManifest {
    std::string tool = "rlab";
    std::string version = "0.1.0";
    std::string command;
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::uint64_t budget = 0;
    int threads = 0;
    std::string started_utc, finished_utc;
    std::vector<ArtifactEntry> artifacts;
    std::vector<Audit> audits;

    bool all_audits_passed() const;
    void save(const std::string& path) const;
};

std::string utc_timestamp();

}  // namespace rlab
