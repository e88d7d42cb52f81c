#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gridec/cascade.hpp"
#include "gridec/common.hpp"
#include "gridec/emergency.hpp"
#include "gridec/grid_model.hpp"
#include "gridec/partition.hpp"

namespace gridec {

/// Parses a case from JSON text. The schema is strict: unknown fields and
/// wrong types are rejected (InputError), so a typo cannot silently change
/// an experiment. Does not run validate_case.
GridCase parse_case(const std::string& text);

/// Canonical JSON for a case: nodes and lines sorted by id, kind-specific
/// fields only, shortest round-trip numbers. load -> save -> load is exact.
std::string case_to_json(const GridCase& grid);

/// Reads and fully validates a case file. Throws InputError on IO, parse
/// or validation problems (the message carries the validation report).
GridCase load_case(const std::string& path);

void save_case(const GridCase& grid, const std::string& path);

/// Draws `count` distinct generators uniformly, deterministically in
/// `seed`. Throws SamplingError when count exceeds the generator count.
NodeSet sample_failed_generators(const GridCase& grid, int count, std::uint64_t seed);

/// Draws `n_clusters` connected, pairwise non-adjacent clusters of exactly
/// `cluster_size` nodes each (uniform random growth), avoiding `exclude`.
/// Returns their union. Throws SamplingError when placement fails within
/// the retry budget.
NodeSet sample_uncontrollable_clusters(const GridCase& grid, int n_clusters,
                                       int cluster_size, std::uint64_t seed,
                                       const NodeSet& exclude = {});

struct ScenarioConfig {
    int n_failed = 0;
    int n_uncontrollable = 0;
    int cluster_size = 1; // must divide n_uncontrollable
    OperatingMode mode = OperatingMode::P_init;
    std::uint64_t master_seed = 0;
    int replications = 100;
};

struct CascadeRecord {
    AreaId area = 0;
    double served = 0.0;
    std::vector<RelayAction> log;
};

struct ScenarioRecord {
    std::int64_t index = 0;
    NodeSet failed;
    NodeSet uncontrollable;
    double yield_full = 0.0;
    double yield_partial = 0.0;
    std::map<AreaId, int> island_flags;
    int unstable_areas = 0;
    std::vector<CascadeRecord> cascades; // one per cut-off area
    bool anomaly = false;                // solver failed; yields not meaningful
    std::string note;
};

/// Runs one full scenario: seeded sampling of failures and uncontrollable
/// clusters, the full-information solve, the partial-information solve
/// under the configured mode, and a cascade for every cut-off area.
/// Scenario `index` and the config's master seed fully determine the
/// result. With verify set, every solve with at most 20 binaries is
/// cross-checked against brute-force enumeration (std::logic_error on
/// disagreement).
ScenarioRecord run_scenario(const GridCase& grid, const ScenarioConfig& config,
                            std::int64_t index, bool verify = false);

struct SweepRow {
    ScenarioConfig config;
    double mean_yield_partial = 0.0;
    double mean_yield_full = 0.0;
    double frac_unstable = 0.0;      // scenarios with at least one cut-off area
    double frac_pzero_gt_pinit = 0.0; // NaN without a paired opposite-mode row
};

struct SweepResult {
    std::vector<SweepRow> rows;                        // config order
    std::vector<std::vector<ScenarioRecord>> records;  // aligned with rows
};

/// Monte Carlo sweep over the given configs, `jobs` >= 1 worker threads.
/// Replication r of config c is fully determined by (config, r), so the
/// result is identical for any job count. Anomalous records are excluded
/// from the means (none occur on well-formed cases). Rows of opposite mode
/// but otherwise equal config and seed are paired replication-by-
/// replication to fill frac_pzero_gt_pinit.
SweepResult sweep(const GridCase& grid, const std::vector<ScenarioConfig>& configs,
                  int jobs, bool verify = false);

/// Fixed-layout CSV, 6 decimal places, byte-stable across job counts.
void write_csv(const SweepResult& result, std::ostream& out);

std::string record_to_json(const ScenarioRecord& record, int config_index);

struct SweepSpec {
    std::vector<ScenarioConfig> configs;
    bool emit_records = false;
};

/// Parses a sweep config file (strict schema, like parse_case). Top-level
/// master_seed and replications act as defaults for the per-config values.
SweepSpec parse_sweep_spec(const std::string& text);

/// Worker count from the GRIDEC_JOBS environment variable, else 1. Job
/// count never changes results, only wall time.
int default_jobs();

/// Incumbent seeds for an emergency-control model: everything in service,
/// the assignment implied by checking each area in isolation and, when
/// riding every area through is infeasible, a greedy repair that cuts
/// areas until feasibility returns. Infeasible seeds are discarded by the
/// solver, so hints only ever cut search effort, never the optimum.
std::vector<std::vector<int>> solver_hints(const MilpModel& model, const GridCase& grid,
                                           const Partition& partition);

} // namespace gridec
