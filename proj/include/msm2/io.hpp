#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msm2/estimate.hpp"
#include "msm2/markov_test.hpp"
#include "msm2/model.hpp"
#include "msm2/propagate.hpp"

// File formats.  All writers are deterministic: fixed column orders, sorted
// keys, shortest round-trip decimal for doubles in JSON and %.17g in CSV, no
// timestamps.  Byte-identical inputs and parameters give byte-identical
// files.
//
// Content problems (bad header, day gaps, unknown states) throw
// ValidationError; filesystem problems throw IoError.

namespace msm2 {

// --- trajectory data (long CSV: subject_id,day,state) ---------------------

/// Parses a trajectory table.  `state` cells may be 1-based indices or state
/// labels.  Each subject's days must form a gap-free run; duplicates and
/// gaps are errors naming the subject and day.  Subjects are returned sorted
/// by id (the canonical order).
std::vector<Trajectory> read_trajectories_csv(const std::string& path,
                                              const StateSpace& space);

/// Canonical form: header, subjects sorted by id, days ascending, 1-based
/// state indices.  write(read(write(x))) == write(x).
std::string trajectories_to_csv(const std::vector<Trajectory>& dataset);
void write_trajectories_csv(const std::string& path,
                            const std::vector<Trajectory>& dataset);

// --- state space (JSON) ----------------------------------------------------

/// Schema: {"m": int, "labels": [m strings], "adjacency": [[from,to] 1-based],
/// "absorbing": [1-based]}.  Absorbing self-loops may be omitted.
StateSpace read_space_json(const std::string& path);
std::string space_to_json(const StateSpace& space);
void write_space_json(const std::string& path, const StateSpace& space);

// --- labels sidecar (CSV: index,label) --------------------------------------

std::vector<std::string> read_labels_csv(const std::string& path);
void write_labels_csv(const std::string& path,
                      const std::vector<std::string>& labels);

// --- transition tensor (JSON) ----------------------------------------------

/// Tensor + initialization as stored on disk:
/// {"m": M, "labels": [...], "matrices": [M arrays of M*M numbers,
/// row-major], "support": [M arrays of M bools], "init": {"dist": [...],
/// "first_step": [[...]]}}.
struct TensorBundle {
  std::vector<std::string> labels;
  TransitionTensor tensor;
  ChainInitialization init;
};

TensorBundle read_tensor_json(const std::string& path);
std::string tensor_to_json(const TensorBundle& bundle);
void write_tensor_json(const std::string& path, const TensorBundle& bundle);

// --- result tables -----------------------------------------------------------

/// Columns: n,probability (one row per horizon).
void write_curve_csv(const std::string& path, const PredictionCurve& curve);

/// Markov test p-values: one row per summary statistic, one column per
/// usable conditioning state plus the two overall aggregations (states
/// dropped as vacuous are reported in the manifest warnings).
void write_markov_report_csv(const std::string& path,
                             const MarkovTestReport& report,
                             const StateSpace& space);

/// Two-step path table: from,to,total,via,count,percent with percent
/// rounded to two decimals.
void write_two_step_csv(const std::string& path,
                        const std::vector<TwoStepPathSummary>& summaries,
                        const StateSpace& space);

// --- run manifest -------------------------------------------------------------

/// Every CLI output file X is accompanied by X.manifest.json recording the
/// command, the full parameter set, input paths with content hashes and the
/// produced outputs — enough to reproduce the run exactly.  No timestamps,
/// so reruns produce byte-identical manifests.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;  // name, value
  std::vector<std::string> input_paths;
  std::vector<std::string> output_paths;
};

std::string manifest_to_json(const RunManifest& manifest);
void write_manifest(const std::string& output_path,
                    const RunManifest& manifest);

// --- helpers ---------------------------------------------------------------

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// FNV-1a 64-bit content hash, as 16 hex digits.
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace msm2
