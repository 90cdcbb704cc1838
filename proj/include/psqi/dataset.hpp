#pragma once

#include "psqi/signal.hpp"
#include "psqi/tasks.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace psqi {

// One fixed-length analysis window cut from a record, with ground truth in
// window-local coordinates.
struct AnnotatedWindow {
    std::string window_id; // "<record>#<k>"
    Signal signal;
    std::optional<TaskOutput> truth; // PeakList (local indices) or BinaryLabel
    std::string source_file;
    std::size_t source_offset = 0; // first sample's index in the record
};

// A whole record as stored on disk.
struct Record {
    std::string name;
    Signal signal;
    std::optional<TaskOutput> truth;
    std::string units = "mV";
};

// Directory layout: <name>.csv (header "t,value"), <name>.meta.json
// ({"fs_hz": ..., "units": ...}), optional <name>.ann.json
// ({"peaks": [...]} or {"label": 0|1}).
std::vector<Record> load_records(const std::string& dir);
void write_record(const std::string& dir, const Record& record);

// Cuts non-overlapping windows of window_s seconds; the trailing remainder is
// dropped and peak annotations are re-indexed into window coordinates.
std::vector<AnnotatedWindow> segment(const Record& record, double window_s);

// load_records + segment over a directory, ordered by filename then offset.
// Emits a warning on stderr for records shorter than one window.
std::vector<AnnotatedWindow> load_dataset(const std::string& dir, double window_s = 10.0);

// Synthetic ECG-like corpus: Gaussian R bumps with optional T bumps and
// amplitude jitter, plus band-limited Gaussian noise scaled to an exact
// per-window SNR drawn uniformly from [snr_min_db, snr_max_db]. Peak ground
// truth is exact by construction.
struct SynthSpec {
    std::size_t n_windows = 100;
    double window_s = 10.0;
    double fs_hz = 250.0;
    double hr_bpm = 60.0;
    double r_amp = 1.0;
    double r_sigma_s = 0.010;
    double t_amp = 0.15;        // 0 disables T bumps
    double t_sigma_s = 0.040;
    double t_offset_s = 0.300;
    double amp_jitter = 0.05;   // relative, uniform in [-j, +j]
    bool noise_enabled = true;
    double noise_low_hz = 8.0;   // default band sits on the QRS energy range
    double noise_high_hz = 20.0;
    double snr_min_db = 0.0;
    double snr_max_db = 40.0;
    std::size_t weak_windows = 0;  // windows (from the front) with one weak beat
    double weak_amp = 0.25;        // relative amplitude of the weak beat
};

void validate_synth_spec(const SynthSpec& spec);

std::vector<Record> synth_corpus(const SynthSpec& spec, std::uint64_t seed);

// Convenience: synthesize and window in one step (record name = window id
// base; each record is exactly one window long).
std::vector<AnnotatedWindow> synth_windows(const SynthSpec& spec, std::uint64_t seed);

} // namespace psqi
