#include "psqi/dataset.hpp"

#include "psqi/errors.hpp"
#include "psqi/filter.hpp"
#include "psqi/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace psqi {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

std::vector<double> read_signal_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,value", 0) != 0) {
        throw DataError(path.string() + ":1: expected header \"t,value\"");
    }
    std::vector<double> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
        }
        try {
            samples.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad sample value");
        }
    }
    return samples;
}

TaskOutput parse_annotation(const json& j, const fs::path& path) {
    if (j.contains("peaks")) {
        PeakList peaks;
        for (const auto& v : j["peaks"]) {
            peaks.indices.push_back(v.get<std::size_t>());
        }
        return peaks;
    }
    if (j.contains("label")) {
        const int label = j["label"].get<int>();
        if (label != 0 && label != 1) {
            throw DataError(path.string() + ": label must be 0 or 1");
        }
        return BinaryLabel{label};
    }
    throw DataError(path.string() + ": annotation needs \"peaks\" or \"label\"");
}

} // namespace

std::vector<Record> load_records(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw DataError("dataset directory not found: " + dir);
    }
    std::vector<fs::path> csvs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            csvs.push_back(entry.path());
        }
    }
    std::sort(csvs.begin(), csvs.end());

    std::vector<Record> records;
    for (const fs::path& csv : csvs) {
        const fs::path meta_path = fs::path(csv).replace_extension(".meta.json");
        if (!fs::exists(meta_path)) {
            throw DataError("missing sidecar " + meta_path.string());
        }
        const json meta = load_json(meta_path);
        if (!meta.contains("fs_hz")) {
            throw DataError(meta_path.string() + ": missing \"fs_hz\"");
        }

        Record rec;
        rec.name = csv.stem().string();
        rec.signal.fs_hz = meta["fs_hz"].get<double>();
        rec.signal.samples = read_signal_csv(csv);
        rec.units = meta.value("units", "mV");
        validate_signal(rec.signal);

        const fs::path ann_path = fs::path(csv).replace_extension(".ann.json");
        if (fs::exists(ann_path)) {
            rec.truth = parse_annotation(load_json(ann_path), ann_path);
            if (const PeakList* peaks = std::get_if<PeakList>(&*rec.truth)) {
                validate_peak_list(*peaks, rec.signal.samples.size());
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_record(const std::string& dir, const Record& record) {
    fs::create_directories(dir);
    const fs::path base = fs::path(dir) / record.name;

    std::ofstream csv(base.string() + ".csv");
    if (!csv) throw DataError("cannot write " + base.string() + ".csv");
    csv << "t,value\n";
    for (std::size_t i = 0; i < record.signal.samples.size(); ++i) {
        csv << format_double(static_cast<double>(i) / record.signal.fs_hz) << ','
            << format_double(record.signal.samples[i]) << '\n';
    }
    if (!csv.good()) throw DataError("write failed for " + base.string() + ".csv");

    json meta;
    meta["fs_hz"] = record.signal.fs_hz;
    meta["units"] = record.units;
    std::ofstream meta_out(base.string() + ".meta.json");
    meta_out << meta.dump(2) << '\n';

    if (record.truth) {
        json ann;
        if (const PeakList* peaks = std::get_if<PeakList>(&*record.truth)) {
            ann["peaks"] = peaks->indices;
        } else {
            ann["label"] = std::get<BinaryLabel>(*record.truth).value;
        }
        std::ofstream ann_out(base.string() + ".ann.json");
        ann_out << ann.dump(2) << '\n';
    }
}

std::vector<AnnotatedWindow> segment(const Record& record, double window_s) {
    if (!(window_s > 0.0)) {
        throw std::invalid_argument("segment: window length must be > 0");
    }
    const std::size_t win_len = static_cast<std::size_t>(std::llround(window_s * record.signal.fs_hz));
    std::vector<AnnotatedWindow> windows;
    if (win_len < 2 || record.signal.samples.size() < win_len) {
        return windows;
    }
    const std::size_t n_windows = record.signal.samples.size() / win_len;
    for (std::size_t k = 0; k < n_windows; ++k) {
        AnnotatedWindow w;
        w.window_id = record.name + "#" + std::to_string(k);
        w.source_file = record.name;
        w.source_offset = k * win_len;
        w.signal.fs_hz = record.signal.fs_hz;
        w.signal.samples.assign(record.signal.samples.begin() + static_cast<long>(k * win_len),
                                record.signal.samples.begin() + static_cast<long>((k + 1) * win_len));
        if (record.truth) {
            if (const PeakList* peaks = std::get_if<PeakList>(&*record.truth)) {
                PeakList local;
                for (std::size_t idx : peaks->indices) {
                    if (idx >= k * win_len && idx < (k + 1) * win_len) {
                        local.indices.push_back(idx - k * win_len);
                    }
                }
                w.truth = local;
            } else {
                w.truth = *record.truth;
            }
        }
        windows.push_back(std::move(w));
    }
    return windows;
}

std::vector<AnnotatedWindow> load_dataset(const std::string& dir, double window_s) {
    std::vector<AnnotatedWindow> windows;
    for (const Record& rec : load_records(dir)) {
        std::vector<AnnotatedWindow> cut = segment(rec, window_s);
        if (cut.empty()) {
            std::cerr << "warning: record " << rec.name << " is shorter than one window, skipped\n";
            continue;
        }
        windows.insert(windows.end(), std::make_move_iterator(cut.begin()),
                       std::make_move_iterator(cut.end()));
    }
    return windows;
}

void validate_synth_spec(const SynthSpec& spec) {
    if (spec.n_windows == 0) throw ConfigError("synth: need at least one window");
    if (!(spec.hr_bpm >= 30.0 && spec.hr_bpm <= 220.0)) {
        throw ConfigError("synth: heart rate must lie in [30, 220] bpm");
    }
    if (!(spec.fs_hz > 0.0) || !(spec.window_s > 0.0)) {
        throw ConfigError("synth: fs and window length must be > 0");
    }
    if (!std::isfinite(spec.snr_min_db) || !std::isfinite(spec.snr_max_db) ||
        spec.snr_min_db > spec.snr_max_db) {
        throw ConfigError("synth: SNR range must be finite with min <= max");
    }
    if (spec.noise_enabled &&
        !(spec.noise_low_hz > 0.0 && spec.noise_low_hz < spec.noise_high_hz &&
          spec.noise_high_hz < 0.5 * spec.fs_hz)) {
        throw ConfigError("synth: noise band must satisfy 0 < low < high < fs/2");
    }
    if (spec.weak_windows > spec.n_windows) {
        throw ConfigError("synth: more weak windows than windows");
    }
    if (!(spec.weak_amp > 0.0 && spec.weak_amp <= 1.0)) {
        throw ConfigError("synth: weak-beat amplitude must lie in (0, 1]");
    }
}

std::vector<Record> synth_corpus(const SynthSpec& spec, std::uint64_t seed) {
    validate_synth_spec(spec);

    const std::size_t win_len = static_cast<std::size_t>(std::llround(spec.window_s * spec.fs_hz));
    const double beat_period_s = 60.0 / spec.hr_bpm;

    std::vector<Record> records;
    records.reserve(spec.n_windows);
    for (std::size_t w = 0; w < spec.n_windows; ++w) {
        // Domain-separated from the scoring engine's per-window seeds so a
        // shared master seed never reuses the same noise stream.
        SplitMix64 rng(mix64(derive_window_seed(seed, w) ^ 0x53594e5448ull));

        // Beats at (k + 1/2) * period so edge beats stay clear of the window
        // boundary.
        std::vector<double> beat_times;
        for (double t = 0.5 * beat_period_s; t < spec.window_s - 0.25 * beat_period_s;
             t += beat_period_s) {
            beat_times.push_back(t);
        }

        std::vector<double> amps(beat_times.size(), spec.r_amp);
        for (double& a : amps) {
            a *= 1.0 + spec.amp_jitter * (2.0 * rng.next_unit() - 1.0);
        }
        // The attenuated beat sits mid-window so the adaptive thresholds have
        // settled and the gap it leaves is covered by the searchback pass.
        if (w < spec.weak_windows && !beat_times.empty()) {
            amps[beat_times.size() / 2] = spec.r_amp * spec.weak_amp;
        }

        Signal sig;
        sig.fs_hz = spec.fs_hz;
        sig.samples.assign(win_len, 0.0);
        PeakList truth;
        for (std::size_t b = 0; b < beat_times.size(); ++b) {
            const double center_s = beat_times[b];
            const std::size_t center = static_cast<std::size_t>(std::llround(center_s * spec.fs_hz));
            truth.indices.push_back(center);
            for (std::size_t i = 0; i < win_len; ++i) {
                const double dt = static_cast<double>(i) / spec.fs_hz - center_s;
                sig.samples[i] += amps[b] * std::exp(-0.5 * dt * dt / (spec.r_sigma_s * spec.r_sigma_s));
                if (spec.t_amp > 0.0) {
                    const double dt_t = dt - spec.t_offset_s;
                    sig.samples[i] += amps[b] * spec.t_amp *
                                      std::exp(-0.5 * dt_t * dt_t / (spec.t_sigma_s * spec.t_sigma_s));
                }
            }
        }

        if (spec.noise_enabled) {
            const double snr_db = spec.snr_min_db + (spec.snr_max_db - spec.snr_min_db) * rng.next_unit();
            std::vector<double> noise(win_len);
            for (double& v : noise) v = rng.next_normal();
            const FilterCoefficients shaping = design_butterworth(
                FilterSpec::bandpass(6, spec.noise_low_hz, spec.noise_high_hz), spec.fs_hz);
            noise = filtfilt(shaping, noise);

            // Scale against the useful component of the clean signal so the
            // realized SNR is exact.
            const Signal clean_filt = useful_component(sig);
            const double sig_energy = energy(clean_filt.samples);
            const double noise_energy = energy(noise);
            if (noise_energy > 0.0 && sig_energy > 0.0) {
                const double scale = std::sqrt(sig_energy / (db_to_linear(snr_db) * noise_energy));
                for (std::size_t i = 0; i < win_len; ++i) sig.samples[i] += scale * noise[i];
            }
        }

        Record rec;
        char name[32];
        std::snprintf(name, sizeof(name), "rec%05zu", w);
        rec.name = name;
        rec.signal = std::move(sig);
        rec.truth = truth;
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<AnnotatedWindow> synth_windows(const SynthSpec& spec, std::uint64_t seed) {
    std::vector<AnnotatedWindow> windows;
    for (const Record& rec : synth_corpus(spec, seed)) {
        std::vector<AnnotatedWindow> cut = segment(rec, spec.window_s);
        windows.insert(windows.end(), std::make_move_iterator(cut.begin()),
                       std::make_move_iterator(cut.end()));
    }
    return windows;
}

} // namespace psqi
