#pragma once

#include "psqi/metrics.hpp"
#include "psqi/signal.hpp"

#include <functional>
#include <string>
#include <variant>

namespace psqi {

using TaskOutput = std::variant<PeakList, BinaryLabel>;

enum class OutputKind { peaks, binary };

// A downstream algorithm f paired with its performance metric h. The metric
// receives (prediction, reference) and is bounded in [0, 1] for the built-in
// bindings.
struct TaskBinding {
    std::function<TaskOutput(const Signal&)> algorithm;
    std::function<double(const TaskOutput&, const TaskOutput&)> metric;
    OutputKind output_kind = OutputKind::peaks;
};

using BindingFactory = std::function<TaskBinding(double fs_hz)>;

// Reference R-peak detector. Pan-Tompkins style: 5-15 Hz zero-phase bandpass,
// derivative, squaring, 150 ms moving-window integration, adaptive
// dual-threshold picking with a 200 ms refractory period and searchback,
// then refinement to the bandpassed local maximum within +-50 ms.
// Requires fs >= 50 Hz and duration >= 2 s.
PeakList detect_rpeaks_reference(const Signal& x);

// Independent second detector used for the detector-agreement feature:
// local maxima of the squared 8-20 Hz bandpassed signal above a rolling 2 s
// 90th-percentile threshold, strongest-first with a 250 ms refractory.
PeakList detect_rpeaks_alternate(const Signal& x);

// External binary classifier invoked as a child process. The child receives
// `fs=<float>` on stdin followed by one sample per line, and must print
// exactly `0` or `1` plus a newline and exit 0. The PSQI_TIMEOUT_S
// environment variable overrides the configured timeout.
struct ExternalCommandSpec {
    std::string command; // run through /bin/sh -c
    double timeout_s = 30.0;
};

// Throws ClassifierFailure with captured diagnostics on nonzero exit,
// malformed output, or timeout.
BinaryLabel external_classifier(const ExternalCommandSpec& spec, const Signal& x);

TaskBinding make_rpeak_binding(double fs_hz, double tolerance_s = 0.02);
TaskBinding make_external_binding(ExternalCommandSpec spec);

} // namespace psqi
