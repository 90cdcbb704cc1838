// Compares the serial reference scorer against the OpenMP kernel on a
// synthetic corpus and reports wall time plus speedup. Also verifies that
// both paths produce identical scores before timing anything.

#include "psqi/batch.hpp"
#include "psqi/dataset.hpp"
#include "psqi/tasks.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n_windows = 64;
    if (argc > 1) n_windows = static_cast<std::size_t>(std::stoul(argv[1]));

    psqi::SynthSpec spec;
    spec.n_windows = n_windows;
    spec.snr_min_db = 0.0;
    spec.snr_max_db = 40.0;
    const std::vector<psqi::AnnotatedWindow> windows = psqi::synth_windows(spec, 42);

    const psqi::BindingFactory factory = [](double fs) { return psqi::make_rpeak_binding(fs); };
    psqi::PsqiConfig cfg;
    cfg.master_seed = 42;

    std::printf("corpus: %zu windows of %.0f s at %.0f Hz\n", windows.size(), spec.window_s,
                spec.fs_hz);

    auto t0 = clock_type::now();
    const std::vector<psqi::PsqiResult> serial = psqi::score_windows_serial(windows, factory, cfg);
    const double serial_s = seconds_since(t0);
    std::printf("%-22s %8.3f s\n", "serial reference", serial_s);

    for (int jobs : {2, 4, 0}) {
#ifdef _OPENMP
        const int effective = jobs > 0 ? jobs : omp_get_max_threads();
#else
        const int effective = 1;
#endif
        t0 = clock_type::now();
        const std::vector<psqi::PsqiResult> parallel = psqi::score_windows(windows, factory, cfg, jobs);
        const double parallel_s = seconds_since(t0);

        bool identical = parallel.size() == serial.size();
        for (std::size_t i = 0; identical && i < parallel.size(); ++i) {
            identical = parallel[i].score == serial[i].score;
        }
        if (!identical) {
            std::printf("ERROR: parallel scores diverge from the serial reference\n");
            return 1;
        }
        char label[64];
        std::snprintf(label, sizeof(label), "openmp (%d threads)", effective);
        std::printf("%-22s %8.3f s   speedup %.2fx\n", label, parallel_s, serial_s / parallel_s);
    }
    return 0;
}
