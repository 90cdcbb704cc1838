#include "psqi/batch.hpp"

#include "psqi/errors.hpp"

#include <exception>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace psqi {

std::vector<PsqiResult> score_windows_serial(const std::vector<AnnotatedWindow>& windows,
                                             const BindingFactory& factory, const PsqiConfig& cfg) {
    std::vector<PsqiResult> results(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const TaskBinding binding = factory(windows[i].signal.fs_hz);
        results[i] = psqi_score(windows[i].signal, binding, cfg, i);
    }
    return results;
}

std::vector<PsqiResult> score_windows(const std::vector<AnnotatedWindow>& windows,
                                      const BindingFactory& factory, const PsqiConfig& cfg,
                                      int jobs) {
#ifdef _OPENMP
    if (jobs == 1) return score_windows_serial(windows, factory, cfg);
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();

    std::vector<PsqiResult> results(windows.size());
    std::exception_ptr failure = nullptr;

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long i = 0; i < static_cast<long>(windows.size()); ++i) {
        try {
            const TaskBinding binding = factory(windows[i].signal.fs_hz);
            results[i] = psqi_score(windows[i].signal, binding, cfg,
                                    static_cast<std::uint64_t>(i));
        } catch (...) {
#pragma omp critical
            {
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return results;
#else
    (void)jobs;
    return score_windows_serial(windows, factory, cfg);
#endif
}

double realized_metric(const AnnotatedWindow& window, const TaskBinding& binding) {
    if (!window.truth) {
        throw DataError("window " + window.window_id + " has no annotation");
    }
    const TaskOutput prediction = binding.algorithm(window.signal);
    return binding.metric(prediction, *window.truth);
}

} // namespace psqi
