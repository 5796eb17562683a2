// Timing harness comparing the serial reference kernels against the OpenMP
// paths.  Both policies run the same chunked algorithms, so agreement is
// bit-exact; this tool only reports wall time and speedup.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "symgeo/dh_localization.hpp"
#include "symgeo/lie_algebra.hpp"
#include "symgeo/parallel.hpp"
#include "symgeo/path_group.hpp"
#include "symgeo/pendulum.hpp"
#include "symgeo/spectral_trace.hpp"

using symgeo::par::Exec;

namespace {

double time_of(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, const std::function<void(Exec)>& fn) {
    const double ts = time_of([&] { fn(Exec::serial); });
    const double tp = time_of([&] { fn(Exec::parallel); });
    std::printf("%-28s %10.3f s %10.3f s %8.2fx\n", name, ts, tp, ts / tp);
}

}  // namespace

int main() {
    using namespace symgeo;

    std::printf("threads: %d (OpenMP %s)\n\n", par::max_threads(),
                par::openmp_enabled() ? "on" : "off");
    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");

    row("spectrum enumeration", [](Exec ex) {
        spectral::enumerate_spectrum(spectral::FlatTorus::square(), 400.0, ex);
    });

    {
        const auto spec = spectral::enumerate_spectrum(spectral::FlatTorus::square(), 200.0);
        row("wave trace", [&](Exec ex) { spectral::wave_trace(spec, 0.5, 18.0, 0.005, 0.05, ex); });
    }

    row("mc sphere pushforward", [](Exec ex) { dh::mc_sphere_pushforward(4'000'000, 42, 40, ex); });

    row("joint spectrum", [](Exec ex) {
        pendulum::joint_spectrum(0.1, {0.3, 1.7, -0.75, 0.75}, ex);
    });

    row("monodromy loop", [](Exec ex) {
        pendulum::Loop loop;
        loop.steps = 128;
        pendulum::monodromy(loop, ex);
    });

    return 0;
}
