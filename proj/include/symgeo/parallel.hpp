#pragma once

// Execution policy for the data-parallel kernels.  Every kernel that takes an
// Exec argument has a serial reference path and an OpenMP path over the same
// fixed chunk layout.  Chunk boundaries depend only on the problem size, and
// per-chunk partial results are combined in chunk order, so both policies
// produce bit-identical results regardless of thread count.

#include <cstddef>
#include <utility>
#include <vector>

namespace symgeo::par {

enum class Exec { serial, parallel };

/// True when the library was compiled with OpenMP support.
bool openmp_enabled();

/// Number of threads the parallel policy may use (1 without OpenMP).
int max_threads();

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) {
    return n == 0 ? 0 : (n + chunk - 1) / chunk;
}

/// Runs fn(begin, end, chunk_index) over consecutive chunks of [0, n).
template <class Fn>
void for_chunks(std::size_t n, std::size_t chunk, Exec ex, Fn&& fn) {
    const long long nc = static_cast<long long>(chunk_count(n, chunk));
    if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < nc; ++c) {
            const std::size_t b = static_cast<std::size_t>(c) * chunk;
            const std::size_t e = b + chunk < n ? b + chunk : n;
            fn(b, e, static_cast<std::size_t>(c));
        }
    } else {
        for (long long c = 0; c < nc; ++c) {
            const std::size_t b = static_cast<std::size_t>(c) * chunk;
            const std::size_t e = b + chunk < n ? b + chunk : n;
            fn(b, e, static_cast<std::size_t>(c));
        }
    }
}

/// Computes per-chunk partial values and folds them left to right.
/// per_chunk(begin, end) -> T; comb(T, T) -> T.
template <class T, class ChunkFn, class Combine>
T reduce_chunks(std::size_t n, std::size_t chunk, Exec ex, T init,
                ChunkFn&& per_chunk, Combine&& comb) {
    std::vector<T> part(chunk_count(n, chunk), init);
    for_chunks(n, chunk, ex, [&](std::size_t b, std::size_t e, std::size_t c) {
        part[c] = per_chunk(b, e);
    });
    T acc = std::move(init);
    for (auto& p : part) acc = comb(std::move(acc), std::move(p));
    return acc;
}

}  // namespace symgeo::par
