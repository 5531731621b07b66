#ifndef ADCNN_RNG_HPP
#define ADCNN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace adcnn {

// All randomness in the library flows through Rng so that results are
// reproducible bit-for-bit across platforms. std::mt19937_64 emits a
// standardized integer stream; the float conversions below are explicit
// instead of going through std::*_distribution, whose output is
// implementation-defined.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent seed streams derived from one run seed.
enum class Stream : std::uint64_t {
    noise = 1,      // per-sample Gaussian noise, keyed (seed, roi_id, plan_index)
    init = 2,       // network weight initialization
    shuffle = 3,    // per-epoch mini-batch shuffling
    synth = 4,      // synthetic ROI/exam generation
    placement = 5,  // normal-ROI placement sampling
    split = 6       // stratified split shuffling
};

/// Mixes a run seed with a stream tag and up to two keys (splitmix64 chain).
inline std::uint64_t substream(std::uint64_t seed, Stream stream,
                               std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal() {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_below(std::uint64_t n) { return next_u64() % n; }

private:
    std::mt19937_64 engine_;
};

} // namespace adcnn

#endif // ADCNN_RNG_HPP
