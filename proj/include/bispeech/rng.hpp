#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace bispeech {

// Seeded generator with hand-rolled draw routines. std::mt19937_64 output is
// pinned by the standard, but the std distributions are not, so every draw
// here goes through our own mapping to keep results identical across
// platforms and library versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, bound). Rejection-free modulo; bias is
    // negligible for the bounds used here (dataset sizes, fold counts).
    std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

    // Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        if (items.size() < 2) return;
        for (std::size_t i = items.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(items[i], items[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Per-item seed derivation for parallel generation: seed XOR item index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ index;
}

}  // namespace bispeech
