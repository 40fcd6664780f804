#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bispeech {

// Recognized class tags. The four concrete sources form the multi-class
// taxonomy; Synthetic is the binary umbrella the three AI sources collapse
// into.
const std::vector<std::string>& known_labels();
bool is_known_label(const std::string& label);

// Human stays Human, everything else maps to Synthetic. Idempotent.
std::string to_binary_label(const std::string& label);

struct ManifestEntry {
    std::string path;
    std::string label;
};

struct Manifest {
    std::vector<ManifestEntry> entries;
};

// CSV with header `path,label`. Paths must be unique, labels known.
Manifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const Manifest& manifest);

// Disjoint train/test index sets over a manifest, reproducible from seed.
struct SplitPlan {
    std::vector<int> train_indices;
    std::vector<int> test_indices;
    std::uint64_t seed = 0;
};

// Stratified-by-class random split. Per-class test counts are apportioned by
// largest remainder so the total equals round(test_fraction * N) exactly;
// each class contributes within +-1 of its proportional share. Shuffling is
// seeded Fisher-Yates over std::mt19937_64.
SplitPlan split(const Manifest& manifest, double test_fraction, std::uint64_t seed);

void save_split(const std::string& path, const SplitPlan& plan);
SplitPlan load_split(const std::string& path);

struct Fold {
    std::vector<int> train;
    std::vector<int> validate;
};

// k folds partitioning the index set; sizes differ by at most one and every
// index validates exactly once. Deterministic per seed.
std::vector<Fold> kfold(const std::vector<int>& indices, int k, std::uint64_t seed);

}  // namespace bispeech
