#include "bispeech/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bispeech/error.hpp"
#include "bispeech/rng.hpp"

namespace bispeech {

const std::vector<std::string>& known_labels() {
    static const std::vector<std::string> labels = {"Human", "NaturalReader", "SpikAI", "Replica",
                                                    "Synthetic"};
    return labels;
}

bool is_known_label(const std::string& label) {
    const auto& labels = known_labels();
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

std::string to_binary_label(const std::string& label) {
    if (!is_known_label(label)) fail(ErrorCode::UnknownLabel, label);
    return label == "Human" ? "Human" : "Synthetic";
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "path,label") {
        fail(ErrorCode::IoFailure, path + ": expected header 'path,label'");
    }

    Manifest manifest;
    std::set<std::string> seen;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) {
            fail(ErrorCode::IoFailure, path + ":" + std::to_string(line_no) + ": expected path,label");
        }
        ManifestEntry entry{line.substr(0, comma), line.substr(comma + 1)};
        if (!is_known_label(entry.label)) {
            fail(ErrorCode::UnknownLabel,
                 path + ":" + std::to_string(line_no) + ": '" + entry.label + "'");
        }
        if (!seen.insert(entry.path).second) {
            fail(ErrorCode::DuplicatePath, path + ":" + std::to_string(line_no) + ": " + entry.path);
        }
        manifest.entries.push_back(std::move(entry));
    }
    if (manifest.entries.empty()) fail(ErrorCode::EmptyManifest, path);
    return manifest;
}

void save_manifest(const std::string& path, const Manifest& manifest) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    out << "path,label\n";
    for (const auto& entry : manifest.entries) out << entry.path << ',' << entry.label << '\n';
    if (!out) fail(ErrorCode::IoFailure, "short write to " + path);
}

SplitPlan split(const Manifest& manifest, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        fail(ErrorCode::InvalidArgument, "test_fraction must lie in (0, 1)");
    }

    // Group indices by class, in manifest order.
    std::map<std::string, std::vector<int>> by_class;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        by_class[manifest.entries[i].label].push_back(static_cast<int>(i));
    }
    for (const auto& [label, indices] : by_class) {
        if (indices.size() < 2) {
            fail(ErrorCode::ClassTooSmall, label + " has " + std::to_string(indices.size()) +
                                               " entries, need at least 2");
        }
    }

    const auto total = static_cast<long long>(manifest.entries.size());
    const auto global_test = static_cast<long long>(std::llround(test_fraction * total));

    // Largest-remainder apportionment of the global test count across
    // classes, capped so every class keeps at least one training sample.
    struct Share {
        std::string label;
        long long base;
        double remainder;
        long long cap;
    };
    std::vector<Share> shares;
    long long assigned = 0;
    for (const auto& [label, indices] : by_class) {
        const double exact = test_fraction * static_cast<double>(indices.size());
        Share share{label, static_cast<long long>(exact), exact - static_cast<long long>(exact),
                    static_cast<long long>(indices.size()) - 1};
        share.base = std::min(share.base, share.cap);
        assigned += share.base;
        shares.push_back(share);
    }
    std::stable_sort(shares.begin(), shares.end(),
                     [](const Share& a, const Share& b) { return a.remainder > b.remainder; });
    for (auto& share : shares) {
        if (assigned >= global_test) break;
        if (share.base < share.cap) {
            ++share.base;
            ++assigned;
        }
    }

    SplitPlan plan;
    plan.seed = seed;
    Rng rng(seed);
    for (auto& [label, indices] : by_class) {
        rng.shuffle(indices);
        long long take = 0;
        for (const auto& share : shares) {
            if (share.label == label) take = share.base;
        }
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (static_cast<long long>(i) < take) {
                plan.test_indices.push_back(indices[i]);
            } else {
                plan.train_indices.push_back(indices[i]);
            }
        }
    }
    std::sort(plan.train_indices.begin(), plan.train_indices.end());
    std::sort(plan.test_indices.begin(), plan.test_indices.end());
    return plan;
}

void save_split(const std::string& path, const SplitPlan& plan) {
    nlohmann::json doc;
    doc["seed"] = plan.seed;
    doc["train"] = plan.train_indices;
    doc["test"] = plan.test_indices;
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) fail(ErrorCode::IoFailure, "short write to " + path);
}

SplitPlan load_split(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
        SplitPlan plan;
        plan.seed = doc.at("seed").get<std::uint64_t>();
        plan.train_indices = doc.at("train").get<std::vector<int>>();
        plan.test_indices = doc.at("test").get<std::vector<int>>();
        return plan;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::IoFailure, path + ": " + e.what());
    }
}

std::vector<Fold> kfold(const std::vector<int>& indices, int k, std::uint64_t seed) {
    if (k < 2) fail(ErrorCode::InvalidArgument, "k must be at least 2");
    if (static_cast<int>(indices.size()) < k) {
        fail(ErrorCode::TooFewSamples,
             std::to_string(indices.size()) + " samples cannot fill " + std::to_string(k) + " folds");
    }

    std::vector<int> shuffled = indices;
    Rng rng(seed);
    rng.shuffle(shuffled);

    // First (n mod k) folds get one extra element.
    const std::size_t n = shuffled.size();
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t extra = n % static_cast<std::size_t>(k);
    std::vector<Fold> folds(static_cast<std::size_t>(k));
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        folds[f].validate.assign(shuffled.begin() + cursor, shuffled.begin() + cursor + size);
        cursor += size;
    }
    for (std::size_t f = 0; f < folds.size(); ++f) {
        for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g == f) continue;
            folds[f].train.insert(folds[f].train.end(), folds[g].validate.begin(),
                                  folds[g].validate.end());
        }
    }
    return folds;
}

}  // namespace bispeech
