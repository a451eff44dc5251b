#include "hep2/data/augment.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "hep2/data/image.hpp"
#include "hep2/rng.hpp"

namespace hep2::data {

namespace {

void check_square(const Records& records) {
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!records[i].pixels.square())
            throw DataError("record " + std::to_string(i) + ": augmentation requires square cells");
}

// variants in fixed order: quarter turns, then their mirrors
void append_variants(Records& out, const CellRecord& rec, int multiplier) {
    out.push_back(rec);
    if (multiplier >= 2) out.push_back(rotate(rec, 1));
    if (multiplier >= 4) {
        out.push_back(rotate(rec, 2));
        out.push_back(rotate(rec, 3));
    }
    if (multiplier == 8) {
        out.push_back(mirror(rec));
        out.push_back(mirror(rotate(rec, 1)));
        out.push_back(mirror(rotate(rec, 2)));
        out.push_back(mirror(rotate(rec, 3)));
    }
}

}  // namespace

Records augment_x8(const Records& records) {
    check_square(records);
    Records out;
    out.reserve(records.size() * 8);
    for (const CellRecord& rec : records) append_variants(out, rec, 8);
    return out;
}

Records augment_task2_policy(const Records& records, const AugmentPolicy& policy) {
    check_square(records);
    for (const auto& [label, mult] : policy)
        if (mult != 1 && mult != 2 && mult != 4 && mult != 8)
            throw ConfigError("augmentation multiplier for " + name_from_label(label) +
                              " must be one of 1, 2, 4, 8; got " + std::to_string(mult));

    Records out;
    for (const CellRecord& rec : records) {
        const auto it = policy.find(rec.label);
        if (it == policy.end())
            throw ConfigError("class " + name_from_label(rec.label) +
                              " missing from augmentation policy");
        append_variants(out, rec, it->second);
    }
    return out;
}

AugmentPolicy default_task2_policy() {
    return {{0, 2}, {1, 2}, {2, 2}, {3, 2}, {4, 4}, {5, 8}};
}

AugmentPolicy parse_policy(const std::string& text) {
    AugmentPolicy policy;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("bad policy entry '" + item + "', expected Class:multiplier");
        policy[label_from_name(item.substr(0, colon))] = std::stoi(item.substr(colon + 1));
    }
    return policy;
}

Records build_set3(const Records& task1, const Records& task2_specimens, int per_specimen,
                   std::uint64_t seed) {
    if (per_specimen < 1) throw ConfigError("per_specimen must be >= 1");

    Records pooled;
    pooled.reserve(task1.size() + task2_specimens.size());
    pooled.insert(pooled.end(), task1.begin(), task1.end());
    pooled.insert(pooled.end(), task2_specimens.begin(), task2_specimens.end());

    std::vector<std::string> order = specimen_order(pooled);
    std::unordered_map<std::string, std::vector<std::size_t>> by_specimen;
    for (std::size_t i = 0; i < pooled.size(); ++i)
        by_specimen[pooled[i].specimen_id].push_back(i);

    Records out;
    for (const std::string& id : order) {
        std::vector<std::size_t>& idx = by_specimen[id];
        const std::size_t take = std::min<std::size_t>(idx.size(), static_cast<std::size_t>(per_specimen));

        // subseed from the specimen id so parallel grouping order is moot
        std::uint64_t id_hash = 0xcbf29ce484222325ULL;
        for (unsigned char ch : id) {
            id_hash ^= ch;
            id_hash *= 0x100000001b3ULL;
        }
        Rng rng(mix_seed(seed, id_hash));

        // partial Fisher-Yates, then restore original order
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        std::vector<std::size_t> chosen(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t i : chosen) out.push_back(pooled[i]);
    }
    return out;
}

}  // namespace hep2::data
