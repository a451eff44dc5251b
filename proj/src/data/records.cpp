#include "hep2/data/records.hpp"

#include <unordered_set>

namespace hep2::data {

int label_from_name(const std::string& name) {
    for (int i = 0; i < kNumClasses; ++i)
        if (name == kClassNames[i]) return i;
    throw DataError("unknown class name '" + name + "'");
}

std::string name_from_label(int label) {
    if (label < 0 || label >= kNumClasses)
        throw DataError("label " + std::to_string(label) + " out of range [0, " +
                        std::to_string(kNumClasses) + ")");
    return kClassNames[static_cast<std::size_t>(label)];
}

std::string Provenance::str() const {
    static constexpr const char* rot[4] = {"orig", "rot90", "rot180", "rot270"};
    const std::string base = rot[quarter_turns & 3];
    return mirrored ? "mirror(" + base + ")" : base;
}

Provenance Provenance::parse(const std::string& s) {
    std::string base = s;
    Provenance p;
    if (s.rfind("mirror(", 0) == 0 && s.back() == ')') {
        p.mirrored = true;
        base = s.substr(7, s.size() - 8);
    }
    if (base == "orig")
        p.quarter_turns = 0;
    else if (base == "rot90")
        p.quarter_turns = 1;
    else if (base == "rot180")
        p.quarter_turns = 2;
    else if (base == "rot270")
        p.quarter_turns = 3;
    else
        throw DataError("unknown provenance '" + s + "'");
    return p;
}

std::vector<std::string> specimen_order(const Records& records) {
    std::vector<std::string> order;
    std::unordered_set<std::string> seen;
    for (const CellRecord& r : records)
        if (seen.insert(r.specimen_id).second) order.push_back(r.specimen_id);
    return order;
}

std::array<std::int64_t, kNumClasses> class_counts(const Records& records) {
    std::array<std::int64_t, kNumClasses> counts{};
    for (const CellRecord& r : records) {
        if (r.label < 0 || r.label >= kNumClasses)
            throw DataError("record label " + std::to_string(r.label) + " out of range");
        ++counts[static_cast<std::size_t>(r.label)];
    }
    return counts;
}

}  // namespace hep2::data
