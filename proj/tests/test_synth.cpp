#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "hep2/synth/generator.hpp"

using namespace hep2;

TEST_CASE("default spec yields 1920 records, 320 per class, 40 per specimen") {
    synth::SynthSpec spec;
    spec.seed = 1;
    const data::Records records = synth::generate(spec);
    CHECK(records.size() == 1920);

    const auto per_class = data::class_counts(records);
    for (int cls = 0; cls < 6; ++cls) CHECK(per_class[static_cast<std::size_t>(cls)] == 320);

    std::map<std::string, int> per_specimen;
    for (const data::CellRecord& r : records) {
        ++per_specimen[r.specimen_id];
        CHECK(r.pixels.height == 60);
        CHECK(r.pixels.width == 60);
        CHECK(r.pixels.square());
    }
    CHECK(per_specimen.size() == 48);
    for (const auto& [id, count] : per_specimen) CHECK(count == 40);
}

TEST_CASE("generation is seed-deterministic") {
    synth::SynthSpec spec;
    spec.specimens_per_class = 2;
    spec.cells_per_specimen = 4;
    spec.seed = 9;
    const data::Records a = synth::generate(spec);
    const data::Records b = synth::generate(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i].pixels.pixels == b[i].pixels.pixels);

    spec.seed = 10;
    const data::Records c = synth::generate(spec);
    bool differ = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].pixels.pixels != c[i].pixels.pixels) differ = true;
    CHECK(differ);
}

TEST_CASE("correlation 1, zero noise, no jitter: a specimen's cells are identical") {
    synth::SynthSpec spec;
    spec.specimens_per_class = 2;
    spec.cells_per_specimen = 5;
    spec.intra_specimen_correlation = 1.0;
    spec.noise_std = 0.0;
    spec.max_shift = 0;
    spec.random_orientation = false;
    spec.seed = 4;
    const data::Records records = synth::generate(spec);

    std::map<std::string, const data::CellRecord*> first_of;
    for (const data::CellRecord& r : records) {
        const auto [it, inserted] = first_of.try_emplace(r.specimen_id, &r);
        if (!inserted) CHECK(r.pixels.pixels == it->second->pixels.pixels);
    }

    // across specimens of one class the styles differ
    bool specimen_variation = false;
    for (int cls = 0; cls < 6; ++cls) {
        const std::string a = "syn_" + std::string(data::kClassNames[static_cast<std::size_t>(cls)]) + "_00";
        const std::string b = "syn_" + std::string(data::kClassNames[static_cast<std::size_t>(cls)]) + "_01";
        if (first_of.at(a)->pixels.pixels != first_of.at(b)->pixels.pixels)
            specimen_variation = true;
    }
    CHECK(specimen_variation);
}

TEST_CASE("correlation 0: same-specimen and cross-specimen distances match within 5%") {
    synth::SynthSpec spec;
    spec.specimens_per_class = 4;
    spec.cells_per_specimen = 24;
    spec.intra_specimen_correlation = 0.0;
    spec.seed = 12;
    const data::Records records = synth::generate(spec);

    // group per class/specimen
    std::map<int, std::map<std::string, std::vector<const data::CellRecord*>>> by_class;
    for (const data::CellRecord& r : records)
        by_class[r.label][r.specimen_id].push_back(&r);

    auto dist = [](const data::CellRecord& a, const data::CellRecord& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.pixels.pixels.size(); ++i) {
            const double d = a.pixels.pixels[i] - b.pixels.pixels[i];
            s += d * d;
        }
        return std::sqrt(s);
    };

    Rng rng(55);
    double within_sum = 0.0, across_sum = 0.0;
    int pairs = 0;
    for (auto& [cls, specimens] : by_class) {
        std::vector<std::string> ids;
        for (auto& [id, cells] : specimens) ids.push_back(id);
        for (int p = 0; p < 250; ++p) {
            const auto& id_a = ids[rng.below(ids.size())];
            std::string id_b = ids[rng.below(ids.size())];
            while (id_b == id_a) id_b = ids[rng.below(ids.size())];
            const auto& cells_a = specimens[id_a];
            const auto& cells_b = specimens[id_b];
            const std::size_t i = rng.below(cells_a.size());
            std::size_t j = rng.below(cells_a.size());
            while (j == i) j = rng.below(cells_a.size());
            within_sum += dist(*cells_a[i], *cells_a[j]);
            across_sum += dist(*cells_a[i], *cells_b[rng.below(cells_b.size())]);
            ++pairs;
        }
    }
    const double ratio = (within_sum / pairs) / (across_sum / pairs);
    CHECK(ratio == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("correlation knob and counts are validated") {
    synth::SynthSpec spec;
    spec.intra_specimen_correlation = 1.5;
    CHECK_THROWS_AS((void)synth::generate(spec), ConfigError);
    spec.intra_specimen_correlation = 0.5;
    spec.cells_per_specimen = 0;
    CHECK_THROWS_AS((void)synth::generate(spec), ConfigError);
    spec.cells_per_specimen = 1;
    spec.classes = 7;
    CHECK_THROWS_AS((void)synth::generate(spec), ConfigError);
}

TEST_CASE("pixel intensities stay in [0, 1]") {
    synth::SynthSpec spec;
    spec.specimens_per_class = 1;
    spec.cells_per_specimen = 3;
    spec.noise_std = 0.2;  // aggressive noise still clamps
    spec.seed = 3;
    for (const data::CellRecord& r : synth::generate(spec))
        for (float p : r.pixels.pixels) {
            CHECK(p >= 0.f);
            CHECK(p <= 1.f);
        }
}
