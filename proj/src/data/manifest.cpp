#include "hep2/data/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hep2/data/image.hpp"

namespace fs = std::filesystem;

namespace hep2::data {

std::array<std::int64_t, kNumClasses> DatasetManifest::per_class() const {
    std::array<std::int64_t, kNumClasses> counts{};
    for (const ManifestEntry& e : entries) ++counts[static_cast<std::size_t>(e.label)];
    return counts;
}

std::map<std::string, std::int64_t> DatasetManifest::per_specimen() const {
    std::map<std::string, std::int64_t> counts;
    for (const ManifestEntry& e : entries) ++counts[e.specimen_id];
    return counts;
}

namespace {

void check_field(const std::string& value, const std::string& what) {
    if (value.empty()) throw DataError("manifest: empty " + what);
    if (value.find_first_of(",\n\r") != std::string::npos)
        throw DataError("manifest: " + what + " '" + value + "' contains a delimiter");
}

}  // namespace

DatasetManifest write_manifest(const Records& records, const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir / "images");

    DatasetManifest manifest;
    manifest.entries.reserve(records.size());

    std::ofstream csv(dir / "manifest.csv");
    if (!csv) throw DataError("cannot write manifest: " + (dir / "manifest.csv").string());
    csv << "path,label,specimen_id,provenance\n";

    char name[32];
    for (std::size_t i = 0; i < records.size(); ++i) {
        const CellRecord& r = records[i];
        check_field(r.specimen_id, "specimen_id");
        std::snprintf(name, sizeof(name), "images/cell_%06zu.png", i);
        save_image((dir / name).string(), r.pixels);

        ManifestEntry e{name, r.label, r.specimen_id, r.provenance};
        csv << e.path << "," << name_from_label(e.label) << "," << e.specimen_id << ","
            << e.provenance.str() << "\n";
        manifest.entries.push_back(std::move(e));
    }
    if (!csv) throw DataError("manifest write failed: " + (dir / "manifest.csv").string());
    return manifest;
}

DatasetManifest read_manifest_index(const std::string& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f) throw DataError("cannot open manifest: " + manifest_path);

    DatasetManifest manifest;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "path,label,specimen_id,provenance")
                throw DataError("manifest line 1: bad header '" + line + "'");
            continue;
        }

        std::array<std::string, 4> fields;
        std::size_t start = 0;
        for (int fi = 0; fi < 3; ++fi) {
            const auto comma = line.find(',', start);
            if (comma == std::string::npos)
                throw DataError("manifest line " + std::to_string(line_no) +
                                ": expected 4 comma-separated fields");
            fields[static_cast<std::size_t>(fi)] = line.substr(start, comma - start);
            start = comma + 1;
        }
        fields[3] = line.substr(start);
        if (fields[3].find(',') != std::string::npos)
            throw DataError("manifest line " + std::to_string(line_no) +
                            ": expected 4 comma-separated fields");

        ManifestEntry e;
        e.path = fields[0];
        try {
            e.label = label_from_name(fields[1]);
            e.provenance = Provenance::parse(fields[3]);
        } catch (const DataError& err) {
            throw DataError("manifest line " + std::to_string(line_no) + ": " + err.what());
        }
        e.specimen_id = fields[2];
        if (e.path.empty() || e.specimen_id.empty())
            throw DataError("manifest line " + std::to_string(line_no) + ": empty field");
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

Records load_manifest(const std::string& manifest_path) {
    const DatasetManifest manifest = read_manifest_index(manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();

    Records records;
    records.reserve(manifest.entries.size());
    for (const ManifestEntry& e : manifest.entries) {
        const fs::path img_path = base / e.path;
        if (!fs::exists(img_path))
            throw DataError("manifest references missing image: " + img_path.string());
        CellRecord r;
        r.pixels = load_image(img_path.string());
        r.label = e.label;
        r.specimen_id = e.specimen_id;
        r.provenance = e.provenance;
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace hep2::data
