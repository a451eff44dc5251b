#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hep2/data/records.hpp"

namespace hep2::data {

/// Index of a dataset on disk: one line per record referencing its image
/// file relative to the manifest location. Count summaries are recomputed
/// from the entries, never stored.
struct ManifestEntry {
    std::string path;
    int label = 0;
    std::string specimen_id;
    Provenance provenance;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    std::array<std::int64_t, kNumClasses> per_class() const;
    std::map<std::string, std::int64_t> per_specimen() const;
};

/// Writes records into out_dir: images/<cell_NNNNNN>.png plus
/// manifest.csv (header "path,label,specimen_id,provenance"). Returns the
/// written manifest. Reruns with identical records are byte-identical.
DatasetManifest write_manifest(const Records& records, const std::string& out_dir);

/// Reads manifest.csv and decodes every referenced image. Missing files
/// and malformed lines carry the path / line number in the error.
Records load_manifest(const std::string& manifest_path);

/// The manifest index alone, without decoding images.
DatasetManifest read_manifest_index(const std::string& manifest_path);

}  // namespace hep2::data
