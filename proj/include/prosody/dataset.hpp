// Dataset directory scanning and manifest export.
//
// Expected layout: root/<singer_id>/<emotion_label>/<clip>.wav. Labels
// come from directory names; directories that do not name one of the 20
// taxonomy emotions are skipped with a warning.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "prosody/common.hpp"
#include "prosody/log.hpp"
#include "prosody/taxonomy.hpp"

namespace prosody {

struct ManifestEntry {
    std::string clip_path;
    std::string singer_id;
    Emotion emotion = Emotion::Anger;
};

struct DatasetManifest {
    std::string root;
    std::vector<ManifestEntry> entries;  // sorted by clip_path, unique
};

inline DatasetManifest scan_dataset(const std::string& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root))
        throw DataError("dataset root is not a directory: " + root);

    DatasetManifest manifest;
    manifest.root = root;

    std::vector<fs::path> singer_dirs;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory()) singer_dirs.push_back(e.path());
    std::sort(singer_dirs.begin(), singer_dirs.end());

    for (const auto& singer_dir : singer_dirs) {
        const std::string singer_id = singer_dir.filename().string();
        std::vector<fs::path> emotion_dirs;
        for (const auto& e : fs::directory_iterator(singer_dir))
            if (e.is_directory()) emotion_dirs.push_back(e.path());
        std::sort(emotion_dirs.begin(), emotion_dirs.end());

        for (const auto& emotion_dir : emotion_dirs) {
            const std::string label_text = emotion_dir.filename().string();
            if (!is_emotion_name(label_text)) {
                log_warn("skipping directory with unknown emotion label: " +
                         emotion_dir.string());
                continue;
            }
            const Emotion emotion = parse_emotion(label_text);
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(emotion_dir)) {
                if (!e.is_regular_file()) continue;
                if (to_lower(e.path().extension().string()) != ".wav") continue;
                files.push_back(e.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files)
                manifest.entries.push_back({f.string(), singer_id, emotion});
        }
    }

    std::sort(manifest.entries.begin(), manifest.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) {
                  return a.clip_path < b.clip_path;
              });
    manifest.entries.erase(
        std::unique(manifest.entries.begin(), manifest.entries.end(),
                    [](const ManifestEntry& a, const ManifestEntry& b) {
                        return a.clip_path == b.clip_path;
                    }),
        manifest.entries.end());

    if (manifest.entries.empty())
        throw DataError("empty dataset: no labeled .wav files under " + root);
    return manifest;
}

// CSV export: header `clip_path,singer_id,emotion`, UTF-8, LF endings.
inline void write_manifest_csv(const DatasetManifest& manifest,
                               const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest: " + path);
    out << "clip_path,singer_id,emotion\n";
    for (const auto& e : manifest.entries)
        out << e.clip_path << ',' << e.singer_id << ','
            << emotion_name(e.emotion) << '\n';
}

}  // namespace prosody
