// Emotion taxonomy: the 20 Geneva-Wheel emotions and their projection
// onto the four valence/control quadrants.
//
// Label codes are fixed, column-major over the quadrant table
// (HCN, HCP, LCN, LCP; five emotions each), so code / 5 is the quadrant.
#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "prosody/common.hpp"

namespace prosody {

enum class Emotion : int {
    // HCN: high control, negative valence
    Anger = 0,
    Contempt,
    Disgust,
    Hate,
    Regret,
    // HCP: high control, positive valence
    Amusement,
    Interest,
    Joy,
    Pleasure,
    Pride,
    // LCN: low control, negative valence
    Disappointment,
    Fear,
    Guilt,
    Sadness,
    Shame,
    // LCP: low control, positive valence
    Admiration,
    Compassion,
    Contentment,
    Love,
    Relief,
};

inline constexpr int kEmotionCount = 20;

enum class Quadrant : int { HCN = 0, HCP = 1, LCN = 2, LCP = 3 };

inline constexpr int kQuadrantCount = 4;

inline constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "Anger",          "Contempt", "Disgust",     "Hate",  "Regret",
    "Amusement",      "Interest", "Joy",         "Pleasure", "Pride",
    "Disappointment", "Fear",     "Guilt",       "Sadness",  "Shame",
    "Admiration",     "Compassion", "Contentment", "Love",   "Relief",
};

inline constexpr std::array<std::string_view, kQuadrantCount> kQuadrantNames = {
    "HCN", "HCP", "LCN", "LCP"};

inline std::string_view emotion_name(Emotion e) {
    return kEmotionNames[static_cast<int>(e)];
}

inline std::string_view quadrant_name(Quadrant q) {
    return kQuadrantNames[static_cast<int>(q)];
}

inline Quadrant quadrant_of(Emotion e) {
    return static_cast<Quadrant>(static_cast<int>(e) / 5);
}

// Case-insensitive match against the 20 canonical names; surrounding
// whitespace is ignored.
inline Emotion parse_emotion(std::string_view text) {
    std::string needle = to_lower(trim(text));
    for (int i = 0; i < kEmotionCount; ++i) {
        if (needle == to_lower(kEmotionNames[i])) return static_cast<Emotion>(i);
    }
    std::string valid;
    for (int i = 0; i < kEmotionCount; ++i) {
        if (i) valid += ", ";
        valid += kEmotionNames[i];
    }
    throw DataError("unknown emotion label '" + std::string(text) +
                    "'; valid labels: " + valid);
}

inline bool is_emotion_name(std::string_view text) {
    std::string needle = to_lower(trim(text));
    for (int i = 0; i < kEmotionCount; ++i)
        if (needle == to_lower(kEmotionNames[i])) return true;
    return false;
}

}  // namespace prosody
