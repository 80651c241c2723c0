#pragma once

// Zeeman structure of the lowest 4f and 5d Kramers doublets for a field along
// the crystal b-axis, and the two-frequency repumping resonance fields.

#include <array>
#include <optional>
#include <string>

namespace holeburn {

struct ZeemanConfig {
    double g_ground = 19e6 / 1e-3;   // Hz/T
    double g_excited = 25.5e6 / 1e-3; // Hz/T
    double stray_field = 0.2e-3;      // T
    int field_sign = +1;              // orientation of the stray field

    void validate() const;
};

double total_field(double applied, const ZeemanConfig& cfg);
// Inverse of total_field.
double applied_field(double total, const ZeemanConfig& cfg);

struct Splittings {
    double ground = 0.0;  // Hz, 4f doublet
    double excited = 0.0; // Hz, 5d doublet
};

Splittings splittings(double b_total, const ZeemanConfig& cfg);

// One ion subgroup: the laser drives `laser_line` from one ground level; the
// other ground level absorbs at `cross_line` (to the other excited level) and
// `ground_line` (to the same excited level).
struct SubgroupLine {
    char label = 'A';
    int ground_level = 0;  // -1 or +1
    int excited_level = 0; // -1 or +1
    double laser_line = 0.0;  // Hz
    double cross_line = 0.0;  // Hz
    double ground_line = 0.0; // Hz

    double pair_separation() const;
};

struct SubgroupLines {
    std::array<SubgroupLine, 4> groups;
};

SubgroupLines subgroup_lines(double f_laser, double b_total, const ZeemanConfig& cfg);

struct ResonanceFields {
    double delta_f = 0.0;                 // Hz
    double b_ground = 0.0;                // T, total field
    double b_sum = 0.0;                   // T, total field
    std::optional<double> b_diff;         // T, absent when g_ground == g_excited
    double b_ground_applied = 0.0;        // T
    double b_sum_applied = 0.0;           // T
    std::optional<double> b_diff_applied; // T
};

ResonanceFields resonance_fields(double delta_f_laser, const ZeemanConfig& cfg);

} // namespace holeburn
