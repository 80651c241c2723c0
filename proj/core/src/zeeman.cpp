#include "holeburn/zeeman.hpp"

#include <cmath>

#include "holeburn/errors.hpp"

namespace holeburn {

void ZeemanConfig::validate() const {
    if (!(g_ground > 0.0) || !(g_excited > 0.0))
        throw InputError("Zeeman coefficients must be > 0");
    if (field_sign != 1 && field_sign != -1) throw InputError("field_sign must be +1 or -1");
    if (!std::isfinite(stray_field)) throw InputError("stray field must be finite");
}

double total_field(double applied, const ZeemanConfig& cfg) {
    return applied + cfg.field_sign * cfg.stray_field;
}

double applied_field(double total, const ZeemanConfig& cfg) {
    return total - cfg.field_sign * cfg.stray_field;
}

Splittings splittings(double b_total, const ZeemanConfig& cfg) {
    const double b = std::abs(b_total);
    return {cfg.g_ground * b, cfg.g_excited * b};
}

double SubgroupLine::pair_separation() const { return std::abs(cross_line - laser_line); }

SubgroupLines subgroup_lines(double f_laser, double b_total, const ZeemanConfig& cfg) {
    const auto s = splittings(b_total, cfg);
    // Ground levels sit at +-ground/2, excited at +-excited/2 around the ion's
    // zero-field line. The subgroup is fixed by which transition the laser hits.
    constexpr std::array<std::pair<int, int>, 4> levels{{{-1, +1}, {-1, -1}, {+1, +1}, {+1, -1}}};
    SubgroupLines out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto [g, e] = levels[i];
        auto& line = out.groups[i];
        line.label = static_cast<char>('A' + i);
        line.ground_level = g;
        line.excited_level = e;
        line.laser_line = f_laser;
        line.cross_line = f_laser - (e * s.excited - g * s.ground);
        line.ground_line = f_laser + g * s.ground;
    }
    return out;
}

ResonanceFields resonance_fields(double delta_f_laser, const ZeemanConfig& cfg) {
    cfg.validate();
    if (!(delta_f_laser > 0.0)) throw InputError("laser frequency separation must be > 0");
    ResonanceFields r;
    r.delta_f = delta_f_laser;
    r.b_ground = delta_f_laser / cfg.g_ground;
    r.b_sum = delta_f_laser / (cfg.g_ground + cfg.g_excited);
    const double gdiff = std::abs(cfg.g_ground - cfg.g_excited);
    if (gdiff > 0.0) r.b_diff = delta_f_laser / gdiff;
    r.b_ground_applied = applied_field(r.b_ground, cfg);
    r.b_sum_applied = applied_field(r.b_sum, cfg);
    if (r.b_diff) r.b_diff_applied = applied_field(*r.b_diff, cfg);
    return r;
}

} // namespace holeburn
