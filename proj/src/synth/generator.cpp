#include "hep2/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "hep2/rng.hpp"

namespace hep2::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Dot {
    double u = 0.0, v = 0.0;  // offset from pattern center, pattern frame
    double radius = 1.0;
    double amp = 0.6;
};

// Everything that defines one rendered cell besides jitter and noise.
struct CellStyle {
    double disc_radius = 24.0;
    double interior = 0.1;   // disc fill level
    double gain = 1.0;       // global brightness
    double ring_radius = 0.0, ring_width = 1.0, ring_amp = 0.0;
    double mottle_amp = 0.0, mottle_fu = 0.0, mottle_fv = 0.0, mottle_pu = 0.0, mottle_pv = 0.0;
    std::vector<Dot> dots;
};

// Base parameter regimes per class; specimen styles perturb these
// multiplicatively, and the perturbation's influence on cells scales with
// the correlation knob.
struct Regime {
    double interior_lo, interior_hi;
    int count_lo, count_hi;          // dots
    double radius_lo, radius_hi;     // dot radius
    double amp_lo, amp_hi;           // dot amplitude
};

// class order: Homogeneous, Speckled, Nucleolar, Centromere, NuMem, Golgi
constexpr Regime kRegimes[6] = {
    {0.50, 0.64, 0, 0, 0.0, 0.0, 0.0, 0.0},        // filled disc, mottled
    {0.14, 0.20, 15, 22, 2.6, 3.4, 0.55, 0.70},    // many medium dots
    {0.10, 0.16, 2, 4, 5.5, 8.0, 0.60, 0.75},      // few large blobs
    {0.10, 0.16, 45, 70, 1.1, 1.6, 0.60, 0.75},    // dense tiny dots
    {0.16, 0.22, 0, 0, 0.0, 0.0, 0.0, 0.0},        // membrane ring
    {0.10, 0.16, 3, 6, 3.0, 4.5, 0.55, 0.70},      // one-sided cluster
};

// Per-specimen multiplicative style. Ranges are wide enough that styles of
// adjacent classes overlap (small-dot speckled specimens meet large-dot
// centromere specimens), which is what makes cross-specimen folds hard.
struct Style {
    double gain = 1.0;
    double interior_mult = 1.0;
    double radius_mult = 1.0;
    double count_mult = 1.0;
    double amp_mult = 1.0;
    double ring_radius_mult = 1.0, ring_width_mult = 1.0;
};

Style draw_style(Rng& rng) {
    Style s;
    s.gain = rng.uniform(0.60, 1.30);
    s.interior_mult = rng.uniform(0.70, 1.35);
    s.radius_mult = rng.uniform(0.70, 1.45);
    s.count_mult = rng.uniform(0.70, 1.40);
    s.amp_mult = rng.uniform(0.80, 1.20);
    s.ring_radius_mult = rng.uniform(0.85, 1.10);
    s.ring_width_mult = rng.uniform(0.70, 1.50);
    return s;
}

double blend(double fresh, double styled, double rho) {
    return (1.0 - rho) * fresh + rho * styled;
}

// Dot placements plus the homogeneous mottle phases. Kept separate from the
// continuous parameters so a specimen's cells can literally share
// positions when the correlation coin says so.
struct Layout {
    std::vector<Dot> dots;  // positions only; radius/amp filled in later
    double mottle_fu = 0.0, mottle_fv = 0.0, mottle_pu = 0.0, mottle_pv = 0.0;
};

Layout draw_layout(int cls, const Regime& reg, double count_mult, double disc_radius, Rng& rng) {
    Layout lay;
    if (cls == 0) {
        lay.mottle_fu = rng.uniform(0.06, 0.14);
        lay.mottle_fv = rng.uniform(0.06, 0.14);
        lay.mottle_pu = rng.uniform(0.0, 2.0 * kPi);
        lay.mottle_pv = rng.uniform(0.0, 2.0 * kPi);
        return lay;
    }
    if (cls == 4) return lay;  // ring needs no dots

    int count = reg.count_lo == reg.count_hi
                    ? reg.count_lo
                    : reg.count_lo + static_cast<int>(rng.below(
                          static_cast<std::uint64_t>(reg.count_hi - reg.count_lo + 1)));
    count = std::max(1, static_cast<int>(std::lround(count * count_mult)));

    if (cls == 5) {
        // Golgi: cluster at a fixed-direction offset from the nucleus
        const double lobe_ang = rng.uniform(0.0, 2.0 * kPi);
        const double lobe_dist = rng.uniform(0.42, 0.55) * disc_radius;
        for (int i = 0; i < count; ++i) {
            Dot d;
            const double a = lobe_ang + rng.uniform(-0.55, 0.55);
            const double r = lobe_dist + rng.uniform(-3.0, 3.0);
            d.u = r * std::cos(a);
            d.v = r * std::sin(a);
            lay.dots.push_back(d);
        }
        return lay;
    }

    // uniform placement inside the disc, margin for the dot body
    for (int i = 0; i < count; ++i) {
        Dot d;
        const double a = rng.uniform(0.0, 2.0 * kPi);
        const double r = (disc_radius - 3.0) * std::sqrt(rng.uniform());
        d.u = r * std::cos(a);
        d.v = r * std::sin(a);
        lay.dots.push_back(d);
    }
    return lay;
}

// Continuous texture parameters, drawn fresh from the base regime or once
// per specimen with the style multipliers applied.
struct Scalars {
    double gain = 1.0;
    double interior = 0.1;
    double ring_radius = 0.0, ring_width = 2.0, ring_amp = 0.0;
    double mottle_amp = 0.0;
};

Scalars draw_scalars(int cls, const Regime& reg, double disc_radius, Rng& rng,
                     const Style* style) {
    Scalars sc;
    sc.gain = style ? style->gain : rng.uniform(0.92, 1.08);
    sc.interior =
        rng.uniform(reg.interior_lo, reg.interior_hi) * (style ? style->interior_mult : 1.0);
    if (cls == 0)
        sc.mottle_amp = rng.uniform(0.04, 0.09) * (style ? style->amp_mult : 1.0);
    if (cls == 4) {
        sc.ring_radius = (disc_radius - rng.uniform(2.0, 3.0)) *
                         (style ? style->ring_radius_mult : 1.0);
        sc.ring_width = rng.uniform(1.6, 2.4) * (style ? style->ring_width_mult : 1.0);
        sc.ring_amp = rng.uniform(0.60, 0.75) * (style ? style->amp_mult : 1.0);
    }
    return sc;
}

double smooth_edge(double r, double edge, double softness) {
    // 1 well inside, 0 well outside
    const double t = std::clamp((edge - r) / softness * 0.5 + 0.5, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

data::GrayImage render_cell(const CellStyle& cs, int side, double theta, double shift_y,
                            double shift_x, double noise_std, Rng& noise_rng) {
    data::GrayImage img(side, side);
    const double cy = side / 2.0 - 0.5 + shift_y;
    const double cx = side / 2.0 - 0.5 + shift_x;
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);

    // disc, ring and mottle in one per-pixel pass (pattern-frame coords)
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const double dy = y - cy, dx = x - cx;
            const double u = cos_t * dx + sin_t * dy;
            const double v = -sin_t * dx + cos_t * dy;
            const double r = std::sqrt(u * u + v * v);
            const double env = smooth_edge(r, cs.disc_radius, 3.0);
            double val = cs.interior * env;
            if (cs.mottle_amp > 0.0)
                val += cs.mottle_amp * env * std::sin(u * cs.mottle_fu + cs.mottle_pu) *
                       std::sin(v * cs.mottle_fv + cs.mottle_pv);
            if (cs.ring_amp > 0.0) {
                const double d = (r - cs.ring_radius) / cs.ring_width;
                val += cs.ring_amp * std::exp(-0.5 * d * d);
            }
            img.at(y, x) = static_cast<float>(val);
        }

    // dots: isotropic gaussians, so rotating the center equals rotating the
    // field; render each into a local window only
    for (const Dot& d : cs.dots) {
        const double iy = cy + (sin_t * d.u + cos_t * d.v);
        const double ix = cx + (cos_t * d.u - sin_t * d.v);
        const double sigma = std::max(0.4, d.radius * 0.5);
        const int reach = static_cast<int>(std::ceil(3.0 * sigma));
        const int y0 = std::max(0, static_cast<int>(iy) - reach);
        const int y1 = std::min(side - 1, static_cast<int>(iy) + reach + 1);
        const int x0 = std::max(0, static_cast<int>(ix) - reach);
        const int x1 = std::min(side - 1, static_cast<int>(ix) + reach + 1);
        const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const double dy = y - iy, dx = x - ix;
                img.at(y, x) += static_cast<float>(d.amp * std::exp(-(dy * dy + dx * dx) * inv2s2));
            }
    }

    for (float& p : img.pixels) {
        double val = p * cs.gain;
        if (noise_std > 0.0) val += noise_std * noise_rng.normal();
        p = static_cast<float>(std::clamp(val, 0.0, 1.0));
    }
    return img;
}

// Specimen-level canonical cell: the exact cell every member converges to
// as correlation approaches 1.
struct SpecimenStyle {
    Layout layout;
    Scalars scalars;
    Style mults;
    std::vector<double> dot_radius, dot_amp;
};

SpecimenStyle draw_specimen(int cls, const Regime& reg, double disc_radius, Rng& rng) {
    SpecimenStyle sp;
    sp.mults = draw_style(rng);
    sp.layout = draw_layout(cls, reg, sp.mults.count_mult, disc_radius, rng);
    sp.scalars = draw_scalars(cls, reg, disc_radius, rng, &sp.mults);
    for (std::size_t i = 0; i < sp.layout.dots.size(); ++i) {
        sp.dot_radius.push_back(rng.uniform(reg.radius_lo, reg.radius_hi) *
                                sp.mults.radius_mult);
        sp.dot_amp.push_back(rng.uniform(reg.amp_lo, reg.amp_hi) * sp.mults.amp_mult);
    }
    return sp;
}

CellStyle compose_cell(int cls, const Regime& reg, const SpecimenStyle& sp, double rho,
                       Rng& cell_rng) {
    CellStyle cs;
    cs.disc_radius = 24.0;

    // scalar fields pull toward the specimen's canonical values
    const Scalars fresh = draw_scalars(cls, reg, cs.disc_radius, cell_rng, nullptr);
    cs.gain = blend(fresh.gain, sp.scalars.gain, rho);
    cs.interior = blend(fresh.interior, sp.scalars.interior, rho);
    cs.mottle_amp = blend(fresh.mottle_amp, sp.scalars.mottle_amp, rho);
    cs.ring_radius = blend(fresh.ring_radius, sp.scalars.ring_radius, rho);
    cs.ring_width = blend(fresh.ring_width, sp.scalars.ring_width, rho);
    cs.ring_amp = blend(fresh.ring_amp, sp.scalars.ring_amp, rho);

    // the layout is shared outright with probability rho
    const bool reuse = cell_rng.uniform() < rho;
    if (reuse) {
        cs.mottle_fu = sp.layout.mottle_fu;
        cs.mottle_fv = sp.layout.mottle_fv;
        cs.mottle_pu = sp.layout.mottle_pu;
        cs.mottle_pv = sp.layout.mottle_pv;
        cs.dots = sp.layout.dots;
        for (std::size_t i = 0; i < cs.dots.size(); ++i) {
            cs.dots[i].radius = blend(cell_rng.uniform(reg.radius_lo, reg.radius_hi),
                                      sp.dot_radius[i], rho);
            cs.dots[i].amp =
                blend(cell_rng.uniform(reg.amp_lo, reg.amp_hi), sp.dot_amp[i], rho);
        }
    } else {
        const Layout lay = draw_layout(cls, reg, blend(1.0, sp.mults.count_mult, rho),
                                       cs.disc_radius, cell_rng);
        cs.mottle_fu = lay.mottle_fu;
        cs.mottle_fv = lay.mottle_fv;
        cs.mottle_pu = lay.mottle_pu;
        cs.mottle_pv = lay.mottle_pv;
        cs.dots = lay.dots;
        const double radius_mult = blend(1.0, sp.mults.radius_mult, rho);
        const double amp_mult = blend(1.0, sp.mults.amp_mult, rho);
        for (Dot& d : cs.dots) {
            d.radius = cell_rng.uniform(reg.radius_lo, reg.radius_hi) * radius_mult;
            d.amp = cell_rng.uniform(reg.amp_lo, reg.amp_hi) * amp_mult;
        }
    }
    return cs;
}

}  // namespace

void SynthSpec::check() const {
    if (specimens_per_class <= 0 || cells_per_specimen <= 0)
        throw ConfigError("synthetic spec counts must be positive");
    if (classes < 2 || classes > data::kNumClasses)
        throw ConfigError("classes must be in [2, " + std::to_string(data::kNumClasses) + "]");
    if (intra_specimen_correlation < 0.0 || intra_specimen_correlation > 1.0)
        throw ConfigError("intra_specimen_correlation must be in [0, 1]");
    if (noise_std < 0.0) throw ConfigError("noise_std must be nonnegative");
    if (side < 16) throw ConfigError("side too small");
    if (max_shift < 0) throw ConfigError("max_shift must be nonnegative");
}

data::Records generate(const SynthSpec& spec) {
    spec.check();
    const double rho = spec.intra_specimen_correlation;

    data::Records out;
    out.reserve(static_cast<std::size_t>(spec.classes) * spec.specimens_per_class *
                spec.cells_per_specimen);

    for (int cls = 0; cls < spec.classes; ++cls) {
        const Regime& reg = kRegimes[cls];
        for (int s = 0; s < spec.specimens_per_class; ++s) {
            const std::uint64_t spec_stream =
                static_cast<std::uint64_t>(cls) * 1000 + static_cast<std::uint64_t>(s);
            Rng spec_rng(mix_seed(spec.seed, spec_stream));
            const SpecimenStyle sp = draw_specimen(cls, reg, 24.0, spec_rng);

            char id[48];
            std::snprintf(id, sizeof(id), "syn_%s_%02d",
                          data::kClassNames[static_cast<std::size_t>(cls)], s);

            for (int c = 0; c < spec.cells_per_specimen; ++c) {
                Rng cell_rng(mix_seed(spec.seed, (spec_stream << 16) + 7919 +
                                                     static_cast<std::uint64_t>(c)));
                const CellStyle cs = compose_cell(cls, reg, sp, rho, cell_rng);

                const double theta =
                    spec.random_orientation ? cell_rng.uniform(0.0, 2.0 * kPi) : 0.0;
                const double sy = spec.max_shift > 0
                                      ? cell_rng.uniform(-spec.max_shift, spec.max_shift)
                                      : 0.0;
                const double sx = spec.max_shift > 0
                                      ? cell_rng.uniform(-spec.max_shift, spec.max_shift)
                                      : 0.0;

                data::CellRecord rec;
                rec.pixels =
                    render_cell(cs, spec.side, theta, sy, sx, spec.noise_std, cell_rng);
                rec.label = cls;
                rec.specimen_id = id;
                out.push_back(std::move(rec));
            }
        }
    }
    return out;
}

}  // namespace hep2::synth
