//! Parametric terrain height profiles. Every profile is zero for `x < 0`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerrainKind {
    Flat,
    SingleSlope,
    HighFreqRugged,
    Sinusoid,
}

impl std::str::FromStr for TerrainKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Self::Flat),
            "single_slope" | "slope" => Ok(Self::SingleSlope),
            "high_freq_rugged" | "rugged" => Ok(Self::HighFreqRugged),
            "sinusoid" | "sine" => Ok(Self::Sinusoid),
            other => Err(invalid("terrain.kind", format!("unknown terrain `{other}`"))),
        }
    }
}

/// Terrain parameters as they appear in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TerrainParams {
    pub slope_deg: f64,
    /// Horizontal run of each ramp.
    pub slope_len_m: f64,
    pub flat_len_m: f64,
    /// Upper bound on the bump field height (sum of component amplitudes).
    pub bump_amplitude_m: f64,
    pub bump_wavelength_min_m: f64,
    pub bump_wavelength_max_m: f64,
    pub bump_count: u32,
    pub bump_length_m: f64,
    pub bump_taper_m: f64,
    pub seed: u64,
    pub sine_amplitude_m: f64,
    pub sine_wavelength_m: f64,
    pub sine_periods: u32,
}

impl Default for TerrainParams {
    fn default() -> Self {
        Self {
            slope_deg: 10.0,
            slope_len_m: 0.35,
            flat_len_m: 1.0,
            bump_amplitude_m: 0.02,
            bump_wavelength_min_m: 0.1,
            bump_wavelength_max_m: 0.4,
            bump_count: 8,
            bump_length_m: 4.0,
            bump_taper_m: 0.25,
            seed: 7,
            sine_amplitude_m: 0.03,
            sine_wavelength_m: 1.0,
            sine_periods: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amplitude: f64,
    pub wavelength: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerrainProfile {
    Flat,
    SingleSlope {
        slope_deg: f64,
        slope_len_m: f64,
        flat_len_m: f64,
    },
    HighFreqRugged {
        bumps: Vec<Bump>,
        length_m: f64,
        taper_m: f64,
    },
    Sinusoid {
        amplitude_m: f64,
        wavelength_m: f64,
        periods: u32,
    },
}

impl TerrainProfile {
    pub fn build(kind: TerrainKind, p: &TerrainParams) -> Result<Self> {
        Ok(match kind {
            TerrainKind::Flat => Self::Flat,
            TerrainKind::SingleSlope => {
                if !(p.slope_deg.abs() < 89.0 && p.slope_len_m >= 0.0 && p.flat_len_m >= 0.0) {
                    return Err(invalid("terrain", "slope needs |slope_deg| < 89 and non-negative lengths"));
                }
                Self::SingleSlope {
                    slope_deg: p.slope_deg,
                    slope_len_m: p.slope_len_m,
                    flat_len_m: p.flat_len_m,
                }
            }
            TerrainKind::HighFreqRugged => Self::rugged(p)?,
            TerrainKind::Sinusoid => {
                if !(p.sine_wavelength_m > 0.0) {
                    return Err(invalid("terrain.sine_wavelength_m", "must be > 0"));
                }
                Self::Sinusoid {
                    amplitude_m: p.sine_amplitude_m,
                    wavelength_m: p.sine_wavelength_m,
                    periods: p.sine_periods,
                }
            }
        })
    }

    /// Seeded sum of `bump_count` sinusoids with wavelengths drawn uniformly
    /// from the configured band, tapered to zero at both ends.
    fn rugged(p: &TerrainParams) -> Result<Self> {
        let (lo, hi) = (p.bump_wavelength_min_m, p.bump_wavelength_max_m);
        if !(lo > 0.0 && hi >= lo) {
            return Err(invalid("terrain.bump_wavelength", "need 0 < min <= max"));
        }
        if p.bump_count == 0 || p.bump_amplitude_m < 0.0 {
            return Err(invalid("terrain.bump_*", "need bump_count >= 1 and amplitude >= 0"));
        }
        if !(p.bump_taper_m >= 0.0 && 2.0 * p.bump_taper_m <= p.bump_length_m) {
            return Err(invalid("terrain.bump_taper_m", "taper must fit twice in bump_length_m"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let amplitude = p.bump_amplitude_m / p.bump_count as f64;
        let bumps = (0..p.bump_count)
            .map(|_| Bump {
                amplitude,
                wavelength: if hi > lo { rng.random_range(lo..hi) } else { lo },
                phase: rng.random_range(0.0..TAU),
            })
            .collect();
        Ok(Self::HighFreqRugged {
            bumps,
            length_m: p.bump_length_m,
            taper_m: p.bump_taper_m,
        })
    }

    /// Horizontal extent of the feature, starting at `x = 0`.
    pub fn extent(&self) -> f64 {
        match self {
            Self::Flat => 0.0,
            Self::SingleSlope {
                slope_len_m,
                flat_len_m,
                ..
            } => 2.0 * slope_len_m + flat_len_m,
            Self::HighFreqRugged { length_m, .. } => *length_m,
            Self::Sinusoid {
                wavelength_m,
                periods,
                ..
            } => wavelength_m * *periods as f64,
        }
    }

    pub fn height(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            Self::Flat => 0.0,
            Self::SingleSlope {
                slope_deg,
                slope_len_m,
                flat_len_m,
            } => {
                let grade = slope_deg.to_radians().tan();
                let top = slope_len_m + flat_len_m;
                if x < *slope_len_m {
                    x * grade
                } else if x < top {
                    slope_len_m * grade
                } else if x < top + slope_len_m {
                    (top + slope_len_m - x) * grade
                } else {
                    0.0
                }
            }
            Self::HighFreqRugged {
                bumps,
                length_m,
                taper_m,
            } => {
                if x > *length_m {
                    return 0.0;
                }
                let window = taper(x, *taper_m) * taper(length_m - x, *taper_m);
                let sum: f64 = bumps
                    .iter()
                    .map(|b| b.amplitude * (TAU * x / b.wavelength + b.phase).sin())
                    .sum();
                window * sum
            }
            Self::Sinusoid {
                amplitude_m,
                wavelength_m,
                periods,
            } => {
                if x > wavelength_m * *periods as f64 {
                    0.0
                } else {
                    amplitude_m * (TAU * x / wavelength_m).sin()
                }
            }
        }
    }
}

pub fn terrain_height(profile: &TerrainProfile, x: f64) -> f64 {
    profile.height(x)
}

// sin² ramp from 0 at d = 0 to 1 at d = width
fn taper(d: f64, width: f64) -> f64 {
    if width <= 0.0 || d >= width {
        1.0
    } else if d <= 0.0 {
        0.0
    } else {
        (0.5 * PI * d / width).sin().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn slope_1m() -> TerrainProfile {
        TerrainProfile::SingleSlope {
            slope_deg: 10.0,
            slope_len_m: 1.5,
            flat_len_m: 1.0,
        }
    }

    #[test]
    fn slope_examples() {
        let t = slope_1m();
        assert_eq!(t.height(-1.0), 0.0);
        assert_relative_eq!(t.height(1.0), 0.176_326_980_708_465, max_relative = 1e-14);
        assert_relative_eq!(t.height(2.0), t.height(1.5));
        // symmetric descent
        assert_relative_eq!(t.height(3.0), t.height(1.0), max_relative = 1e-12);
        assert_eq!(t.height(4.5), 0.0);
    }

    #[test]
    fn sine_peak() {
        let t = TerrainProfile::Sinusoid {
            amplitude_m: 0.03,
            wavelength_m: 1.0,
            periods: 4,
        };
        assert_relative_eq!(t.height(0.25), 0.03, max_relative = 1e-15);
        assert_eq!(t.height(5.0), 0.0);
    }

    #[test]
    fn rugged_is_seeded_and_bounded() {
        let p = TerrainParams::default();
        let a = TerrainProfile::build(TerrainKind::HighFreqRugged, &p).unwrap();
        let b = TerrainProfile::build(TerrainKind::HighFreqRugged, &p).unwrap();
        assert_eq!(a, b);
        let c = TerrainProfile::build(TerrainKind::HighFreqRugged, &TerrainParams { seed: 8, ..p.clone() }).unwrap();
        assert_ne!(a, c);
        let mut peak = 0.0f64;
        for i in 0..=4000 {
            let h = a.height(i as f64 * 1e-3);
            peak = peak.max(h.abs());
        }
        assert!(peak <= p.bump_amplitude_m + 1e-12);
        assert!(peak > 0.2 * p.bump_amplitude_m);
        if let TerrainProfile::HighFreqRugged { bumps, .. } = &a {
            assert_eq!(bumps.len(), 8);
            assert!(bumps.iter().all(|b| (0.1..0.4).contains(&b.wavelength)));
        }
    }

    #[test]
    fn kind_names() {
        assert_eq!("rugged".parse::<TerrainKind>().unwrap(), TerrainKind::HighFreqRugged);
        assert!("moon".parse::<TerrainKind>().is_err());
    }

    proptest! {
        #[test]
        fn profiles_are_continuous(x in -0.5f64..6.0) {
            let p = TerrainParams::default();
            for kind in [TerrainKind::SingleSlope, TerrainKind::HighFreqRugged, TerrainKind::Sinusoid] {
                let t = TerrainProfile::build(kind, &p).unwrap();
                let h = 1e-7;
                prop_assert!((t.height(x + h) - t.height(x)).abs() < 1e-5, "{:?} jumps at {}", kind, x);
            }
        }
    }
}
