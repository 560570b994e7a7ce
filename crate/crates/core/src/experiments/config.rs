use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::points::PointSpec;
use super::{check_coupling, Axis};
use crate::calibration::{default_corpus, WeierstrassParams};
use crate::error::{Error, Result};
use crate::fractal_dim::DeltaLadder;
use crate::quantum_state::{fundamental_period, SignPattern, StateParams, Variant};

/// Full suite configuration, read from TOML. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Seed for randomized `Φ₀` signs.
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Write measured wall-clock times; off by default so reruns are byte-identical.
    pub record_runtime: bool,
    pub calibration: CalibrationConfig,
    pub space: SpaceConfig,
    pub time: TimeConfig,
    pub smooth: SmoothConfig,
    pub velocity: VelocityConfig,
    pub surface: SurfaceConfig,
    pub variants: VariantConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    pub samples: usize,
    pub base: f64,
    pub n_min: i32,
    pub n_max: i32,
    pub tolerance: f64,
    pub cases: Vec<WeierstrassParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceConfig {
    pub q: u64,
    pub s: Vec<f64>,
    #[serde(rename = "M")]
    pub m: u32,
    pub samples: usize,
    /// Ladder `δ = q^{-n}`.
    pub n_min: i32,
    pub n_max: i32,
    pub tolerance: f64,
    /// Time-invariance check: `s` and the times compared.
    pub invariance_s: f64,
    pub times: Vec<PointSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeCase {
    pub q: u64,
    pub s: f64,
    pub x: PointSpec,
    /// Ladder `δ = q^{-2N}` for `N = n_min..=n_max`.
    pub n_min: i32,
    pub n_max: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "M")]
    pub m: u32,
    pub samples: usize,
    pub tolerance: f64,
    pub cases: Vec<TimeCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothCase {
    pub q: u64,
    pub s: f64,
    /// `x = mπ/q^k`.
    pub k: u32,
    pub m: u64,
    pub n_min: i32,
    pub n_max: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothConfig {
    #[serde(rename = "M")]
    pub m: u32,
    pub samples: usize,
    pub tolerance: f64,
    pub cases: Vec<SmoothCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VelocityCase {
    pub q: u64,
    pub s: f64,
    pub n_min: i32,
    pub n_max: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VelocityConfig {
    #[serde(rename = "M")]
    pub m: u32,
    pub samples: usize,
    pub tolerance: f64,
    /// Bound on `max |v|` for odd `q`.
    pub zero_tolerance: f64,
    pub cases: Vec<VelocityCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceConfig {
    pub q: u64,
    pub s: f64,
    #[serde(rename = "M")]
    pub m: u32,
    pub space_samples: usize,
    pub time_samples: usize,
    pub space_n_min: i32,
    pub space_n_max: i32,
    pub time_n_min: i32,
    pub time_n_max: i32,
    /// Times of the sections along `x`.
    pub x_sections_at: Vec<PointSpec>,
    /// Positions of the sections along `t`.
    pub t_sections_at: Vec<PointSpec>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantCase {
    /// `phi0+`, `phi0-`, `phi0:<seed>`, `phi0:seed` (suite seed), `phi1`, `phi2`, `phi3`.
    pub variant: String,
    pub q: u64,
    pub s: f64,
    #[serde(rename = "M")]
    pub m: u32,
    pub n_min: i32,
    pub n_max: i32,
    #[serde(default = "yes")]
    pub gated: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariantConfig {
    pub samples: usize,
    pub smooth_tolerance: f64,
    pub fractal_tolerance: f64,
    pub cases: Vec<VariantCase>,
}

fn pts(v: &[&str]) -> Vec<PointSpec> {
    v.iter().map(|s| s.parse().expect("valid default point")).collect()
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            samples: 1 << 20,
            base: 2.0,
            n_min: 4,
            n_max: 12,
            tolerance: 0.05,
            cases: default_corpus(),
        }
    }
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            q: 2,
            s: vec![0.5, 1.0, 1.5, 1.8],
            m: 19,
            samples: 1 << 20,
            n_min: 4,
            n_max: 12,
            tolerance: 0.1,
            invariance_s: 1.5,
            times: pts(&["0", "2/21pi", "1.0"]),
        }
    }
}

impl Default for TimeConfig {
    fn default() -> Self {
        let case = |q, s, x: &str, n_min, n_max| TimeCase {
            q,
            s,
            x: x.parse().expect("valid"),
            n_min,
            n_max,
        };
        TimeConfig {
            m: 24,
            samples: 1 << 22,
            tolerance: 0.1,
            cases: vec![
                case(2, 1.0, "1/3pi", 2, 6),
                case(2, 1.5, "1/3pi", 2, 6),
                case(3, 1.2, "1/2pi", 1, 5),
                // generic point, informational
                case(2, 1.5, "1.0", 2, 6),
            ],
        }
    }
}

impl Default for SmoothConfig {
    fn default() -> Self {
        SmoothConfig {
            m: 24,
            samples: 1 << 20,
            tolerance: 0.05,
            cases: vec![
                SmoothCase {
                    q: 2,
                    s: 1.5,
                    k: 1,
                    m: 1,
                    n_min: 2,
                    n_max: 6,
                },
                SmoothCase {
                    q: 3,
                    s: 1.5,
                    k: 2,
                    m: 4,
                    n_min: 1,
                    n_max: 5,
                },
            ],
        }
    }
}

impl Default for VelocityConfig {
    fn default() -> Self {
        let case = |q, s, n_min, n_max| VelocityCase { q, s, n_min, n_max };
        VelocityConfig {
            m: 30,
            samples: 1 << 22,
            tolerance: 0.1,
            zero_tolerance: 1e-12,
            cases: vec![case(2, 1.5, 2, 6), case(2, 0.5, 2, 6), case(3, 1.5, 1, 5)],
        }
    }
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        SurfaceConfig {
            q: 2,
            s: 1.5,
            m: 24,
            space_samples: 1 << 20,
            time_samples: 1 << 21,
            space_n_min: 4,
            space_n_max: 12,
            time_n_min: 2,
            time_n_max: 6,
            x_sections_at: pts(&["0", "2/21pi", "1/9pi", "1/5pi", "1/4pi", "1.0", "2/7pi", "1/2pi"]),
            t_sections_at: pts(&["1/3pi", "1/5pi", "2/5pi", "1/7pi", "3/7pi", "2/3pi", "4/5pi", "5/7pi"]),
            tolerance: 0.12,
        }
    }
}

impl Default for VariantConfig {
    fn default() -> Self {
        let case = |v: &str, q, m, n_min, n_max, gated| VariantCase {
            variant: v.into(),
            q,
            s: 1.5,
            m,
            n_min,
            n_max,
            gated,
        };
        VariantConfig {
            samples: 1 << 22,
            smooth_tolerance: 0.05,
            fractal_tolerance: 0.12,
            cases: vec![
                case("phi3", 2, 10, 2, 6, true),
                // energy gcd 72, so the period is 2π/72
                case("phi3", 3, 10, 2, 6, true),
                case("phi2", 2, 10, 2, 6, true),
                case("phi2", 3, 9, 1, 5, true),
                case("phi1", 2, 10, 2, 6, true),
                case("phi1", 3, 9, 1, 5, true),
                case("phi0+", 2, 10, 2, 6, false),
                case("phi0:seed", 3, 9, 1, 5, false),
            ],
        }
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 20240601,
            output_dir: None,
            record_runtime: false,
            calibration: CalibrationConfig::default(),
            space: SpaceConfig::default(),
            time: TimeConfig::default(),
            smooth: SmoothConfig::default(),
            velocity: VelocityConfig::default(),
            surface: SurfaceConfig::default(),
            variants: VariantConfig::default(),
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} must be positive")))
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SuiteConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        SuiteConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn variant(&self, name: &str) -> Result<Variant> {
        if name.eq_ignore_ascii_case("phi0:seed") {
            return Ok(Variant::Phi0(SignPattern::Seeded(self.seed)));
        }
        name.parse()
    }

    /// Checks every parameter, ladder and truncation before any computation.
    pub fn validate(&self) -> Result<()> {
        let c = &self.calibration;
        positive("calibration.tolerance", c.tolerance)?;
        DeltaLadder::new(c.base, c.n_min, c.n_max)?.validate_span(1.0, c.samples)?;
        if c.cases.is_empty() {
            return Err(Error::Config("calibration needs at least one case".into()));
        }

        let sp = &self.space;
        positive("space.tolerance", sp.tolerance)?;
        for &s in sp.s.iter().chain([sp.invariance_s].iter()) {
            let p = StateParams::new(sp.q, s, sp.m)?;
            let ladder = DeltaLadder::new(sp.q as f64, sp.n_min, sp.n_max)?;
            check_coupling(&p, &ladder, Axis::Space)?;
            ladder.validate_span(PI, sp.samples)?;
        }
        if sp.times.len() < 2 {
            return Err(Error::Config("space.times needs at least two times".into()));
        }
        for t in &sp.times {
            t.angle()?;
        }

        positive("time.tolerance", self.time.tolerance)?;
        for case in &self.time.cases {
            let p = StateParams::new(case.q, case.s, self.time.m)?;
            let ladder = time_ladder(case.q, case.n_min, case.n_max)?;
            check_coupling(&p, &ladder, Axis::Time)?;
            ladder.validate_span(fundamental_period(case.q), self.time.samples)?;
            case.x.angle()?;
        }

        positive("smooth.tolerance", self.smooth.tolerance)?;
        for case in &self.smooth.cases {
            let p = StateParams::new(case.q, case.s, self.smooth.m)?;
            let ladder = time_ladder(case.q, case.n_min, case.n_max)?;
            check_coupling(&p, &ladder, Axis::Time)?;
            ladder.validate_span(fundamental_period(case.q), self.smooth.samples)?;
            super::smooth_point(&p, case.k, case.m)?;
        }

        positive("velocity.tolerance", self.velocity.tolerance)?;
        positive("velocity.zero_tolerance", self.velocity.zero_tolerance)?;
        for case in &self.velocity.cases {
            let p = StateParams::new(case.q, case.s, self.velocity.m)?;
            let ladder = time_ladder(case.q, case.n_min, case.n_max)?;
            check_coupling(&p, &ladder, Axis::Time)?;
            ladder.validate_span(fundamental_period(case.q), self.velocity.samples)?;
        }

        let sf = &self.surface;
        positive("surface.tolerance", sf.tolerance)?;
        let p = StateParams::new(sf.q, sf.s, sf.m)?;
        let ladder = DeltaLadder::new(sf.q as f64, sf.space_n_min, sf.space_n_max)?;
        check_coupling(&p, &ladder, Axis::Space)?;
        ladder.validate_span(PI, sf.space_samples)?;
        let ladder = time_ladder(sf.q, sf.time_n_min, sf.time_n_max)?;
        check_coupling(&p, &ladder, Axis::Time)?;
        ladder.validate_span(fundamental_period(sf.q), sf.time_samples)?;
        if sf.x_sections_at.len() < 8 || sf.t_sections_at.len() < 8 {
            return Err(Error::Config("surface needs at least 8 sections per axis".into()));
        }
        for x in &sf.t_sections_at {
            if super::points::classify_point(x.over_pi(), sf.q)?.kind == super::points::PointKind::FiniteExpansion {
                return Err(Error::Config(format!("t-section at x = {x} is a smooth point")));
            }
        }

        let v = &self.variants;
        positive("variants.smooth_tolerance", v.smooth_tolerance)?;
        positive("variants.fractal_tolerance", v.fractal_tolerance)?;
        for case in &v.cases {
            let p = StateParams::new(case.q, case.s, case.m)?;
            let ladder = time_ladder(case.q, case.n_min, case.n_max)?;
            check_coupling(&p, &ladder, Axis::Time)?;
            let state = self.variant(&case.variant)?.state(&p)?;
            let g = state.energy_gcd();
            if g == 0 || g > 1 << 53 {
                return Err(Error::Config(format!("variant {} has no usable period", case.variant)));
            }
            ladder.validate_span(2.0 * PI / g as f64, v.samples)?;
        }
        Ok(())
    }
}

/// `δ = q^{-2N}`, `N = n_min..=n_max`.
pub fn time_ladder(q: u64, n_min: i32, n_max: i32) -> Result<DeltaLadder> {
    DeltaLadder::new((q * q) as f64, n_min, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = SuiteConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml().unwrap();
        assert_eq!(SuiteConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_document_uses_defaults() {
        let cfg = SuiteConfig::from_toml("seed = 3\n[space]\ns = [1.5]\n").unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.space.s, vec![1.5]);
        assert_eq!(cfg.space.m, 19);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            SuiteConfig::from_toml("[space]\ns = [2.1]\n"),
            Err(Error::InvalidParameter { name: "s", .. })
        ));
        assert!(matches!(
            SuiteConfig::from_toml("[space]\nM = 10\n"),
            Err(Error::TruncationCoupling { .. })
        ));
        assert!(matches!(SuiteConfig::from_toml("bogus = 1\n"), Err(Error::Config(_))));
        assert!(SuiteConfig::from_toml("[surface]\nt_sections_at = [\"1/2pi\"]\n").is_err());
    }
}
