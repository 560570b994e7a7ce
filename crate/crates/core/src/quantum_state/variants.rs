use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SineState, StateParams};
use crate::error::{Error, Result};

/// Per-term mode shifts of `Φ₀`, which replaces `qⁿ` by `qⁿ ± 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    /// Every term shifted by `+1`.
    Plus,
    /// Every term shifted by `-1`.
    Minus,
    /// Independent fair signs drawn from a ChaCha stream with this seed.
    Seeded(u64),
}

impl SignPattern {
    /// Signs for terms `n = 1..=m`.
    pub fn signs(&self, m: u32) -> Vec<i8> {
        match *self {
            SignPattern::Plus => vec![1; m as usize],
            SignPattern::Minus => vec![-1; m as usize],
            SignPattern::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..m).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
            }
        }
    }
}

/// Perturbed relatives of the Weierstrass state that differ in their low modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `Σ_{n≥1} q^{n(s-2)} sin((qⁿ ± 1)x)`.
    Phi0(SignPattern),
    /// `2^{s-2} sin 2x + Σ_{n≥1} q^{n(s-2)} sin(qⁿx)`.
    Phi1,
    /// `2^{s-2} sin 2x + Σ_{n≥0} q^{n(s-2)} sin(qⁿx)`.
    Phi2,
    /// `Σ_{n≥1} q^{n(s-2)} sin(qⁿx)`.
    Phi3,
}

impl Variant {
    pub fn label(&self) -> String {
        match self {
            Variant::Phi0(SignPattern::Plus) => "phi0+".into(),
            Variant::Phi0(SignPattern::Minus) => "phi0-".into(),
            Variant::Phi0(SignPattern::Seeded(seed)) => format!("phi0(seed={seed})"),
            Variant::Phi1 => "phi1".into(),
            Variant::Phi2 => "phi2".into(),
            Variant::Phi3 => "phi3".into(),
        }
    }

    /// The normalized truncated state, all sums running to `n = M`.
    pub fn state(&self, p: &StateParams) -> Result<SineState> {
        if p.m() < 1 {
            return Err(Error::param("M", "variant states need M >= 1"));
        }
        let tail = (1..=p.m()).map(|n| (p.mode(n), p.coefficient(n)));
        let low = (2u128, 2f64.powf(p.s() - 2.0));
        match self {
            Variant::Phi0(pattern) => {
                let signs = pattern.signs(p.m());
                let terms = (1..=p.m()).zip(signs).map(|(n, sg)| {
                    let k = if sg > 0 { p.mode(n) + 1 } else { p.mode(n) - 1 };
                    (k, p.coefficient(n))
                });
                SineState::new(terms)
            }
            Variant::Phi1 => SineState::new(std::iter::once(low).chain(tail)),
            Variant::Phi2 => SineState::new([low, (1, 1.0)].into_iter().chain(tail)),
            Variant::Phi3 => SineState::new(tail),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi0+" | "phi0" => Ok(Variant::Phi0(SignPattern::Plus)),
            "phi0-" => Ok(Variant::Phi0(SignPattern::Minus)),
            "phi1" => Ok(Variant::Phi1),
            "phi2" => Ok(Variant::Phi2),
            "phi3" => Ok(Variant::Phi3),
            other => {
                if let Some(seed) = other.strip_prefix("phi0:").and_then(|v| v.parse::<u64>().ok()) {
                    Ok(Variant::Phi0(SignPattern::Seeded(seed)))
                } else {
                    Err(Error::param("variant", format!("unknown variant `{s}`")))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::Angle;
    use crate::quantum_state::psi_series;

    fn params(q: u64, s: f64, m: u32) -> StateParams {
        StateParams::new(q, s, m).unwrap()
    }

    #[test]
    fn phi3_is_psi_without_first_term() {
        let p = params(2, 1.5, 8);
        let st = Variant::Phi3.state(&p).unwrap();
        let x = Angle::pi_ratio(1, 3).unwrap();
        let t = Angle::radians(0.3).unwrap();
        let full = psi_series(&p, &x, &t).unwrap();
        let first = psi_series(&p.with_truncation(0).unwrap(), &x, &t).unwrap();
        let tail = full - first;
        let scale = st.coefficients()[0] / p.coefficient(1);
        let v = st.eval(&x, &t);
        assert!((v - tail * scale).norm() < 1e-14);
    }

    #[test]
    fn phi1_merges_mode_two_for_q2() {
        let p = params(2, 1.5, 5);
        let st = Variant::Phi1.state(&p).unwrap();
        assert_eq!(st.modes(), &[2, 4, 8, 16, 32]);
        let st3 = Variant::Phi1.state(&params(3, 1.5, 5)).unwrap();
        assert_eq!(st3.modes(), &[2, 3, 9, 27, 81, 243]);
    }

    #[test]
    fn phi0_signs() {
        let p = params(2, 1.5, 4);
        assert_eq!(
            Variant::Phi0(SignPattern::Plus).state(&p).unwrap().modes(),
            &[3, 5, 9, 17]
        );
        assert_eq!(
            Variant::Phi0(SignPattern::Minus).state(&p).unwrap().modes(),
            &[1, 3, 7, 15]
        );
        let a = SignPattern::Seeded(7).signs(32);
        assert_eq!(a, SignPattern::Seeded(7).signs(32));
        assert!(a.iter().any(|&v| v > 0) && a.iter().any(|&v| v < 0));
    }

    #[test]
    fn parse_labels() {
        for v in [
            Variant::Phi0(SignPattern::Plus),
            Variant::Phi0(SignPattern::Minus),
            Variant::Phi1,
            Variant::Phi2,
            Variant::Phi3,
        ] {
            assert_eq!(v.label().parse::<Variant>().unwrap(), v);
        }
        assert_eq!(
            "phi0:9".parse::<Variant>().unwrap(),
            Variant::Phi0(SignPattern::Seeded(9))
        );
        assert!("phi7".parse::<Variant>().is_err());
    }
}
