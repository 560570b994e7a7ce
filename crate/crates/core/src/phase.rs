//! Argument reduction for `sin(k·θ)` and `cos(k·θ)` with integer `k` far beyond
//! the range where `k as f64 * θ` keeps any fractional information.
//!
//! Two representations are supported:
//!
//! * [`Angle::PiRational`]: `θ = π·num/den` exactly. The reduced phase of `k·θ`
//!   is `(k·num mod 2·den) / den` half-turns, obtained by integer modular
//!   arithmetic, so `sin(q^n θ)` is exact in the argument for every `n`.
//! * [`Angle::Turns`]: `θ = 2π·u` where `u` is carried as a double-double
//!   (about 106 significant bits). Multiplication by an integer is performed in
//!   double-double and reduced modulo one turn after every step.

use std::f64::consts::{PI, TAU};

use num_integer::Integer;

use crate::error::{Error, Result};

/// `1/(2π)` split as an unevaluated double-double sum.
const INV_TAU_HI: f64 = 0.159_154_943_091_895_35;
const INV_TAU_LO: f64 = -9.839_338_337_591_243e-18;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[allow(clippy::should_implement_trait)]
impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// `num/den` correctly to about 2^-104 relative, for `|num|, den < 2^53`.
    pub fn from_ratio(num: i64, den: u64) -> Self {
        let n = num as f64;
        let d = den as f64;
        let hi = n / d;
        let rem = (-hi).mul_add(d, n);
        let (hi, lo) = quick_two_sum(hi, rem / d);
        DoubleDouble { hi, lo }
    }

    pub fn add(self, other: DoubleDouble) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, self.lo.mul_add(b, e));
        DoubleDouble { hi, lo }
    }

    pub fn mul(self, other: DoubleDouble) -> Self {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(self) -> Self {
        let (s, e) = two_sum(self.hi, -self.hi.floor());
        let (mut hi, mut lo) = quick_two_sum(s, e + self.lo);
        // `lo` may carry the value just across 0 or 1
        if hi < 0.0 || (hi == 0.0 && lo < 0.0) {
            let r = two_sum(hi, 1.0);
            let r = quick_two_sum(r.0, r.1 + lo);
            hi = r.0;
            lo = r.1;
        }
        if hi > 1.0 || (hi == 1.0 && lo >= 0.0) {
            let r = two_sum(hi, -1.0);
            let r = quick_two_sum(r.0, r.1 + lo);
            hi = r.0;
            lo = r.1;
        }
        DoubleDouble { hi, lo }
    }

    /// `frac(k · self)` for an arbitrary `u128` multiplier.
    ///
    /// `k` is split into 40-bit limbs `k_i`; each limb multiplies the reduced
    /// value of `2^(40 i) · self`, so no intermediate product exceeds 2^40.
    pub fn mul_u128_fract(self, k: u128) -> Self {
        const LIMB_BITS: u32 = 40;
        let mask: u128 = (1u128 << LIMB_BITS) - 1;
        let mut acc = DoubleDouble::ZERO;
        let mut base = self.fract();
        let mut rest = k;
        while rest != 0 {
            let limb = (rest & mask) as f64;
            if limb != 0.0 {
                acc = acc.add(base.mul_f64(limb).fract()).fract();
            }
            rest >>= LIMB_BITS;
            if rest != 0 {
                let scale = (1u64 << LIMB_BITS) as f64;
                base = DoubleDouble {
                    hi: base.hi * scale,
                    lo: base.lo * scale,
                }
                .fract();
            }
        }
        acc
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// An angle whose integer multiples can be reduced modulo `2π` without loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// `π · num / den`, with `den > 0` and `gcd(num, den) = 1`.
    PiRational { num: i64, den: u64 },
    /// `2π · turns`.
    Turns(DoubleDouble),
}

impl Angle {
    pub const ZERO: Angle = Angle::PiRational { num: 0, den: 1 };

    /// Exact angle `π · num / den`.
    pub fn pi_ratio(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::param("den", "denominator must be positive"));
        }
        if den >= 1 << 62 || num.unsigned_abs() >= 1 << 62 {
            return Err(Error::param("num/den", "magnitude must stay below 2^62"));
        }
        let g = (num.unsigned_abs()).gcd(&den).max(1);
        Ok(Angle::PiRational {
            num: num / g as i64,
            den: den / g,
        })
    }

    /// Angle given in radians; carried in extended precision.
    pub fn radians(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite("angle"));
        }
        let inv = DoubleDouble {
            hi: INV_TAU_HI,
            lo: INV_TAU_LO,
        };
        Ok(Angle::Turns(DoubleDouble::from_f64(x).mul(inv)))
    }

    /// The rational `π·num/den` carried on the extended-precision path instead of
    /// the exact one.
    pub fn pi_ratio_extended(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::param("den", "denominator must be positive"));
        }
        // num/den half-turns = num/(2 den) turns
        let den2 = den.checked_mul(2).ok_or(Error::Overflow("extended ratio"))?;
        Ok(Angle::Turns(DoubleDouble::from_ratio(num, den2)))
    }

    pub fn to_extended(self) -> Angle {
        match self {
            Angle::PiRational { num, den } => Angle::pi_ratio_extended(num, den).expect("validated on construction"),
            a @ Angle::Turns(_) => a,
        }
    }

    pub fn as_pi_ratio(&self) -> Option<(i64, u64)> {
        match *self {
            Angle::PiRational { num, den } => Some((num, den)),
            Angle::Turns(_) => None,
        }
    }

    /// Approximate value in radians.
    pub fn to_radians(&self) -> f64 {
        match *self {
            Angle::PiRational { num, den } => PI * (num as f64 / den as f64),
            Angle::Turns(u) => TAU * u.hi + TAU * u.lo,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Angle::PiRational { .. } => true,
            Angle::Turns(u) => u.hi.is_finite() && u.lo.is_finite(),
        }
    }

    /// Sum of two angles. Exact when both are rational and the result fits.
    pub fn add(&self, other: &Angle) -> Angle {
        if let (Angle::PiRational { num: a, den: b }, Angle::PiRational { num: c, den: d }) = (*self, *other) {
            let l = b.lcm(&d);
            let num = (a as i128) * (l / b) as i128 + (c as i128) * (l / d) as i128;
            if let Ok(num) = i64::try_from(num) {
                if let Ok(angle) = Angle::pi_ratio(num, l) {
                    return angle;
                }
            }
        }
        Angle::Turns(self.turns_dd().add(other.turns_dd()))
    }

    fn turns_dd(&self) -> DoubleDouble {
        match *self {
            Angle::PiRational { num, den } => DoubleDouble::from_ratio(num, den.saturating_mul(2)),
            Angle::Turns(u) => u,
        }
    }

    /// `k·θ mod 2π`, expressed in turns in `[0, 1)`.
    pub fn reduced_turns(&self, k: u128) -> f64 {
        match *self {
            Angle::PiRational { num, den } => {
                let r = exact_residue(num, den, k);
                r as f64 / (2 * den as u128) as f64
            }
            Angle::Turns(u) => u.mul_u128_fract(k).to_f64(),
        }
    }

    /// `(sin kθ, cos kθ)`.
    pub fn sin_cos_multiple(&self, k: u128) -> (f64, f64) {
        match *self {
            Angle::PiRational { num, den } => sin_cos_half_turns(exact_residue(num, den, k), den),
            Angle::Turns(u) => sin_cos_turns(u.mul_u128_fract(k)),
        }
    }

    /// `(sin k²θ, cos k²θ)` without forming `k²`, which may exceed `u128`.
    pub fn sin_cos_multiple_squared(&self, k: u128) -> (f64, f64) {
        match *self {
            Angle::PiRational { num, den } => {
                let m = 2 * den as u128;
                let kk = ((k % m) * (k % m)) % m;
                sin_cos_half_turns(exact_residue(num, den, kk), den)
            }
            Angle::Turns(u) => sin_cos_turns(u.mul_u128_fract(k).mul_u128_fract(k)),
        }
    }

    /// Iterator over `(sin, cos)` of `θ, qθ, q²θ, …` with reduction after every
    /// multiplication by `q`.
    pub fn geometric(&self, q: u64) -> GeometricPhases {
        let state = match *self {
            Angle::PiRational { num, den } => PhaseState::Exact {
                residue: exact_residue(num, den, 1),
                modulus: 2 * den as u128,
                den,
            },
            Angle::Turns(u) => PhaseState::Extended(u.fract()),
        };
        GeometricPhases { q, state }
    }
}

/// `k·num mod 2·den`.
fn exact_residue(num: i64, den: u64, k: u128) -> u128 {
    let m = 2 * den as u128;
    let a = (num as i128).rem_euclid(m as i128) as u128;
    ((k % m) * a) % m
}

/// `sin`/`cos` of `π·r/den` for an integer residue `r ∈ [0, 2 den)`, exact at
/// the quarter-turn points.
pub(crate) fn sin_cos_half_turns(r: u128, den: u64) -> (f64, f64) {
    let d = den as u128;
    if r == 0 {
        return (0.0, 1.0);
    }
    if r == d {
        return (0.0, -1.0);
    }
    if 2 * r == d {
        return (1.0, 0.0);
    }
    if 2 * r == 3 * d {
        return (-1.0, 0.0);
    }
    let centered = if r > d { -((2 * d - r) as f64) } else { r as f64 };
    (PI * (centered / den as f64)).sin_cos()
}

fn sin_cos_turns(u: DoubleDouble) -> (f64, f64) {
    if u.hi == 0.0 && u.lo == 0.0 {
        return (0.0, 1.0);
    }
    let mut f = u.to_f64();
    if f >= 0.5 {
        f -= 1.0;
    }
    match f {
        0.25 => (1.0, 0.0),
        -0.25 => (-1.0, 0.0),
        -0.5 => (0.0, -1.0),
        _ => (TAU * f).sin_cos(),
    }
}

#[derive(Debug, Clone)]
enum PhaseState {
    Exact { residue: u128, modulus: u128, den: u64 },
    Extended(DoubleDouble),
}

/// See [`Angle::geometric`].
#[derive(Debug, Clone)]
pub struct GeometricPhases {
    q: u64,
    state: PhaseState,
}

impl GeometricPhases {
    /// Reduced phase of the current term, in turns.
    pub fn turns(&self) -> f64 {
        match &self.state {
            PhaseState::Exact { residue, modulus, .. } => *residue as f64 / *modulus as f64,
            PhaseState::Extended(u) => u.to_f64(),
        }
    }
}

impl Iterator for GeometricPhases {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        let q = self.q;
        let out = match &mut self.state {
            PhaseState::Exact { residue, modulus, den } => {
                let out = sin_cos_half_turns(*residue, *den);
                *residue = (*residue * q as u128) % *modulus;
                out
            }
            PhaseState::Extended(u) => {
                let out = sin_cos_turns(*u);
                *u = u.mul_f64(q as f64).fract();
                out
            }
        };
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_points_are_exact() {
        let a = Angle::pi_ratio(1, 2).unwrap();
        assert_eq!(a.sin_cos_multiple(1), (1.0, 0.0));
        assert_eq!(a.sin_cos_multiple(2), (0.0, -1.0));
        assert_eq!(a.sin_cos_multiple(4), (0.0, 1.0));
        assert_eq!(a.sin_cos_multiple(3), (-1.0, 0.0));
    }

    #[test]
    fn huge_multiples_of_dyadic_angles_vanish() {
        let a = Angle::pi_ratio(3, 8).unwrap();
        let k = 1u128 << 100;
        assert_eq!(a.sin_cos_multiple(k).0, 0.0);
    }

    #[test]
    fn radians_round_trip() {
        let a = Angle::radians(1.25).unwrap();
        assert!((a.to_radians() - 1.25).abs() < 1e-15);
        let (s, c) = a.sin_cos_multiple(1);
        assert!((s - 1.25f64.sin()).abs() < 1e-15);
        assert!((c - 1.25f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn extended_matches_exact_for_large_powers() {
        for &(num, den) in &[(1i64, 3u64), (2, 7), (5, 11), (-4, 9), (13, 17)] {
            let exact = Angle::pi_ratio(num, den).unwrap();
            let ext = exact.to_extended();
            for q in [2u128, 3, 5] {
                // 106 bits of turns leave 1e-12 accuracy while k < 2^64
                let mut k = 1u128;
                while k < 1 << 64 {
                    let a = exact.reduced_turns(k);
                    let b = ext.reduced_turns(k);
                    let d = (a - b).abs();
                    assert!(d.min(1.0 - d) < 1e-12, "q={q} k={k} {a} {b}");
                    k *= q;
                }
            }
        }
    }

    #[test]
    fn geometric_matches_direct() {
        for angle in [Angle::pi_ratio(2, 7).unwrap(), Angle::radians(0.731).unwrap()] {
            let mut k = 1u128;
            for (sc, n) in angle.geometric(3).zip(0..30) {
                let direct = angle.sin_cos_multiple(k);
                assert!((sc.0 - direct.0).abs() < 1e-12, "n={n}");
                assert!((sc.1 - direct.1).abs() < 1e-12, "n={n}");
                k *= 3;
            }
        }
    }

    #[test]
    fn add_stays_exact_for_rationals() {
        let a = Angle::pi_ratio(1, 3).unwrap();
        let b = Angle::pi_ratio(1, 6).unwrap();
        assert_eq!(a.add(&b), Angle::pi_ratio(1, 2).unwrap());
    }

    #[test]
    fn fract_handles_negative_values() {
        let x = DoubleDouble::from_f64(-0.25).fract();
        assert_eq!(x.to_f64(), 0.75);
        // 3 - 1e-20 reduces to 1 - 1e-20, stored as (1, -1e-20)
        let y = DoubleDouble { hi: 3.0, lo: -1e-20 }.fract();
        assert_eq!((y.hi, y.lo), (1.0, -1e-20));
        let z = DoubleDouble { hi: 1.0, lo: 1e-20 }.fract();
        assert_eq!((z.hi, z.lo), (1e-20, 0.0));
    }
}
