//! Truncated Weierstrass states of the infinite well on `[0, π]`.
//!
//! The state with parameters `(q, s, M)` is
//!
//! ```text
//! Ψ_M(x, t) = N_M Σ_{n=0}^{M} q^{n(s-2)} sin(qⁿ x) exp(-i q^{2n} t)
//! ```
//!
//! and `N_M` makes `∫₀^π |Ψ_M|² dx = 1` exactly for every `M`.
//! Every phase `qⁿx` and `q^{2n}t` is reduced modulo `2π` before the
//! trigonometric call, see [`crate::phase`].

mod sine_state;
mod variants;

pub use sine_state::{PositionGram, SineState};
pub use variants::{SignPattern, Variant};

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::Angle;

/// Value of the wave function at one point.
pub type ComplexAmplitude = Complex64;

/// `(q, s, M)` of a truncated Weierstrass state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStateParams", into = "RawStateParams")]
pub struct StateParams {
    q: u64,
    s: f64,
    m: u32,
}

#[derive(Serialize, Deserialize)]
struct RawStateParams {
    q: u64,
    s: f64,
    #[serde(rename = "M")]
    m: u32,
}

impl TryFrom<RawStateParams> for StateParams {
    type Error = Error;
    fn try_from(r: RawStateParams) -> Result<Self> {
        StateParams::new(r.q, r.s, r.m)
    }
}

impl From<StateParams> for RawStateParams {
    fn from(p: StateParams) -> Self {
        RawStateParams { q: p.q, s: p.s, m: p.m }
    }
}

impl StateParams {
    pub fn new(q: u64, s: f64, m: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::param("q", format!("q = {q}, must be an integer >= 2")));
        }
        if !s.is_finite() {
            return Err(Error::NonFinite("s"));
        }
        if !(s > 0.0 && s < 2.0) {
            return Err(Error::param("s", format!("s = {s}, must lie in (0, 2)")));
        }
        // top mode q^M must be an exact u128
        if (q as u128).checked_pow(m).is_none() {
            return Err(Error::param(
                "M",
                format!("q^M = {q}^{m} does not fit exact mode arithmetic"),
            ));
        }
        Ok(StateParams { q, s, m })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Truncation order `M` (the state has `M + 1` terms).
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn with_truncation(&self, m: u32) -> Result<Self> {
        StateParams::new(self.q, self.s, m)
    }

    /// `q^{n(s-2)}`.
    pub fn coefficient(&self, n: u32) -> f64 {
        (self.q as f64).powf(n as f64 * (self.s - 2.0))
    }

    /// `qⁿ` as an exact integer.
    pub fn mode(&self, n: u32) -> u128 {
        (self.q as u128).pow(n)
    }

    pub fn normalization(&self) -> Normalization {
        Normalization::truncated(self)
    }
}

/// Normalization constant of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    value: f64,
}

impl Normalization {
    /// `N_M = sqrt((2/π) / Σ_{n≤M} q^{2n(s-2)})`, the unit-norm constant of the
    /// truncated state.
    pub fn truncated(p: &StateParams) -> Self {
        let sum: f64 = (0..=p.m).map(|n| p.coefficient(n).powi(2)).sum();
        Normalization {
            value: (2.0 / PI / sum).sqrt(),
        }
    }

    /// `N = sqrt((2/π)(1 - q^{2(s-2)}))` of the infinite series.
    pub fn infinite(p: &StateParams) -> Self {
        let r = (p.q as f64).powf(2.0 * (p.s - 2.0));
        Normalization {
            value: (2.0 / PI * (1.0 - r)).sqrt(),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// One frequency of the probability density,
/// `ω_{c,d} = (q²-1)(q^{2(c-1)} + … + q^{2(c-d)}) = q^{2c} - q^{2(c-d)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumLine {
    pub c: u32,
    pub d: u32,
    pub omega: u128,
}

fn check_position(x: &Angle) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFinite("x"));
    }
    let inside = match *x {
        Angle::PiRational { num, den } => num >= 0 && (num as u64) <= den,
        Angle::Turns(u) => {
            let v = u.to_f64();
            (-1e-15..=0.5 + 1e-15).contains(&v)
        }
    };
    if inside {
        Ok(())
    } else {
        Err(Error::param("x", format!("x = {} lies outside [0, π]", x.to_radians())))
    }
}

fn check_time(t: &Angle) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("t"))
    }
}

/// Unnormalized partial sum `Σ_{n≤M} q^{n(s-2)} sin(qⁿx) e^{-iq^{2n}t}`.
pub fn psi_series(p: &StateParams, x: &Angle, t: &Angle) -> Result<ComplexAmplitude> {
    check_position(x)?;
    check_time(t)?;
    let q = p.q;
    let ratio = (q as f64).powf(p.s - 2.0);
    let mut coef = 1.0;
    let mut acc = Complex64::new(0.0, 0.0);
    let space = x.geometric(q);
    let time = t.geometric(q * q);
    for (n, ((sx, _), (st, ct))) in space.zip(time).enumerate() {
        if n as u32 > p.m {
            break;
        }
        let a = coef * sx;
        acc += Complex64::new(a * ct, -a * st);
        coef *= ratio;
    }
    Ok(acc)
}

/// `Ψ_M(x, t)`.
pub fn eval_psi(p: &StateParams, x: &Angle, t: &Angle) -> Result<ComplexAmplitude> {
    Ok(psi_series(p, x, t)? * p.normalization().value())
}

/// `|Ψ_M(x, t)|²`.
pub fn prob_density(p: &StateParams, x: &Angle, t: &Angle) -> Result<f64> {
    Ok(eval_psi(p, x, t)?.norm_sqr())
}

/// Probability density from the regrouped double sum
/// `N² Σ_k q^{k(s-2)} Σ_l sin(q^l x) sin(q^{k-l} x) cos((q^{2l} - q^{2(k-l)}) t)`,
/// truncated at `k ≤ 2M` with `l ≤ M` and `k - l ≤ M`.
pub fn prob_density_grouped(p: &StateParams, x: &Angle, t: &Angle) -> Result<f64> {
    check_position(x)?;
    check_time(t)?;
    let m = p.m as usize;
    let sines: Vec<f64> = x.geometric(p.q).take(m + 1).map(|(s, _)| s).collect();
    let coefs: Vec<f64> = (0..=p.m).map(|n| p.coefficient(n)).collect();
    let mut total = 0.0;
    for k in 0..=2 * m {
        let lo = k.saturating_sub(m);
        let hi = k.min(m);
        let mut inner = 0.0;
        for l in lo..=hi {
            let j = k - l;
            if sines[l] == 0.0 || sines[j] == 0.0 {
                continue;
            }
            let c = if l == j {
                1.0
            } else {
                let (hi_n, lo_n) = if l > j { (l, j) } else { (j, l) };
                // cos is even, so the sign of the frequency does not matter
                let omega = spectrum_omega(p.q, hi_n as u32, (hi_n - lo_n) as u32)?;
                t.sin_cos_multiple(omega).1
            };
            inner += sines[l] * sines[j] * c;
        }
        // q^{k(s-2)} = coef_l · coef_{k-l}
        total += coefs[lo] * coefs[k - lo] * inner;
    }
    let n = p.normalization().value();
    Ok(n * n * total)
}

fn spectrum_omega(q: u64, c: u32, d: u32) -> Result<u128> {
    let q2 = (q as u128).checked_mul(q as u128).ok_or(Error::Overflow("q²"))?;
    let top = q2.checked_pow(c).ok_or(Error::Overflow("spectrum frequency"))?;
    let low = q2.checked_pow(c - d).ok_or(Error::Overflow("spectrum frequency"))?;
    Ok(top - low)
}

/// Time-independent part `P_x(x) = 1/π - (N_M²/2) Σ_{m≤M} q^{m(2s-4)} cos(2 q^m x)`.
pub fn time_independent_part(p: &StateParams, x: &Angle) -> Result<f64> {
    check_position(x)?;
    let n2 = p.normalization().value().powi(2);
    let two_x = x.add(x);
    let mut sum = 0.0;
    for (m, (_, c)) in two_x.geometric(p.q).take(p.m as usize + 1).enumerate() {
        sum += p.coefficient(m as u32).powi(2) * c;
    }
    Ok(1.0 / PI - 0.5 * n2 * sum)
}

/// Box dimension of the graph of the time-independent part, `max{2s - 2, 1}`.
pub fn time_independent_dimension(s: f64) -> f64 {
    (2.0 * s - 2.0).max(1.0)
}

/// All spectral lines with `1 ≤ d ≤ c ≤ M`, ascending in `ω`.
pub fn spectrum(p: &StateParams) -> Result<Vec<SpectrumLine>> {
    let mut lines = Vec::new();
    for c in 1..=p.m {
        for d in 1..=c {
            lines.push(SpectrumLine {
                c,
                d,
                omega: spectrum_omega(p.q, c, d)?,
            });
        }
    }
    lines.sort_by_key(|l| l.omega);
    Ok(lines)
}

/// `2π/(q² - 1)`.
pub fn fundamental_period(q: u64) -> f64 {
    2.0 * PI / (q * q - 1) as f64
}

/// [`fundamental_period`] as an exact angle.
pub fn fundamental_period_angle(q: u64) -> Angle {
    Angle::pi_ratio(2, q * q - 1).expect("q >= 2")
}

fn even_q_prefactor(p: &StateParams) -> f64 {
    // 8 N_M², which is (16/π)(1 - q^{2(s-2)}) for the infinite series
    8.0 * p.normalization().value().powi(2)
}

/// `⟨x⟩(t) = π/2 - 8N_M² Σ_{k=1}^{M} q^{k(s-1)}/(q^{2k}-1)² cos((q^{2k}-1)t)` for
/// even `q`, exactly `π/2` for odd `q`.
pub fn mean_position(p: &StateParams, t: &Angle) -> Result<f64> {
    check_time(t)?;
    if p.q % 2 == 1 {
        return Ok(FRAC_PI_2);
    }
    let mut sum = 0.0;
    for k in 1..=p.m {
        let e = energy_gap(p, k)?;
        let ef = e as f64;
        let w = (p.q as f64).powf(k as f64 * (p.s - 1.0)) / (ef * ef);
        sum += w * t.sin_cos_multiple(e).1;
    }
    Ok(FRAC_PI_2 - even_q_prefactor(p) * sum)
}

/// `d⟨x⟩/dt = 8N_M² Σ_{k=1}^{M} q^{k(s-1)}/(q^{2k}-1) sin((q^{2k}-1)t)`; zero for odd `q`.
pub fn mean_velocity(p: &StateParams, t: &Angle) -> Result<f64> {
    check_time(t)?;
    if p.q % 2 == 1 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for k in 1..=p.m {
        let e = energy_gap(p, k)?;
        let w = (p.q as f64).powf(k as f64 * (p.s - 1.0)) / e as f64;
        sum += w * t.sin_cos_multiple(e).0;
    }
    Ok(even_q_prefactor(p) * sum)
}

/// Absolute-convergence bound `8N_M² Σ q^{k(s-1)}/(q^{2k}-1)` on `|d⟨x⟩/dt|`.
pub fn mean_velocity_bound(p: &StateParams) -> Result<f64> {
    if p.q % 2 == 1 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for k in 1..=p.m {
        let e = energy_gap(p, k)?;
        sum += (p.q as f64).powf(k as f64 * (p.s - 1.0)) / e as f64;
    }
    Ok(even_q_prefactor(p) * sum)
}

/// `q^{2k} - 1`.
fn energy_gap(p: &StateParams, k: u32) -> Result<u128> {
    let q2 = (p.q as u128) * (p.q as u128);
    q2.checked_pow(k).map(|v| v - 1).ok_or(Error::Overflow("q^{2k} - 1"))
}

/// Variant state `Φ_i(x, t)`, unit L² norm over the truncated coefficient list.
pub fn eval_variant(which: &Variant, p: &StateParams, x: &Angle, t: &Angle) -> Result<ComplexAmplitude> {
    check_position(x)?;
    check_time(t)?;
    Ok(which.state(p)?.eval(x, t))
}

/// Sine coefficients `a_n = (2/π) ∫₀^π sin(nx) Ψ(x,0) dx` for `n = 1..=n_max`,
/// on the default grid of `2(n_max + q^M)` trapezoid intervals.
pub fn sine_coefficients(p: &StateParams, n_max: u64) -> Result<Vec<f64>> {
    let needed = n_max as u128 + p.mode(p.m);
    let intervals = usize::try_from(2 * needed).map_err(|_| Error::Overflow("quadrature grid"))?;
    sine_coefficients_on_grid(p, n_max, intervals)
}

/// [`sine_coefficients`] with an explicit number of trapezoid intervals.
///
/// The rule on `x_i = iπ/K` integrates `sin(nx) sin(kx)` exactly while
/// `n + k < 2K`; coarser grids alias and are rejected.
pub fn sine_coefficients_on_grid(p: &StateParams, n_max: u64, intervals: usize) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::param("n_max", "must be at least 1"));
    }
    let needed = n_max as u128 + p.mode(p.m);
    if intervals < 2 || (intervals as u128) <= needed {
        return Err(Error::GridTooCoarse {
            nodes: intervals + 1,
            needed,
        });
    }
    let k = intervals as u64;
    let zero = Angle::ZERO;
    let psi: Vec<f64> = (0..=k)
        .map(|i| {
            let x = Angle::pi_ratio(i as i64, k)?;
            Ok(eval_psi(p, &x, &zero)?.re)
        })
        .collect::<Result<_>>()?;
    let h = PI / k as f64;
    let coefs = (1..=n_max)
        .map(|n| {
            // endpoints vanish, interior weight h
            let sum: f64 = (1..k)
                .map(|i| {
                    let r = (n as u128 * i as u128) % (2 * k as u128);
                    crate::phase::sin_cos_half_turns(r, k).0 * psi[i as usize]
                })
                .sum();
            2.0 / PI * h * sum
        })
        .collect();
    Ok(coefs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: u64, s: f64, m: u32) -> StateParams {
        StateParams::new(q, s, m).unwrap()
    }

    fn pi(num: i64, den: u64) -> Angle {
        Angle::pi_ratio(num, den).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(StateParams::new(1, 1.5, 3).is_err());
        assert!(StateParams::new(2, 2.0, 3).is_err());
        assert!(StateParams::new(2, 0.0, 3).is_err());
        assert!(StateParams::new(2, f64::NAN, 3).is_err());
        assert!(StateParams::new(2, 1.5, 200).is_err());
    }

    #[test]
    fn boundary_values_vanish() {
        let p = params(2, 1.5, 10);
        for t in [Angle::ZERO, Angle::radians(0.37).unwrap()] {
            assert_eq!(eval_psi(&p, &Angle::ZERO, &t).unwrap().norm(), 0.0);
            assert_eq!(eval_psi(&p, &pi(1, 1), &t).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn midpoint_keeps_only_first_term() {
        let p = params(2, 1.5, 10);
        let v = eval_psi(&p, &pi(1, 2), &Angle::ZERO).unwrap();
        assert_eq!(v.im, 0.0);
        assert!((v.re - p.normalization().value()).abs() < 1e-15);
        let t = Angle::radians(2.3).unwrap();
        let d = prob_density(&p, &pi(1, 2), &t).unwrap();
        assert!((d - p.normalization().value().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn rejects_points_outside_well_and_non_finite_time() {
        let p = params(2, 1.5, 4);
        assert!(eval_psi(&p, &pi(5, 4), &Angle::ZERO).is_err());
        assert!(eval_psi(&p, &pi(-1, 4), &Angle::ZERO).is_err());
        assert!(Angle::radians(f64::INFINITY).is_err());
    }

    #[test]
    fn grouped_at_zero_time_is_square_of_real_sum() {
        let p = params(3, 1.3, 7);
        let x = Angle::radians(0.9).unwrap();
        let s = psi_series(&p, &x, &Angle::ZERO).unwrap().re;
        let n = p.normalization().value();
        let g = prob_density_grouped(&p, &x, &Angle::ZERO).unwrap();
        assert!((g - n * n * s * s).abs() < 1e-13);
    }

    #[test]
    fn spectrum_first_lines_for_q2() {
        let p = params(2, 1.5, 3);
        let omegas: Vec<u128> = spectrum(&p).unwrap().iter().map(|l| l.omega).collect();
        assert_eq!(omegas, vec![3, 12, 15, 48, 60, 63]);
    }

    #[test]
    fn spectrum_overflow_is_reported() {
        let p = params(2, 1.5, 70);
        assert_eq!(spectrum(&p).unwrap_err(), Error::Overflow("spectrum frequency"));
    }

    #[test]
    fn periods() {
        assert!((fundamental_period(2) - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((fundamental_period(3) - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn odd_q_observables() {
        let p = params(3, 1.5, 8);
        let t = Angle::radians(0.77).unwrap();
        assert_eq!(mean_position(&p, &t).unwrap(), FRAC_PI_2);
        assert_eq!(mean_velocity(&p, &t).unwrap(), 0.0);
    }

    #[test]
    fn velocity_vanishes_at_zero_time() {
        for q in [2, 4] {
            let p = params(q, 1.2, 6);
            assert_eq!(mean_velocity(&p, &Angle::ZERO).unwrap(), 0.0);
        }
    }

    #[test]
    fn time_independent_dimension_values() {
        assert_eq!(time_independent_dimension(1.0), 1.0);
        assert!((time_independent_dimension(1.8) - 1.6).abs() < 1e-15);
    }

    #[test]
    fn coarse_coefficient_grid_is_rejected() {
        let p = params(2, 1.5, 6);
        assert!(matches!(
            sine_coefficients_on_grid(&p, 10, 50),
            Err(Error::GridTooCoarse { .. })
        ));
        assert!(sine_coefficients(&p, 0).is_err());
    }
}
