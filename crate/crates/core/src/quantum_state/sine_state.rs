//! Finite superpositions `Σ c_k sin(kx) e^{-ik²t}` of well eigenstates.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::phase::Angle;
use crate::quadrature::composite_gauss_legendre;

/// A normalized finite sine superposition with exact integer modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SineState {
    modes: Vec<u128>,
    coefficients: Vec<f64>,
}

impl SineState {
    /// Builds a state from `(mode, coefficient)` terms. Repeated modes are
    /// merged, zero coefficients dropped, and the result scaled to unit L² norm
    /// on `[0, π]`.
    pub fn new(terms: impl IntoIterator<Item = (u128, f64)>) -> Result<Self> {
        let mut merged: BTreeMap<u128, f64> = BTreeMap::new();
        for (k, c) in terms {
            if k == 0 {
                return Err(Error::param("mode", "sine modes start at 1"));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite("coefficient"));
            }
            // energies k² must stay exact
            if k.checked_mul(k).is_none() {
                return Err(Error::Overflow("mode energy"));
            }
            *merged.entry(k).or_insert(0.0) += c;
        }
        merged.retain(|_, c| *c != 0.0);
        if merged.is_empty() {
            return Err(Error::Degenerate("state has no nonzero terms".into()));
        }
        let norm2: f64 = merged.values().map(|c| c * c).sum::<f64>() * FRAC_PI_2;
        let scale = norm2.sqrt().recip();
        let (modes, coefficients) = merged.into_iter().map(|(k, c)| (k, c * scale)).unzip();
        Ok(SineState { modes, coefficients })
    }

    pub fn modes(&self) -> &[u128] {
        &self.modes
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn energies(&self) -> impl Iterator<Item = u128> + '_ {
        self.modes.iter().map(|k| k * k)
    }

    /// `Σ c_k sin(kx) e^{-ik²t}`.
    pub fn eval(&self, x: &Angle, t: &Angle) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&k, &c) in self.modes.iter().zip(&self.coefficients) {
            let (sx, _) = x.sin_cos_multiple(k);
            if sx == 0.0 {
                continue;
            }
            let (st, ct) = t.sin_cos_multiple_squared(k);
            acc += Complex64::new(c * sx * ct, -c * sx * st);
        }
        acc
    }

    pub fn density(&self, x: &Angle, t: &Angle) -> f64 {
        self.eval(x, t).norm_sqr()
    }

    /// Greatest common divisor of all energy differences; zero for a single mode.
    pub fn energy_gcd(&self) -> u128 {
        let mut e = self.energies();
        let first = match e.next() {
            Some(v) => v,
            None => return 0,
        };
        e.fold(0u128, |g, v| g.gcd(&(v - first)))
    }

    /// Smallest common period `2π/g` of the density; `None` for a stationary state.
    pub fn period(&self) -> Option<f64> {
        match self.energy_gcd() {
            0 => None,
            g => Some(2.0 * PI / g as f64),
        }
    }

    pub fn position_gram(&self) -> PositionGram {
        PositionGram::new(&self.modes)
    }

    /// Expectation of position as a cosine series in time, from the quadrature
    /// Gram matrix.
    pub fn position_series(&self) -> PositionSeries {
        PositionSeries::new(self, &self.position_gram())
    }
}

/// `G_mn = ∫₀^π x sin(k_m x) sin(k_n x) dx`, by composite Gauss–Legendre
/// quadrature.
///
/// The rule is folded about `π/2`: with `y = x - π/2`,
/// `sin(k(π/2 - y)) = (-1)^{k+1} sin(k(π/2 + y))`, so the integral over
/// `[0, π]` reduces to half sums `P = Σ w s_m s_n` and `R = Σ w y s_m s_n` on
/// `y ∈ [0, π/2]` and `G = (π/2)(1 + σ)P + (1 - σ)R` with `σ = (-1)^{m+n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionGram {
    modes: Vec<u128>,
    values: Vec<f64>,
}

const GL_ORDER: usize = 16;

impl PositionGram {
    pub fn new(modes: &[u128]) -> Self {
        let n = modes.len();
        let k_max = modes.iter().copied().max().unwrap_or(1) as f64;
        // panel width w with k_max · w ≤ 2
        let panels = ((k_max * FRAC_PI_2 / 2.0).ceil() as usize).max(4);
        let (ys, ws) = composite_gauss_legendre(0.0, FRAC_PI_2, panels, GL_ORDER);
        let centre = Angle::pi_ratio(1, 2).expect("valid");
        let mut p = vec![Neumaier::default(); n * n];
        let mut r = vec![Neumaier::default(); n * n];
        let mut s = vec![0.0; n];
        for (&y, &w) in ys.iter().zip(&ws) {
            let x = centre.add(&Angle::radians(y).expect("finite node"));
            for (sk, &k) in s.iter_mut().zip(modes) {
                *sk = x.sin_cos_multiple(k).0;
            }
            for i in 0..n {
                let wi = w * s[i];
                for j in i..n {
                    let v = wi * s[j];
                    p[i * n + j].add(v);
                    r[i * n + j].add(v * y);
                }
            }
        }
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let same_parity = (modes[i] + modes[j]).is_multiple_of(2);
                let g = if same_parity {
                    PI * p[i * n + j].sum()
                } else {
                    2.0 * r[i * n + j].sum()
                };
                values[i * n + j] = g;
                values[j * n + i] = g;
            }
        }
        PositionGram {
            modes: modes.to_vec(),
            values,
        }
    }

    pub fn modes(&self) -> &[u128] {
        &self.modes
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.modes.len() + j]
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `⟨x⟩(t) = mean + Σ_Ω w_Ω cos(Ω t)`, with the pair terms of `Re(z^H G z)`
/// collected by frequency `Ω = E_m - E_n > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionSeries {
    pub mean: f64,
    pub lines: Vec<(u128, f64)>,
    /// Velocity amplitude that rounding in the Gram matrix alone could produce.
    pub noise_floor: f64,
}

impl PositionSeries {
    fn new(state: &SineState, gram: &PositionGram) -> Self {
        let c = state.coefficients();
        let e: Vec<u128> = state.energies().collect();
        let n = c.len();
        let mut mean = 0.0;
        let mut lines: BTreeMap<u128, f64> = BTreeMap::new();
        let mut floor = 0.0;
        for i in 0..n {
            mean += c[i] * c[i] * gram.get(i, i);
            for j in (i + 1)..n {
                let omega = e[j] - e[i];
                *lines.entry(omega).or_insert(0.0) += 2.0 * c[i] * c[j] * gram.get(i, j);
                floor += 2.0 * (c[i] * c[j]).abs() * omega as f64;
            }
        }
        PositionSeries {
            mean,
            lines: lines.into_iter().collect(),
            noise_floor: 1024.0 * f64::EPSILON * PI * PI / 4.0 * floor,
        }
    }

    pub fn position(&self, t: &Angle) -> f64 {
        self.mean
            + self
                .lines
                .iter()
                .map(|&(om, w)| w * t.sin_cos_multiple(om).1)
                .sum::<f64>()
    }

    /// Five-point central difference `(8[f(t+h) - f(t-h)] - [f(t+2h) - f(t-2h)]) / 12h`
    /// of [`Self::position`], applied line by line so no cancellation occurs
    /// between large nearly equal values.
    pub fn velocity_fd(&self, step: f64) -> FdVelocity {
        let lines = self
            .lines
            .iter()
            .map(|&(om, w)| {
                let a = om as f64 * step;
                // cos(Ω(t±h)) differences give -2 sin(Ωt) sin(Ωh)
                let factor = (8.0 * a.sin() - (2.0 * a).sin()) / (6.0 * step);
                (om, -w * factor)
            })
            .collect();
        FdVelocity { lines }
    }

    /// Upper bound on the amplitude of [`Self::velocity_fd`] at the given step.
    pub fn velocity_bound(&self, step: f64) -> f64 {
        self.velocity_fd(step).lines.iter().map(|(_, a)| a.abs()).sum()
    }
}

/// Sine series `Σ a_Ω sin(Ω t)` produced by differencing a [`PositionSeries`].
#[derive(Debug, Clone, PartialEq)]
pub struct FdVelocity {
    pub lines: Vec<(u128, f64)>,
}

impl FdVelocity {
    pub fn eval(&self, t: &Angle) -> f64 {
        self.lines.iter().map(|&(om, a)| a * t.sin_cos_multiple(om).0).sum()
    }
}
