//! Exact-grid sampling of densities and observables.
//!
//! Space grids are `x_j = πj/K` and time grids `t_j = (2π/g)·j/K`, so every
//! phase is an exact rational multiple of `π`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fractal_dim::SampledGraph;
use crate::phase::Angle;
use crate::quantum_state::StateParams;

/// `πj/K`.
pub fn space_node(j: usize, intervals: usize) -> Angle {
    Angle::pi_ratio(j as i64, intervals as u64).expect("grid sizes are bounded")
}

/// `2πj/(gK)`, the `j`-th node of `K` intervals over the period `2π/g`.
pub fn time_node(j: usize, g: u64, intervals: usize) -> Result<Angle> {
    let den = g
        .checked_mul(intervals as u64)
        .filter(|d| *d < 1 << 61)
        .ok_or(Error::Overflow("time grid denominator"))?;
    Angle::pi_ratio(2 * j as i64, den)
}

fn check_intervals(intervals: usize) -> Result<()> {
    if intervals < 2 || intervals as u64 >= 1 << 40 {
        return Err(Error::param("samples", format!("{intervals} intervals out of range")));
    }
    Ok(())
}

/// `P_t(x) = |Ψ_M(x, t)|²` on `[0, π]`.
pub fn space_profile(p: &StateParams, t: &Angle, intervals: usize) -> Result<SampledGraph> {
    check_intervals(intervals)?;
    let n = p.normalization().value();
    let amps: Vec<Complex64> = t
        .geometric(p.q() * p.q())
        .take(p.m() as usize + 1)
        .enumerate()
        .map(|(k, (s, c))| Complex64::new(c, -s) * (n * p.coefficient(k as u32)))
        .collect();
    let ys = (0..=intervals)
        .into_par_iter()
        .map(|j| {
            let x = space_node(j, intervals);
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, (s, _)) in amps.iter().zip(x.geometric(p.q())) {
                acc += a * s;
            }
            acc.norm_sqr()
        })
        .collect();
    SampledGraph::from_uniform(0.0, std::f64::consts::PI, ys)
}

/// `P_x(t)` over one fundamental period `2π/(q² - 1)`.
pub fn time_profile(p: &StateParams, x: &Angle, intervals: usize) -> Result<SampledGraph> {
    check_intervals(intervals)?;
    let n = p.normalization().value();
    let amps: Vec<f64> = x
        .geometric(p.q())
        .take(p.m() as usize + 1)
        .enumerate()
        .map(|(k, (s, _))| n * p.coefficient(k as u32) * s)
        .collect();
    let g = p.q() * p.q() - 1;
    sample_period(g, intervals, |t| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, (s, c)) in amps.iter().zip(t.geometric(p.q() * p.q())) {
            acc += Complex64::new(a * c, -a * s);
        }
        acc.norm_sqr()
    })
}

/// `f(t_j)` over the period `2π/g`.
pub fn sample_period(g: u64, intervals: usize, f: impl Fn(&Angle) -> f64 + Sync) -> Result<SampledGraph> {
    check_intervals(intervals)?;
    if g == 0 {
        return Err(Error::param("period", "stationary state has no period"));
    }
    time_node(intervals, g, intervals)?;
    let ys = (0..=intervals)
        .into_par_iter()
        .map(|j| f(&time_node(j, g, intervals).expect("checked above")))
        .collect();
    SampledGraph::from_uniform(0.0, 2.0 * std::f64::consts::PI / g as f64, ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_state::prob_density;

    #[test]
    fn profiles_match_pointwise_density() {
        let p = StateParams::new(3, 1.3, 6).unwrap();
        let t = Angle::radians(0.21).unwrap();
        let g = space_profile(&p, &t, 729).unwrap();
        for j in [0, 1, 100, 243, 500, 729] {
            let want = prob_density(&p, &space_node(j, 729), &t).unwrap();
            assert!((g.ys()[j] - want).abs() < 1e-13);
        }
        let x = Angle::pi_ratio(2, 5).unwrap();
        let g = time_profile(&p, &x, 1000).unwrap();
        for j in [0, 7, 999] {
            let want = prob_density(&p, &x, &time_node(j, 8, 1000).unwrap()).unwrap();
            assert!((g.ys()[j] - want).abs() < 1e-13);
        }
        assert!((g.b() - std::f64::consts::PI / 4.0).abs() < 1e-15);
    }
}
