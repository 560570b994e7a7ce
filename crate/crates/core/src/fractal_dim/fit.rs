use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{box_count, max_oscillation, shift_lower_functional, variation, DeltaLadder, SampledGraph};
use crate::error::{Error, Result};

/// Fits never use fewer ladder points than this.
pub const FIT_MIN_POINTS: usize = 4;

/// Endpoint residuals above this multiple of the interior RMS are trimmed.
const TRIM_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    /// `ln Var_δ` against `ln δ`, dimension `2 - slope`.
    Variation,
    /// `ln N(δ)` against `ln(1/δ)`, dimension `slope`.
    BoxCount,
    /// `ln ∫|f(x+δ) - f(x-δ)|` against `ln δ`, dimension `2 - slope`.
    Shift,
    /// `ln sup osc` against `ln δ`; the slope is the Hölder exponent, dimension `2 - slope`.
    Hardy,
}

/// Result of a log-log regression over a ladder of scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub kind: FitKind,
    pub slope: f64,
    pub intercept: f64,
    pub dimension: f64,
    pub r_squared: f64,
    /// Ladder exponents `(n_lo, n_hi)` of the points kept after trimming.
    pub window: (i32, i32),
    /// Residuals of the kept points, in ladder order.
    pub residuals: Vec<f64>,
    /// Dimension outside `[1, 2]`; reported as is, never clamped.
    pub out_of_range: bool,
    pub deltas: Vec<f64>,
    /// Raw functional value at each ladder scale.
    pub values: Vec<f64>,
}

/// One row of a persisted ladder table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub delta: f64,
    pub variation: Option<f64>,
    pub box_count: Option<u64>,
}

/// `(slope, intercept, r², kept index range, residuals)`.
pub type LogLogFit = (f64, f64, f64, (usize, usize), Vec<f64>);

/// Least-squares line through `(xs, ys)` with endpoint trimming.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::param("fit", "coordinate lengths differ"));
    }
    if xs.len() < FIT_MIN_POINTS {
        return Err(Error::TooFewPoints {
            usable: xs.len(),
            required: FIT_MIN_POINTS,
        });
    }
    let (mut lo, mut hi) = (0, xs.len() - 1);
    loop {
        let (slope, intercept, r2, res) = least_squares(&xs[lo..=hi], &ys[lo..=hi]);
        let len = hi - lo + 1;
        if len > FIT_MIN_POINTS {
            let inner = &res[1..len - 1];
            let rms = (inner.iter().map(|r| r * r).sum::<f64>() / inner.len() as f64).sqrt();
            let threshold = (TRIM_FACTOR * rms).max(1e-12);
            let (first, last) = (res[0].abs(), res[len - 1].abs());
            if first.max(last) > threshold {
                if first >= last {
                    lo += 1;
                } else {
                    hi -= 1;
                }
                continue;
            }
        }
        return Ok((slope, intercept, r2, (lo, hi), res));
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, Vec<f64>) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    let ss_res: f64 = res.iter().map(|r| r * r).sum();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    (slope, intercept, r2, res)
}

fn fit_ladder(kind: FitKind, ladder: &DeltaLadder, values: Vec<f64>) -> Result<ScalingFit> {
    let deltas = ladder.deltas();
    let ns: Vec<i32> = (ladder.n_min..=ladder.n_max).collect();
    let usable: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] > 0.0 && values[i].is_finite())
        .collect();
    if usable.is_empty() && kind != FitKind::BoxCount {
        return Err(Error::Degenerate(
            "functional vanishes at every scale (constant graph)".into(),
        ));
    }
    if usable.len() < FIT_MIN_POINTS {
        return Err(Error::TooFewPoints {
            usable: usable.len(),
            required: FIT_MIN_POINTS,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = usable
        .iter()
        .map(|&i| match kind {
            FitKind::BoxCount => (-deltas[i].ln(), values[i].ln()),
            _ => (deltas[i].ln(), values[i].ln()),
        })
        .unzip();
    let (slope, intercept, r_squared, (lo, hi), residuals) = fit_loglog(&xs, &ys)?;
    let dimension = match kind {
        FitKind::BoxCount => slope,
        _ => 2.0 - slope,
    };
    let out_of_range = !(1.0..=2.0).contains(&dimension);
    if out_of_range {
        log::warn!("{kind:?} fit gives dimension {dimension:.4} outside [1, 2]");
    }
    Ok(ScalingFit {
        kind,
        slope,
        intercept,
        dimension,
        r_squared,
        window: (ns[usable[lo]], ns[usable[hi]]),
        residuals,
        out_of_range,
        deltas,
        values,
    })
}

fn ladder_values(
    g: &SampledGraph,
    ladder: &DeltaLadder,
    f: impl Fn(&SampledGraph, f64) -> Result<f64> + Sync,
) -> Result<Vec<f64>> {
    ladder.validate_for(g)?;
    ladder.deltas().par_iter().map(|&d| f(g, d)).collect()
}

/// Dimension `2 - slope` from `ln Var_δ` against `ln δ`.
pub fn fit_dimension_variation(g: &SampledGraph, ladder: &DeltaLadder) -> Result<ScalingFit> {
    let values = ladder_values(g, ladder, variation)?;
    fit_ladder(FitKind::Variation, ladder, values)
}

/// Dimension from `ln N(δ)` against `ln(1/δ)`. A constant graph gives about 1.
pub fn fit_dimension_boxcount(g: &SampledGraph, ladder: &DeltaLadder) -> Result<ScalingFit> {
    let values = ladder_values(g, ladder, |g, d| box_count(g, d).map(|n| n as f64))?;
    fit_ladder(FitKind::BoxCount, ladder, values)
}

/// Lower-bound dimension from the shift functional `∫|f(x+δ) - f(x-δ)| dx`.
pub fn fit_dimension_shift(g: &SampledGraph, ladder: &DeltaLadder) -> Result<ScalingFit> {
    let values = ladder_values(g, ladder, shift_lower_functional)?;
    fit_ladder(FitKind::Shift, ladder, values)
}

/// Hölder exponent of `sup{|f(x) - f(y)| : |x - y| ≤ δ} ~ δ^H`, as the slope.
pub fn hardy_exponent(g: &SampledGraph, ladder: &DeltaLadder) -> Result<ScalingFit> {
    let values = ladder_values(g, ladder, max_oscillation)?;
    fit_ladder(FitKind::Hardy, ladder, values)
}

/// Per-axis suprema of section dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionDims {
    pub sups: Vec<f64>,
    pub n: usize,
    /// Sups over finitely many sections underestimate the true supremum.
    pub lower_estimate: bool,
}

impl SectionDims {
    /// `n - 1 + max_i s_i`.
    pub fn combined(&self) -> f64 {
        let top = self.sups.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (self.n - 1) as f64 + top
    }
}

pub fn section_dims(axes: &[&[ScalingFit]]) -> Result<SectionDims> {
    if axes.is_empty() {
        return Err(Error::param("sections", "need at least one axis"));
    }
    let sups = axes
        .iter()
        .map(|fits| {
            if fits.is_empty() {
                return Err(Error::param("sections", "every axis needs at least one section"));
            }
            Ok(fits.iter().map(|f| f.dimension).fold(f64::NEG_INFINITY, f64::max))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SectionDims {
        n: sups.len(),
        sups,
        lower_estimate: true,
    })
}

/// Dimension of a surface `P(x, t)` from its sections: `1 + max(sup_x, sup_t)`.
pub fn surface_dimension(sections_x: &[ScalingFit], sections_t: &[ScalingFit]) -> Result<f64> {
    Ok(section_dims(&[sections_x, sections_t])?.combined())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(dimension: f64) -> ScalingFit {
        ScalingFit {
            kind: FitKind::Variation,
            slope: 2.0 - dimension,
            intercept: 0.0,
            dimension,
            r_squared: 1.0,
            window: (0, 0),
            residuals: vec![],
            out_of_range: false,
            deltas: vec![],
            values: vec![],
        }
    }

    #[test]
    fn exact_line_is_recovered() {
        let xs: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x - 2.0).collect();
        let (slope, intercept, r2, window, _) = fit_loglog(&xs, &ys).unwrap();
        assert!((slope - 0.5).abs() < 1e-14 && (intercept + 2.0).abs() < 1e-13);
        assert_eq!(r2, 1.0);
        assert_eq!(window, (0, 7));
    }

    #[test]
    fn outlying_endpoint_is_trimmed() {
        let xs: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let mut ys: Vec<f64> = xs.iter().map(|x| 0.5 * x + 0.001 * (x * 1.7).sin()).collect();
        ys[7] += 1.0;
        let (slope, _, _, window, _) = fit_loglog(&xs, &ys).unwrap();
        assert_eq!(window.1, 6);
        assert!((slope - 0.5).abs() < 0.01);
    }

    #[test]
    fn never_trims_below_minimum() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.0, 5.0, -3.0, 10.0];
        let (_, _, _, window, _) = fit_loglog(&xs, &ys).unwrap();
        assert_eq!(window, (0, 3));
        assert!(matches!(
            fit_loglog(&xs[..3], &ys[..3]),
            Err(Error::TooFewPoints { usable: 3, required: 4 })
        ));
    }

    #[test]
    fn surface_combination() {
        let flat = vec![synthetic(1.0), synthetic(1.0)];
        assert_eq!(surface_dimension(&flat, &flat).unwrap(), 2.0);
        let xs = vec![synthetic(1.5), synthetic(1.45)];
        let ts = vec![synthetic(1.75), synthetic(1.7)];
        assert!((surface_dimension(&xs, &ts).unwrap() - 2.75).abs() < 1e-15);
        assert_eq!(
            surface_dimension(&xs, &ts).unwrap(),
            surface_dimension(&ts, &xs).unwrap()
        );
        assert!(surface_dimension(&[], &ts).is_err());
        assert!(section_dims(&[&xs, &ts]).unwrap().lower_estimate);
    }
}
