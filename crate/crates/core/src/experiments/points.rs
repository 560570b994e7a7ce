//! Base-`q` classification of test points `x/π`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::{Angle, DoubleDouble};

/// A point given either as an exact multiple `(a/b)π` or in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PointSpec {
    PiRational(i64, u64),
    Radians(f64),
}

impl PointSpec {
    pub fn angle(&self) -> Result<Angle> {
        match *self {
            PointSpec::PiRational(a, b) => Angle::pi_ratio(a, b),
            PointSpec::Radians(x) => Angle::radians(x),
        }
    }

    pub fn radians(&self) -> f64 {
        match *self {
            PointSpec::PiRational(a, b) => std::f64::consts::PI * a as f64 / b as f64,
            PointSpec::Radians(x) => x,
        }
    }

    pub fn over_pi(&self) -> XOverPi {
        match *self {
            PointSpec::PiRational(a, b) => XOverPi::Rational(Rational64::new(a, b as i64)),
            PointSpec::Radians(x) => XOverPi::Real(x / std::f64::consts::PI),
        }
    }
}

impl FromStr for PointSpec {
    type Err = Error;

    /// `"1/3"`, `"1/3pi"`, `"1/3 pi"`, `"2pi/3"`, `"pi/3"`, `"pi"` and `"0"` are
    /// exact multiples of π; other decimals such as `"1.0"` are radians.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("point", format!("cannot parse `{s}` as a/b pi or a decimal"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = compact.to_ascii_lowercase();
        let (body, has_pi) = if let Some(i) = lower.find("pi") {
            (format!("{}{}", &lower[..i], &lower[i + 2..]), true)
        } else {
            (lower.clone(), false)
        };
        let body = body.trim_start_matches('*').trim_end_matches('*').replace("*/", "/");
        let int = |t: &str| -> Result<i64> {
            if t.is_empty() || t == "+" {
                Ok(1)
            } else if t == "-" {
                Ok(-1)
            } else {
                t.parse::<i64>().map_err(|_| bad())
            }
        };
        if let Some((n, d)) = body.split_once('/') {
            let d: u64 = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Ok(PointSpec::PiRational(int(n)?, d));
        }
        if has_pi {
            return Ok(PointSpec::PiRational(int(&body)?, 1));
        }
        if let Ok(n) = body.parse::<i64>() {
            if n == 0 {
                return Ok(PointSpec::PiRational(0, 1));
            }
        }
        let x: f64 = body.parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(Error::NonFinite("point"));
        }
        Ok(PointSpec::Radians(x))
    }
}

impl TryFrom<String> for PointSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PointSpec> for String {
    fn from(p: PointSpec) -> String {
        p.to_string()
    }
}

impl fmt::Display for PointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PointSpec::PiRational(0, _) => write!(f, "0"),
            PointSpec::PiRational(a, 1) => write!(f, "{a}pi"),
            PointSpec::PiRational(a, b) => write!(f, "{a}/{b}pi"),
            PointSpec::Radians(x) => {
                // keep a decimal point so the value parses back as radians
                if x.fract() == 0.0 {
                    write!(f, "{x:.1}")
                } else {
                    write!(f, "{x}")
                }
            }
        }
    }
}

/// `x/π` as an exact rational or a real number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XOverPi {
    Rational(Rational64),
    Real(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    /// `x/π = m/q^k`: the state is a finite sum there.
    FiniteExpansion,
    /// Rational with an eventually periodic, non-terminating expansion.
    PeriodicExpansion,
    Generic,
}

/// Base-`q` expansion type of `x/π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClass {
    pub kind: PointKind,
    /// Number of digits for a finite expansion, preperiod length for a periodic one.
    pub k: Option<u32>,
    /// Period length of a periodic expansion.
    pub period: Option<u64>,
}

/// Classifies `x/π` by its base-`q` expansion.
///
/// For a reduced fraction `a/d`, write `d = d₁d₂` with every prime of `d₁`
/// dividing `q` and `gcd(d₂, q) = 1`. The preperiod is the least `K` with
/// `d₁ | q^K` and the period is the multiplicative order of `q` mod `d₂`.
pub fn classify_point(x_over_pi: XOverPi, q: u64) -> Result<PointClass> {
    if q < 2 {
        return Err(Error::param("q", "base must be at least 2"));
    }
    let r = match x_over_pi {
        XOverPi::Rational(r) => r,
        XOverPi::Real(v) => {
            if !v.is_finite() {
                return Err(Error::NonFinite("x/π"));
            }
            return Ok(PointClass {
                kind: PointKind::Generic,
                k: None,
                period: None,
            });
        }
    };
    let den = r.denom().unsigned_abs();
    let mut rest = den;
    loop {
        let g = rest.gcd(&q);
        if g == 1 {
            break;
        }
        rest /= g;
    }
    let k = least_power_dividing(den / rest, q);
    if rest == 1 {
        return Ok(PointClass {
            kind: PointKind::FiniteExpansion,
            k: Some(k),
            period: None,
        });
    }
    Ok(PointClass {
        kind: PointKind::PeriodicExpansion,
        k: Some(k),
        period: Some(multiplicative_order(q, rest)),
    })
}

/// Least `k` with `d | q^k`, for `d` whose primes all divide `q`.
fn least_power_dividing(d: u64, q: u64) -> u32 {
    let d = d as u128;
    let mut power = 1 % d;
    let mut k = 0;
    while power != 0 {
        power = power * q as u128 % d;
        k += 1;
    }
    k
}

fn multiplicative_order(q: u64, m: u64) -> u64 {
    let m = m as u128;
    let q = q as u128 % m;
    let mut v = q;
    let mut order = 1;
    while v != 1 {
        v = v * q % m;
        order += 1;
    }
    order
}

/// Rényi orbit `x_n = qⁿ(x/π) mod 1`, `n = 1..=n`, exactly for rationals.
pub fn renyi_orbit_exact(x_over_pi: Rational64, q: u64, n: usize) -> Vec<Rational64> {
    let den = *x_over_pi.denom() as i128;
    let mut num = (*x_over_pi.numer() as i128).rem_euclid(den);
    (0..n)
        .map(|_| {
            num = (num * q as i128) % den;
            Rational64::new(num as i64, den as i64)
        })
        .collect()
}

/// [`renyi_orbit_exact`] as floats, or the double-double orbit for real input.
pub fn renyi_orbit(x_over_pi: XOverPi, q: u64, n: usize) -> Vec<f64> {
    match x_over_pi {
        XOverPi::Rational(r) => renyi_orbit_exact(r, q, n)
            .into_iter()
            .map(|v| *v.numer() as f64 / *v.denom() as f64)
            .collect(),
        XOverPi::Real(v) => {
            let mut u = DoubleDouble::from_f64(v).fract();
            (0..n)
                .map(|_| {
                    u = u.mul_f64(q as f64).fract();
                    u.to_f64()
                })
                .collect()
        }
    }
}
