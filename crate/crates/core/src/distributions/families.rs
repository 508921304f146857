//! Closed-form moments of the base (unstandardized) family variables.

use alloc::format;

use crate::special::ln_gamma;
use crate::{Error, Result};

/// Mean, variance and standardized third/fourth moments of a base variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseMoments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl BaseMoments {
    pub(crate) fn from_raw(m1: f64, m2: f64, m3: f64, m4: f64) -> Self {
        let variance = m2 - m1 * m1;
        let c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
        let c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
        Self {
            mean: m1,
            variance,
            skewness: c3 / libm::pow(variance, 1.5),
            excess_kurtosis: c4 / (variance * variance) - 3.0,
        }
    }

    pub fn sd(&self) -> f64 {
        libm::sqrt(self.variance)
    }
}

pub(crate) const STANDARD_NORMAL: BaseMoments = BaseMoments {
    mean: 0.0,
    variance: 1.0,
    skewness: 0.0,
    excess_kurtosis: 0.0,
};

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!(
            "{name} must be > 0, got {value}"
        )))
    }
}

/// Excess kurtosis of the symmetric generalized normal with shape `beta`:
/// `Γ(5/β)Γ(1/β)/Γ(3/β)² - 3`. `beta = +inf` is the uniform limit.
pub fn sgn_excess_kurtosis(beta: f64) -> Result<f64> {
    check_positive("beta", beta)?;
    if beta.is_infinite() {
        return Ok(-1.2);
    }
    let ln_ratio = ln_gamma(5.0 / beta) + ln_gamma(1.0 / beta) - 2.0 * ln_gamma(3.0 / beta);
    Ok(libm::exp(ln_ratio) - 3.0)
}

/// Base density proportional to `exp(-|x|^β)`; uniform on [-1, 1] for `β = inf`.
pub(crate) fn sgn_base(beta: f64) -> Result<BaseMoments> {
    check_positive("beta", beta)?;
    if beta.is_infinite() {
        return Ok(BaseMoments {
            mean: 0.0,
            variance: 1.0 / 3.0,
            skewness: 0.0,
            excess_kurtosis: -1.2,
        });
    }
    let variance = libm::exp(ln_gamma(3.0 / beta) - ln_gamma(1.0 / beta));
    let excess_kurtosis = sgn_excess_kurtosis(beta)?;
    if !variance.is_finite() || !excess_kurtosis.is_finite() {
        return Err(Error::DivergedMoment(format!(
            "generalized normal with beta = {beta}"
        )));
    }
    Ok(BaseMoments {
        mean: 0.0,
        variance,
        skewness: 0.0,
        excess_kurtosis,
    })
}

/// Two-piece (inverse scale factor) skewing of the generalized normal
/// `exp(-|x|^ν)`: positive half stretched by `ξ`, negative half by `1/ξ`.
pub(crate) fn agn_base(xi: f64, nu: f64) -> Result<BaseMoments> {
    check_positive("xi", xi)?;
    check_positive("nu", nu)?;
    if xi.is_infinite() || nu.is_infinite() {
        return Err(Error::ParameterDomain(format!(
            "xi and nu must be finite, got xi = {xi}, nu = {nu}"
        )));
    }
    let ln_norm = ln_gamma(1.0 / nu);
    let inv = 1.0 / xi;
    let mut raw = [0.0f64; 5];
    for (r, slot) in raw.iter_mut().enumerate().skip(1) {
        // Absolute moment of the symmetric base, E|Z|^r.
        let abs_moment = libm::exp(ln_gamma((r as f64 + 1.0) / nu) - ln_norm);
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let e = r as i32 + 1;
        *slot =
            abs_moment * (libm::pow(xi, e as f64) + sign * libm::pow(inv, e as f64)) / (xi + inv);
    }
    let m = BaseMoments::from_raw(raw[1], raw[2], raw[3], raw[4]);
    if !(m.variance.is_finite() && m.skewness.is_finite() && m.excess_kurtosis.is_finite()) {
        return Err(Error::DivergedMoment(format!(
            "asymmetric generalized normal with xi = {xi}, nu = {nu}"
        )));
    }
    Ok(m)
}

/// Skewness and excess kurtosis of the asymmetric generalized normal.
pub fn agn_moments(xi: f64, nu: f64) -> Result<(f64, f64)> {
    let m = agn_base(xi, nu)?;
    Ok((m.skewness, m.excess_kurtosis))
}

// k-th forward difference of j -> j^(2m) at j = 0.
fn forward_difference_even_power(k: u32, m: u32) -> f64 {
    let mut acc = 0.0;
    let mut binom = 1.0;
    for i in 0..=k {
        let base = (k - i) as f64;
        let term = binom * libm::pow(base, 2.0 * m as f64);
        acc += if i % 2 == 0 { term } else { -term };
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    acc
}

// E[T^k] for T = ((e^{gZ} - 1)/g) e^{hZ^2/2}, g != 0, k*h < 1.
fn tgh_raw_moment(g: f64, h: f64, k: u32) -> f64 {
    let q = 1.0 / (2.0 * (1.0 - k as f64 * h));
    if g * g * q > 0.5 {
        tgh_raw_direct(g, h, k)
    } else {
        tgh_raw_series(g, h, k)
    }
}

// Alternating sum of normal-exponential expectations; cancels badly for small g.
fn tgh_raw_direct(g: f64, h: f64, k: u32) -> f64 {
    let one_minus = 1.0 - k as f64 * h;
    let c = g * g / (2.0 * one_minus);
    let mut acc = 0.0;
    let mut binom = 1.0;
    for i in 0..=k {
        let j = (k - i) as f64;
        let term = binom * libm::exp(j * j * c);
        acc += if i % 2 == 0 { term } else { -term };
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    acc / (libm::sqrt(one_minus) * libm::pow(g, k as f64))
}

// Taylor expansion of the same sum in c = g^2 q: only powers m >= k/2
// survive, which cancels the 1/g^k factor analytically.
fn tgh_raw_series(g: f64, h: f64, k: u32) -> f64 {
    let one_minus = 1.0 - k as f64 * h;
    let q = 1.0 / (2.0 * one_minus);
    let first = k.div_ceil(2);
    let mut inv_factorial = 1.0;
    for m in 1..first {
        inv_factorial /= m as f64;
    }
    let mut acc = 0.0;
    for m in first..400 {
        if m > 0 {
            inv_factorial /= m as f64;
        }
        let term = libm::pow(g, (2 * m - k) as f64)
            * libm::pow(q, m as f64)
            * forward_difference_even_power(k, m)
            * inv_factorial;
        acc += term;
        if m > first + 2 && term.abs() <= 1e-18 * acc.abs() {
            break;
        }
    }
    acc / libm::sqrt(one_minus)
}

pub(crate) fn tgh_base(g: f64, h: f64) -> Result<BaseMoments> {
    if !g.is_finite() || !h.is_finite() || h < 0.0 {
        return Err(Error::ParameterDomain(format!(
            "Tukey g-and-h needs finite g and h >= 0, got g = {g}, h = {h}"
        )));
    }
    if h >= 0.25 {
        return Err(Error::DivergedMoment(format!(
            "Tukey g-and-h fourth moment is infinite for h >= 1/4 (h = {h})"
        )));
    }
    if g == 0.0 {
        let m2 = libm::pow(1.0 - 2.0 * h, -1.5);
        let m4 = 3.0 * libm::pow(1.0 - 4.0 * h, -2.5);
        return Ok(BaseMoments {
            mean: 0.0,
            variance: m2,
            skewness: 0.0,
            excess_kurtosis: m4 / (m2 * m2) - 3.0,
        });
    }
    let raw: [f64; 4] = core::array::from_fn(|i| tgh_raw_moment(g, h, i as u32 + 1));
    let m = BaseMoments::from_raw(raw[0], raw[1], raw[2], raw[3]);
    if !(m.variance.is_finite() && m.skewness.is_finite() && m.excess_kurtosis.is_finite()) {
        return Err(Error::DivergedMoment(format!(
            "Tukey g-and-h with g = {g}, h = {h}"
        )));
    }
    Ok(m)
}

/// Skewness and excess kurtosis of the Tukey g-and-h transform of a standard normal.
pub fn tgh_moments(g: f64, h: f64) -> Result<(f64, f64)> {
    let m = tgh_base(g, h)?;
    Ok((m.skewness, m.excess_kurtosis))
}

/// Equal-weight mixture of N(-δ, 1) and N(δ, 1).
pub(crate) fn bimodal_base(separation: f64) -> Result<BaseMoments> {
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "separation must be finite and >= 0, got {separation}"
        )));
    }
    let d2 = separation * separation;
    let variance = 1.0 + d2;
    Ok(BaseMoments {
        mean: 0.0,
        variance,
        skewness: 0.0,
        excess_kurtosis: -2.0 * d2 * d2 / (variance * variance),
    })
}
