//! Parameterized sampling mechanisms for the paired difference `D`.
//!
//! Every continuous family is sampled in standardized form (zero mean, unit
//! variance) and then mapped through `loc + scale * x`, so the mean and
//! standard deviation of a spec are exactly `loc` and `scale`. The irregular
//! beta-binomial is the exception: its support is fixed by the metric, so its
//! draws are `loc + scale * Ω[J]` with the pmf's own standard deviation.

mod families;
mod sampler;
mod support;

use alloc::format;
use alloc::vec::Vec;

pub use families::{agn_moments, sgn_excess_kurtosis, tgh_moments, BaseMoments};
pub use sampler::Sampler;
pub use support::{ibb_sd, ibb_support, symmetric_beta_binomial_pmf, Metric, MetricSupport};

use crate::rng::RandomStream;
use crate::{Error, Result};

/// Family tag of a [`DistributionSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Family {
    Normal,
    Sgn,
    Agn,
    Tgh,
    Ibb,
    BimodalMixture,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::Sgn => "sgn",
            Family::Agn => "agn",
            Family::Tgh => "tgh",
            Family::Ibb => "ibb",
            Family::BimodalMixture => "bimodal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "normal" => Family::Normal,
            "sgn" => Family::Sgn,
            "agn" => Family::Agn,
            "tgh" => Family::Tgh,
            "ibb" => Family::Ibb,
            "bimodal" | "bimodal_mixture" => Family::BimodalMixture,
            _ => return None,
        })
    }
}

impl core::fmt::Display for Family {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Family-specific shape parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum Shape {
    Normal,
    /// Symmetric generalized normal, density ∝ exp(-|x|^β). `β = inf` is uniform.
    Sgn {
        beta: f64,
    },
    /// Two-piece skewed generalized normal with asymmetry `xi` and tail shape `nu`.
    Agn {
        xi: f64,
        nu: f64,
    },
    /// Tukey g-and-h transform of a standard normal.
    Tgh {
        g: f64,
        h: f64,
    },
    /// `Ω[J]` with `J ~ BetaBin(|Ω| - 1, p, p)`.
    Ibb {
        support: MetricSupport,
        p: f64,
    },
    /// Equal-weight mixture of unit-variance normals at `±separation`.
    BimodalMixture {
        separation: f64,
    },
}

/// Population mean, standard deviation, skewness and excess kurtosis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistributionSpec {
    pub shape: Shape,
    pub loc: f64,
    pub scale: f64,
}

impl DistributionSpec {
    pub fn new(shape: Shape, loc: f64, scale: f64) -> Result<Self> {
        let spec = Self { shape, loc, scale };
        spec.validate()?;
        Ok(spec)
    }

    pub fn standard_normal() -> Self {
        Self {
            shape: Shape::Normal,
            loc: 0.0,
            scale: 1.0,
        }
    }

    /// Unit-scale, zero-location spec of the given shape.
    pub fn unit(shape: Shape) -> Result<Self> {
        Self::new(shape, 0.0, 1.0)
    }

    pub fn family(&self) -> Family {
        match self.shape {
            Shape::Normal => Family::Normal,
            Shape::Sgn { .. } => Family::Sgn,
            Shape::Agn { .. } => Family::Agn,
            Shape::Tgh { .. } => Family::Tgh,
            Shape::Ibb { .. } => Family::Ibb,
            Shape::BimodalMixture { .. } => Family::BimodalMixture,
        }
    }

    /// Checks the parameter domain of the shape and the affine map.
    pub fn validate(&self) -> Result<()> {
        if !self.loc.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "loc must be finite, got {}",
                self.loc
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "scale must be finite and > 0, got {}",
                self.scale
            )));
        }
        match &self.shape {
            Shape::Normal => Ok(()),
            Shape::Sgn { beta } => {
                if *beta > 0.0 {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!(
                        "beta must be > 0, got {beta}"
                    )))
                }
            }
            Shape::Agn { xi, nu } => {
                if *xi > 0.0 && *nu > 0.0 && xi.is_finite() && nu.is_finite() {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!(
                        "xi and nu must be finite and > 0, got xi = {xi}, nu = {nu}"
                    )))
                }
            }
            Shape::Tgh { g, h } => {
                if g.is_finite() && *h >= 0.0 && h.is_finite() {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!(
                        "g must be finite and h >= 0, got g = {g}, h = {h}"
                    )))
                }
            }
            Shape::Ibb { support, p } => {
                support.validate()?;
                if *p > 0.0 && p.is_finite() {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!(
                        "p must be finite and > 0, got {p}"
                    )))
                }
            }
            Shape::BimodalMixture { separation } => {
                if *separation >= 0.0 && separation.is_finite() {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!(
                        "separation must be finite and >= 0, got {separation}"
                    )))
                }
            }
        }
    }

    /// Moments of the unstandardized base variable of the family.
    pub fn base_moments(&self) -> Result<BaseMoments> {
        self.validate()?;
        match &self.shape {
            Shape::Normal => Ok(families::STANDARD_NORMAL),
            Shape::Sgn { beta } => families::sgn_base(*beta),
            Shape::Agn { xi, nu } => families::agn_base(*xi, *nu),
            Shape::Tgh { g, h } => families::tgh_base(*g, *h),
            Shape::Ibb { support, p } => {
                let (_, variance, excess_kurtosis) = support::ibb_pmf_moments(support, *p)?;
                Ok(BaseMoments {
                    mean: 0.0,
                    variance,
                    skewness: 0.0,
                    excess_kurtosis,
                })
            }
            Shape::BimodalMixture { separation } => families::bimodal_base(*separation),
        }
    }

    /// Mean, sd, skewness and excess kurtosis of draws from this spec.
    pub fn theoretical_moments(&self) -> Result<Moments> {
        let base = self.base_moments()?;
        let sd = match self.shape {
            Shape::Ibb { .. } => self.scale * base.sd(),
            _ => self.scale,
        };
        Ok(Moments {
            mean: self.loc,
            sd,
            skewness: base.skewness,
            excess_kurtosis: base.excess_kurtosis,
        })
    }

    /// Prepares a reusable sampler (precomputed constants and tables).
    pub fn sampler(&self) -> Result<Sampler> {
        Sampler::new(self)
    }

    /// `count` i.i.d. draws addressed by `stream`.
    pub fn sample(&self, count: usize, stream: RandomStream) -> Result<Vec<f64>> {
        let sampler = self.sampler()?;
        let mut rng = stream.rng();
        let mut out = alloc::vec![0.0; count];
        sampler.fill(&mut rng, &mut out);
        Ok(out)
    }

    /// The distribution whose draws are the negation of this one's.
    pub fn reflected(&self) -> Self {
        let shape = match &self.shape {
            Shape::Agn { xi, nu } => Shape::Agn {
                xi: 1.0 / xi,
                nu: *nu,
            },
            Shape::Tgh { g, h } => Shape::Tgh { g: -g, h: *h },
            other => other.clone(),
        };
        Self {
            shape,
            loc: -self.loc,
            scale: self.scale,
        }
    }
}

/// Samples `count` draws of `Ω[J]` with `J ~ BetaBin(|Ω| - 1, p, p)`.
pub fn sample_ibb(
    support: &MetricSupport,
    p: f64,
    count: usize,
    stream: RandomStream,
) -> Result<Vec<f64>> {
    DistributionSpec::unit(Shape::Ibb {
        support: support.clone(),
        p,
    })?
    .sample(count, stream)
}

/// Dispatches to the family moment formulas and applies the affine map.
pub fn theoretical_moments(spec: &DistributionSpec) -> Result<Moments> {
    spec.theoretical_moments()
}
