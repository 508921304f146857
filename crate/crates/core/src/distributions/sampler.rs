use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::{support, DistributionSpec, Shape};
use crate::Result;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone)]
enum Kind {
    Normal,
    Uniform,
    Sgn {
        gamma: Gamma<f64>,
        inv_beta: f64,
        inv_sd: f64,
    },
    Agn {
        // None means nu = 2, where |Z| is drawn as |N(0, 1/2)|.
        gamma: Option<Gamma<f64>>,
        inv_nu: f64,
        p_positive: f64,
        xi: f64,
        mean: f64,
        inv_sd: f64,
    },
    Tgh {
        g: f64,
        h: f64,
        mean: f64,
        inv_sd: f64,
    },
    Ibb {
        cdf: Vec<f64>,
        values: Vec<f64>,
    },
    Bimodal {
        separation: f64,
        inv_sd: f64,
    },
}

/// A prepared sampler for one [`DistributionSpec`].
///
/// Immutable after construction; share it across threads and give each
/// thread its own generator.
#[derive(Debug, Clone)]
pub struct Sampler {
    kind: Kind,
    loc: f64,
    scale: f64,
}

impl Sampler {
    pub fn new(spec: &DistributionSpec) -> Result<Self> {
        let base = spec.base_moments()?;
        let inv_sd = 1.0 / base.sd();
        let kind = match &spec.shape {
            Shape::Normal => Kind::Normal,
            Shape::Sgn { beta } if beta.is_infinite() => Kind::Uniform,
            Shape::Sgn { beta } => Kind::Sgn {
                gamma: Gamma::new(1.0 / beta, 1.0).expect("validated beta"),
                inv_beta: 1.0 / beta,
                inv_sd,
            },
            Shape::Agn { xi, nu } => Kind::Agn {
                gamma: if *nu == 2.0 {
                    None
                } else {
                    Some(Gamma::new(1.0 / nu, 1.0).expect("validated nu"))
                },
                inv_nu: 1.0 / nu,
                p_positive: xi * xi / (1.0 + xi * xi),
                xi: *xi,
                mean: base.mean,
                inv_sd,
            },
            Shape::Tgh { g, h } => Kind::Tgh {
                g: *g,
                h: *h,
                mean: base.mean,
                inv_sd,
            },
            Shape::Ibb { support, p } => {
                let pmf = support::symmetric_beta_binomial_pmf(support.len() - 1, *p)?;
                let mut acc = 0.0;
                let mut cdf: Vec<f64> = pmf
                    .iter()
                    .map(|w| {
                        acc += w;
                        acc
                    })
                    .collect();
                if let Some(last) = cdf.last_mut() {
                    *last = 1.0;
                }
                Kind::Ibb {
                    cdf,
                    values: support.values().to_vec(),
                }
            }
            Shape::BimodalMixture { separation } => Kind::Bimodal {
                separation: *separation,
                inv_sd,
            },
        };
        Ok(Self {
            kind,
            loc: spec.loc,
            scale: spec.scale,
        })
    }

    /// One standardized draw before the `loc`/`scale` map (raw `Ω[J]` for IBB).
    #[inline]
    pub fn draw_standard<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            Kind::Normal => rng.sample(StandardNormal),
            Kind::Uniform => (2.0 * rng.random::<f64>() - 1.0) * SQRT_3,
            Kind::Sgn {
                gamma,
                inv_beta,
                inv_sd,
            } => {
                let magnitude = libm::pow(gamma.sample(rng), *inv_beta) * inv_sd;
                if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            }
            Kind::Agn {
                gamma,
                inv_nu,
                p_positive,
                xi,
                mean,
                inv_sd,
            } => {
                let magnitude = match gamma {
                    None => {
                        let z: f64 = rng.sample(StandardNormal);
                        z.abs() * core::f64::consts::FRAC_1_SQRT_2
                    }
                    Some(gamma) => libm::pow(gamma.sample(rng), *inv_nu),
                };
                let x = if rng.random::<f64>() < *p_positive {
                    magnitude * xi
                } else {
                    -magnitude / xi
                };
                (x - mean) * inv_sd
            }
            Kind::Tgh { g, h, mean, inv_sd } => {
                let z: f64 = rng.sample(StandardNormal);
                let mut x = if *g == 0.0 { z } else { libm::expm1(g * z) / g };
                if *h > 0.0 {
                    x *= libm::exp(0.5 * h * z * z);
                }
                (x - mean) * inv_sd
            }
            Kind::Ibb { cdf, values } => {
                let u: f64 = rng.random();
                let j = cdf.partition_point(|&c| c <= u).min(values.len() - 1);
                values[j]
            }
            Kind::Bimodal { separation, inv_sd } => {
                let z: f64 = rng.sample(StandardNormal);
                let shift = if rng.random::<bool>() {
                    *separation
                } else {
                    -separation
                };
                (z + shift) * inv_sd
            }
        }
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.loc + self.scale * self.draw_standard(rng)
    }

    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for slot in out {
            *slot = self.draw(rng);
        }
    }
}
