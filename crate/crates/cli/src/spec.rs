//! Problem specification files.

use std::path::Path;

use htk_core::elliptic::{ModularParam, RatPoint};
use htk_core::lattice::{default_alpha_hat, gale_dual, LatticeError, VectorConfig};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A rational given as an integer, a float literal, or a `"p/q"` or decimal string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RawNumber {
    fn to_rational(&self) -> Result<BigRational, SpecError> {
        match self {
            RawNumber::Int(i) => Ok(BigRational::from_integer((*i).into())),
            RawNumber::Float(f) => parse_rational(&format!("{f}")),
            RawNumber::Text(s) => parse_rational(s),
        }
    }
}

/// Parses `"p/q"`, `"-3"` or an exact decimal such as `"0.125"` or `"1e-3"`.
pub fn parse_rational(s: &str) -> Result<BigRational, SpecError> {
    let bad = || SpecError::Parse(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    U,
    V,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTau {
    re: RawNumber,
    im: RawNumber,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    seed: Option<u64>,
    radius: Option<u32>,
    degree: Option<u32>,
    samples: Option<usize>,
    step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: Option<String>,
    role: Role,
    /// Ambient dimension; required only when the matrix has no rows.
    dim: Option<usize>,
    matrix: Vec<Vec<i64>>,
    tau: Option<RawTau>,
    alpha: Option<Vec<RawNumber>>,
    beta: Option<Vec<[RawNumber; 2]>>,
    alpha_hat: Option<Vec<RawNumber>>,
    #[serde(default)]
    options: RawOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub seed: u64,
    pub radius: Option<u32>,
    pub degree: u32,
    pub samples: usize,
    pub step: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 42,
            radius: None,
            degree: 1,
            samples: 100,
            step: htk_core::geometry::DEFAULT_STEP,
        }
    }
}

/// A validated problem: the configuration on both sides of Gale duality plus
/// the moduli and levels.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub role: Role,
    /// The matrix as given, interpreted according to `role`.
    pub config: VectorConfig,
    pub tau: Complex64,
    /// Real levels on the `k∨` side.
    pub alpha: Vec<BigRational>,
    /// Elliptic levels `s + tτ` on the `k∨` side.
    pub beta: Vec<RatPoint>,
    /// Covector splitting the circuits of `v`.
    pub alpha_hat: Vec<BigRational>,
    pub options: Options,
}

impl ProblemSpec {
    pub fn from_path(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, SpecError> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))?;
        let d = match (raw.matrix.first(), raw.dim) {
            (Some(row), Some(dim)) if row.len() != dim => {
                return Err(SpecError::Parse(format!(
                    "dim = {dim} but rows have length {}",
                    row.len()
                )))
            }
            (Some(row), _) => row.len(),
            (None, Some(dim)) => dim,
            (None, None) => {
                return Err(SpecError::Parse(
                    "empty matrix needs an explicit dim".into(),
                ))
            }
        };
        if let Some(row) = raw.matrix.iter().find(|r| r.len() != d) {
            return Err(SpecError::Parse(format!(
                "row {row:?} does not have length {d}"
            )));
        }
        let config = VectorConfig::from_i64(d, &raw.matrix)?;
        // Ranks of the two sides: `d` for u, `k = n − d` for v.
        let n = config.n();
        let k = match raw.role {
            Role::U => n - d,
            Role::V => d,
        };
        let tau = match &raw.tau {
            Some(t) => Complex64::new(rat_f64(&t.re.to_rational()?), rat_f64(&t.im.to_rational()?)),
            None => Complex64::new(0.3, 1.1),
        };
        ModularParam::new(tau).map_err(|e| SpecError::Parse(e.to_string()))?;
        let alpha = match &raw.alpha {
            Some(a) => a
                .iter()
                .map(RawNumber::to_rational)
                .collect::<Result<Vec<_>, _>>()?,
            None => default_alpha_hat(k),
        };
        if alpha.len() != k {
            return Err(SpecError::Parse(format!(
                "alpha has {} entries, expected {k}",
                alpha.len()
            )));
        }
        let beta = match &raw.beta {
            Some(b) => b
                .iter()
                .map(|[s, t]| Ok(RatPoint::new(s.to_rational()?, t.to_rational()?)))
                .collect::<Result<Vec<_>, SpecError>>()?,
            None => vec![RatPoint::zero(); k],
        };
        if beta.len() != k {
            return Err(SpecError::Parse(format!(
                "beta has {} entries, expected {k}",
                beta.len()
            )));
        }
        let alpha_hat = match &raw.alpha_hat {
            Some(a) => a
                .iter()
                .map(RawNumber::to_rational)
                .collect::<Result<Vec<_>, _>>()?,
            None => default_alpha_hat(n),
        };
        if alpha_hat.len() != n {
            return Err(SpecError::Parse(format!(
                "alpha_hat has {} entries, expected {n}",
                alpha_hat.len()
            )));
        }
        let defaults = Options::default();
        let o = raw.options;
        Ok(ProblemSpec {
            name: raw.name.unwrap_or_else(|| "unnamed".into()),
            role: raw.role,
            config,
            tau,
            alpha,
            beta,
            alpha_hat,
            options: Options {
                seed: o.seed.unwrap_or(defaults.seed),
                radius: o.radius,
                degree: o.degree.unwrap_or(defaults.degree),
                samples: o.samples.unwrap_or(defaults.samples),
                step: o.step.unwrap_or(defaults.step),
            },
        })
    }

    /// The arrangement side.
    pub fn u(&self) -> Result<VectorConfig, LatticeError> {
        match self.role {
            Role::U => Ok(self.config.clone()),
            Role::V => gale_dual(&self.config),
        }
    }

    /// The side whose circuits define the ideals.
    pub fn v(&self) -> Result<VectorConfig, LatticeError> {
        match self.role {
            Role::U => gale_dual(&self.config),
            Role::V => Ok(self.config.clone()),
        }
    }

    pub fn modular_param(&self) -> ModularParam {
        ModularParam::new(self.tau).expect("validated at parse time")
    }
}

fn rat_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
