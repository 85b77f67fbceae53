//! Real and elliptic hyperplane arrangements of a configuration: simplicity,
//! the smoothness trichotomy, fixed points and stabilizers.
//!
//! All levels are exact rationals. A point of `E_τ` is described by its
//! rational lattice coordinates, so feasibility is decided exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::elliptic::{ModularParam, RatPoint};
use crate::lattice::{
    circuits_of_matrix, frac, is_unimodular, solve_mod_one, solve_rational, subsets,
    unimodularity_witness, ExactSequenceData, LatticeError, ModOneSolutions, VectorConfig,
};
use crate::matrix::IntMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArrangementError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("arrangement is not simple; violating subsets {witnesses:?}")]
    NotSimple { witnesses: Vec<Vec<usize>> },
}

/// `{a : ⟨a, u_i⟩ = α_i}` in `a∨_R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealHyperplane {
    pub normal: Vec<BigInt>,
    pub level: BigRational,
}

/// `{b ∈ E_τ^d : b_i = β_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticHyperplane {
    pub index: usize,
    pub level: RatPoint,
}

/// The pairs `A_i = H_{R,i} × H_{τ,i}`.
#[derive(Debug, Clone)]
pub struct CombinedArrangement {
    pub config: VectorConfig,
    pub sequence: ExactSequenceData,
    pub real: Vec<RealHyperplane>,
    pub elliptic: Vec<EllipticHyperplane>,
    pub tau: ModularParam,
    /// The user parameters on the `k∨` side, when the arrangement was built from them.
    pub alpha: Option<Vec<BigRational>>,
    pub beta: Option<Vec<RatPoint>>,
}

/// A point of `a∨_R × E_τ^d` with exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CombinedPoint {
    pub real: Vec<BigRational>,
    pub elliptic: Vec<RatPoint>,
}

/// Solution set of a subset of elliptic constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EllipticIntersection {
    Empty,
    /// Positive dimensional; the constraints do not span.
    Infinite,
    Points(Vec<Vec<RatPoint>>),
}

impl EllipticIntersection {
    pub fn is_empty(&self) -> bool {
        matches!(self, EllipticIntersection::Empty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Smooth,
    Orbifold,
    NonOrbifoldSingular,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Smooth => "smooth",
            Verdict::Orbifold => "orbifold",
            Verdict::NonOrbifoldSingular => "non-orbifold-singular",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothnessReport {
    pub simple: bool,
    pub unimodular: bool,
    pub verdict: Verdict,
    /// Minimal dependent subsets with nonempty combined intersection.
    pub simplicity_witnesses: Vec<Vec<usize>>,
    /// A `d`-subset with determinant outside `{0, ±1}`.
    pub unimodularity_witness: Option<(Vec<usize>, BigInt)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoint {
    pub point: CombinedPoint,
    pub subset: Vec<usize>,
}

/// Builds the arrangement from parameters on the `k∨` side, lifted to `t∨`
/// along the section of the exact sequence.
pub fn build_arrangement(
    cfg: &VectorConfig,
    alpha: &[BigRational],
    beta: &[RatPoint],
    m: &ModularParam,
) -> Result<CombinedArrangement, ArrangementError> {
    let seq = ExactSequenceData::new(cfg);
    let k = seq.k();
    for len in [alpha.len(), beta.len()] {
        if len != k {
            return Err(ArrangementError::DimensionMismatch {
                expected: k,
                got: len,
            });
        }
    }
    let alpha_lift = seq.lift(alpha);
    let s: Vec<BigRational> = beta.iter().map(|b| b.s.clone()).collect();
    let t: Vec<BigRational> = beta.iter().map(|b| b.t.clone()).collect();
    let beta_lift: Vec<RatPoint> = seq
        .lift(&s)
        .into_iter()
        .zip(seq.lift(&t))
        .map(|(s, t)| RatPoint::new(s, t))
        .collect();
    let mut arr = build_lifted_with(cfg, seq, &alpha_lift, &beta_lift, m)?;
    arr.alpha = Some(alpha.to_vec());
    arr.beta = Some(beta.to_vec());
    Ok(arr)
}

/// Builds the arrangement from levels already given on the `t∨` side.
pub fn build_arrangement_lifted(
    cfg: &VectorConfig,
    alpha: &[BigRational],
    beta: &[RatPoint],
    m: &ModularParam,
) -> Result<CombinedArrangement, ArrangementError> {
    build_lifted_with(cfg, ExactSequenceData::new(cfg), alpha, beta, m)
}

fn build_lifted_with(
    cfg: &VectorConfig,
    sequence: ExactSequenceData,
    alpha: &[BigRational],
    beta: &[RatPoint],
    m: &ModularParam,
) -> Result<CombinedArrangement, ArrangementError> {
    let n = cfg.n();
    for len in [alpha.len(), beta.len()] {
        if len != n {
            return Err(ArrangementError::DimensionMismatch {
                expected: n,
                got: len,
            });
        }
    }
    if let Some(i) = (0..n).find(|&i| cfg.is_loop(i)) {
        return Err(LatticeError::DegenerateConfig(format!("vector {i} is zero")).into());
    }
    let real = (0..n)
        .map(|i| RealHyperplane {
            normal: cfg.vector(i).to_vec(),
            level: alpha[i].clone(),
        })
        .collect();
    let elliptic = (0..n)
        .map(|i| EllipticHyperplane {
            index: i,
            level: RatPoint::new(beta[i].s.clone(), beta[i].t.clone()),
        })
        .collect();
    Ok(CombinedArrangement {
        config: cfg.clone(),
        sequence,
        real,
        elliptic,
        tau: *m,
        alpha: None,
        beta: None,
    })
}

impl CombinedArrangement {
    pub fn n(&self) -> usize {
        self.config.n()
    }

    pub fn d(&self) -> usize {
        self.config.d()
    }

    pub fn alpha_lift(&self) -> Vec<BigRational> {
        self.real.iter().map(|h| h.level.clone()).collect()
    }

    pub fn beta_lift(&self) -> Vec<RatPoint> {
        self.elliptic.iter().map(|h| h.level.clone()).collect()
    }

    /// `|S| × d` matrix with rows `u_i`, `i ∈ S`.
    fn normals(&self, subset: &[usize]) -> IntMatrix {
        self.sequence.pi_vee.select_rows(subset)
    }

    pub fn real_intersection(&self, subset: &[usize]) -> Option<Vec<BigRational>> {
        let levels: Vec<BigRational> = subset.iter().map(|&i| self.real[i].level.clone()).collect();
        solve_rational(&self.normals(subset), &levels)
    }

    pub fn elliptic_intersection(&self, subset: &[usize]) -> EllipticIntersection {
        let a = self.normals(subset);
        let s: Vec<BigRational> = subset
            .iter()
            .map(|&i| self.elliptic[i].level.s.clone())
            .collect();
        let t: Vec<BigRational> = subset
            .iter()
            .map(|&i| self.elliptic[i].level.t.clone())
            .collect();
        match (solve_mod_one(&a, &s), solve_mod_one(&a, &t)) {
            (ModOneSolutions::Empty, _) | (_, ModOneSolutions::Empty) => {
                EllipticIntersection::Empty
            }
            (ModOneSolutions::Finite(ss), ModOneSolutions::Finite(ts)) => {
                let mut pts = Vec::with_capacity(ss.len() * ts.len());
                for sv in &ss {
                    for tv in &ts {
                        pts.push(
                            sv.iter()
                                .zip(tv)
                                .map(|(s, t)| RatPoint::new(s.clone(), t.clone()))
                                .collect(),
                        );
                    }
                }
                pts.sort();
                EllipticIntersection::Points(pts)
            }
            _ => EllipticIntersection::Infinite,
        }
    }

    /// Both the real and the elliptic systems are solvable.
    pub fn combined_nonempty(&self, subset: &[usize]) -> bool {
        self.real_intersection(subset).is_some() && !self.elliptic_intersection(subset).is_empty()
    }

    /// Whether `p ∈ A_i`.
    pub fn contains(&self, i: usize, p: &CombinedPoint) -> bool {
        let u = self.config.vector(i);
        let real: BigRational = u
            .iter()
            .zip(&p.real)
            .fold(BigRational::zero(), |acc, (c, x)| {
                acc + BigRational::from_integer(c.clone()) * x
            });
        if real != self.real[i].level {
            return false;
        }
        let pair = |pick: fn(&RatPoint) -> &BigRational| {
            u.iter()
                .zip(&p.elliptic)
                .fold(BigRational::zero(), |acc, (c, x)| {
                    acc + BigRational::from_integer(c.clone()) * pick(x)
                })
        };
        let level = &self.elliptic[i].level;
        frac(&(pair(|x| &x.s) - &level.s)).is_zero() && frac(&(pair(|x| &x.t) - &level.t)).is_zero()
    }

    /// Minimal dependent subsets whose combined intersection is nonempty.
    pub fn simplicity_witnesses(&self) -> Vec<Vec<usize>> {
        simplicity_witnesses_of(self, &(0..self.n()).collect::<Vec<_>>())
    }

    pub fn is_simple(&self) -> bool {
        self.simplicity_witnesses().is_empty()
    }

    /// Simplicity of the subarrangement formed by the listed indices.
    pub fn is_simple_restricted(&self, keep: &[usize]) -> bool {
        simplicity_witnesses_of(self, keep).is_empty()
    }

    pub fn smoothness_report(&self) -> SmoothnessReport {
        let simplicity_witnesses = self.simplicity_witnesses();
        let simple = simplicity_witnesses.is_empty();
        let unimodularity_witness = unimodularity_witness(&self.config);
        let unimodular = unimodularity_witness.is_none();
        debug_assert_eq!(unimodular, is_unimodular(&self.config));
        let verdict = match (simple, unimodular) {
            (true, true) => Verdict::Smooth,
            (true, false) => Verdict::Orbifold,
            (false, _) => Verdict::NonOrbifoldSingular,
        };
        SmoothnessReport {
            simple,
            unimodular,
            verdict,
            simplicity_witnesses,
            unimodularity_witness,
        }
    }

    /// All combined intersection points of `d` hyperplanes with independent
    /// normals, one entry per elliptic solution.
    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>, ArrangementError> {
        let witnesses = self.simplicity_witnesses();
        if !witnesses.is_empty() {
            return Err(ArrangementError::NotSimple { witnesses });
        }
        Ok(self.intersection_points_unchecked())
    }

    /// [`Self::fixed_points`] without the simplicity precondition.
    pub fn intersection_points_unchecked(&self) -> Vec<FixedPoint> {
        let d = self.d();
        let candidates = subsets(self.n(), d);
        let per_subset: Vec<Vec<FixedPoint>> = candidates
            .par_iter()
            .map(|s| {
                if self.normals(s).rank() < d {
                    return Vec::new();
                }
                let Some(real) = self.real_intersection(s) else {
                    return Vec::new();
                };
                match self.elliptic_intersection(s) {
                    EllipticIntersection::Points(pts) => pts
                        .into_iter()
                        .map(|e| FixedPoint {
                            point: CombinedPoint {
                                real: real.clone(),
                                elliptic: e,
                            },
                            subset: s.clone(),
                        })
                        .collect(),
                    _ => Vec::new(),
                }
            })
            .collect();
        per_subset.into_iter().flatten().collect()
    }

    /// Rank of `{u_i : p ∈ A_i}`.
    pub fn stabilizer_dimension(&self, p: &CombinedPoint) -> usize {
        let on: Vec<usize> = (0..self.n()).filter(|&i| self.contains(i, p)).collect();
        self.normals(&on).rank()
    }
}

fn simplicity_witnesses_of(arr: &CombinedArrangement, keep: &[usize]) -> Vec<Vec<usize>> {
    let sub = arr.sequence.pi.select_cols(keep);
    let circuits = circuits_of_matrix(&sub);
    let mut out: Vec<Vec<usize>> = circuits
        .par_iter()
        .filter_map(|c| {
            let s: Vec<usize> = c.support.iter().map(|&j| keep[j]).collect();
            arr.combined_nonempty(&s).then_some(s)
        })
        .collect();
    out.sort();
    out
}

/// Exact number of elliptic solutions of an independent `d`-subset, `det²`.
pub fn torsion_multiplicity(cfg: &VectorConfig, subset: &[usize]) -> BigInt {
    let det = cfg.matrix().select_cols(subset).det();
    &det * &det
}

/// Convenience: the rational `n/d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Reciprocals of the first `n` primes, used as default real levels.
pub fn default_real_levels(n: usize) -> Vec<BigRational> {
    let mut primes = Vec::with_capacity(n);
    let mut c = 2u64;
    while primes.len() < n {
        if (2..c)
            .take_while(|p| p * p <= c)
            .all(|p| !c.is_multiple_of(p))
        {
            primes.push(c);
        }
        c += 1;
    }
    primes
        .into_iter()
        .map(|p| BigRational::new(BigInt::one(), BigInt::from(p)))
        .collect()
}
