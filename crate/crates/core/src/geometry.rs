//! Numeric checks of the symplectic and automorphic identities on the surface
//! `zw = ϑ(x)`, and evaluation of the moment maps of all three flavors.
//!
//! The holomorphic symplectic form is the residue of `dz∧dw∧dx / (zw − ϑ(x))`,
//! oriented so that it reads `z^{-1} dz∧dx` where `z ≠ 0`. It is evaluated
//! chart-free as `ω(a, b) = −det[a, b, n] / dF(n)` for any `n` with `dF(n) ≠ 0`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::elliptic::{
    map_matrix, quasi_period_factor, reduce, theta, theta_with_derivative, AutomorphyData,
    EllipticPoint, ModularParam, TorusPointE, DEFAULT_TRUNCATION,
};
use crate::lattice::ExactSequenceData;

/// `|ϑ(x)|` below this marks a nodal fiber.
pub const FIBER_TOL: f64 = 1e-9;
/// Smallest `|z|` accepted by [`e_moment_check`].
pub const CHART_MIN_Z: f64 = 0.1;
pub const DEFAULT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("|z| = {0} is below the chart threshold")]
    ChartFailure(f64),
    #[error("1 - z_{index} w_{index} vanishes")]
    OffLocus { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub z: Complex64,
    pub w: Complex64,
    pub x: Complex64,
}

impl SurfacePoint {
    pub fn residual(&self, m: &ModularParam) -> f64 {
        (self.z * self.w - theta(self.x, m, DEFAULT_TRUNCATION)).norm()
    }
}

/// Which line of the nodal fiber `zw = 0` a sample lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `w = 0`
    Z,
    /// `z = 0`
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberType {
    SmoothTorusFiber,
    NodalFiber,
}

impl FiberType {
    pub fn as_str(&self) -> &'static str {
        match self {
            FiberType::SmoothTorusFiber => "smooth_torus_fiber",
            FiberType::NodalFiber => "nodal_fiber",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: Option<u64>,
    pub step: Option<f64>,
    pub samples: usize,
    /// The worst sample, when one exists.
    pub point: Option<SurfacePoint>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            residual,
            tolerance,
            pass: residual < tolerance,
            seed: None,
            step: None,
            samples: 1,
            point: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_step(mut self, h: f64) -> Self {
        self.step = Some(h);
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    pub fn with_point(mut self, p: SurfacePoint) -> Self {
        self.point = Some(p);
        self
    }
}

fn annulus_point(rng: &mut ChaCha8Rng) -> Complex64 {
    // Area-uniform on 0.5 ≤ |z| ≤ 2.
    let r = rng.gen_range(0.25f64..4.0).sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..TAU))
}

pub fn sample_surface(x: Complex64, m: &ModularParam, seed: u64) -> SurfacePoint {
    sample_surface_on(x, m, seed, Branch::Z)
}

/// A point over `x`; over a nodal fiber the branch selects the line.
pub fn sample_surface_on(
    x: Complex64,
    m: &ModularParam,
    seed: u64,
    branch: Branch,
) -> SurfacePoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = annulus_point(&mut rng);
    let th = theta(x, m, DEFAULT_TRUNCATION);
    if th.norm() < FIBER_TOL {
        return match branch {
            Branch::Z => SurfacePoint {
                z: c,
                w: Complex64::zero(),
                x,
            },
            Branch::W => SurfacePoint {
                z: Complex64::zero(),
                w: c,
                x,
            },
        };
    }
    SurfacePoint { z: c, w: th / c, x }
}

pub fn fiber_type(x: Complex64, m: &ModularParam) -> FiberType {
    let r = reduce(x, m);
    if theta(r.rep, m, DEFAULT_TRUNCATION).norm() < FIBER_TOL {
        FiberType::NodalFiber
    } else {
        FiberType::SmoothTorusFiber
    }
}

/// Grid points `(i/g, j/g)`, `0 ≤ i, j ≤ g`, of the fundamental domain whose fiber is nodal.
pub fn nodal_grid_points(m: &ModularParam, g: u32) -> Vec<(u32, u32)> {
    let gf = f64::from(g);
    (0..=g)
        .flat_map(|i| (0..=g).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            fiber_type(m.from_coords(f64::from(i) / gf, f64::from(j) / gf), m)
                == FiberType::NodalFiber
        })
        .collect()
}

type Vec3 = [Complex64; 3];

fn det3(a: &Vec3, b: &Vec3, c: &Vec3) -> Complex64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn apply(df: &Vec3, a: &Vec3) -> Complex64 {
    df[0] * a[0] + df[1] * a[1] + df[2] * a[2]
}

/// The residue form at a point with differential `df = dF`.
fn residue_form(df: &Vec3, a: &Vec3, b: &Vec3) -> Complex64 {
    let norm2: f64 = df.iter().map(Complex64::norm_sqr).sum();
    let n: Vec3 = [
        df[0].conj() / norm2,
        df[1].conj() / norm2,
        df[2].conj() / norm2,
    ];
    -det3(a, b, &n) / apply(df, &n)
}

fn exact_differential(p: &SurfacePoint, m: &ModularParam) -> Vec3 {
    let (_, dth) = theta_with_derivative(p.x, m, DEFAULT_TRUNCATION);
    [p.w, p.z, -dth]
}

/// A random unit vector in `ker df`.
fn random_tangent(df: &Vec3, rng: &mut ChaCha8Rng) -> Vec3 {
    let mut r = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let v: Vec3 = [r(), r(), r()];
    let norm2: f64 = df.iter().map(Complex64::norm_sqr).sum();
    let k = apply(df, &v) / norm2;
    let t: Vec3 = [
        v[0] - k * df[0].conj(),
        v[1] - k * df[1].conj(),
        v[2] - k * df[2].conj(),
    ];
    let len = t.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    [t[0] / len, t[1] / len, t[2] / len]
}

/// Checks `ω(v_ζ, δ) = ζ·dx(δ)` for the generator of `t·(z,w,x) = (tz, t^{-1}w, x)`,
/// with the vector field and `dϑ` both taken by central differences of step `h`.
/// The residual is the maximum over three unit displacements `δ`.
pub fn e_moment_check(
    p: &SurfacePoint,
    m: &ModularParam,
    h: f64,
    zeta: Complex64,
    seed: u64,
) -> Result<CheckResult, GeometryError> {
    if p.z.norm() < CHART_MIN_Z {
        return Err(GeometryError::ChartFailure(p.z.norm()));
    }
    let flow = |s: Complex64| (s.exp() * p.z, (-s).exp() * p.w);
    let (zp, wp) = flow(zeta * h);
    let (zm, wm) = flow(-zeta * h);
    let v: Vec3 = [
        (zp - zm) / (2.0 * h),
        (wp - wm) / (2.0 * h),
        Complex64::zero(),
    ];
    let dth =
        (theta(p.x + h, m, DEFAULT_TRUNCATION) - theta(p.x - h, m, DEFAULT_TRUNCATION)) / (2.0 * h);
    let df: Vec3 = [p.w, p.z, -dth];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residual: f64 = 0.0;
    for _ in 0..3 {
        let delta = random_tangent(&df, &mut rng);
        let lhs = residue_form(&df, &v, &delta);
        residual = residual.max((lhs - zeta * delta[2]).norm());
    }
    Ok(CheckResult::new("e_moment", residual, 1e-5)
        .with_seed(seed)
        .with_step(h)
        .with_point(*p))
}

/// `γ·(z, w, x) = (z, α(γ, x) w, x + γ)` with `α` the quasi-period factor.
pub fn gamma_act(p: &SurfacePoint, gamma: (i64, i64), m: &ModularParam) -> SurfacePoint {
    let alpha = quasi_period_factor(gamma.0, gamma.1, p.x, m);
    SurfacePoint {
        z: p.z,
        w: alpha * p.w,
        x: p.x + m.from_coords(gamma.0 as f64, gamma.1 as f64),
    }
}

/// Surface preservation and form preservation under `γ`, both relative.
pub fn gamma_equivariance_check(
    p: &SurfacePoint,
    gamma: (i64, i64),
    m: &ModularParam,
    seed: u64,
) -> CheckResult {
    let (a, b) = gamma;
    let alpha = quasi_period_factor(a, b, p.x, m);
    let img = gamma_act(p, gamma, m);
    let th = theta(img.x, m, DEFAULT_TRUNCATION);
    let scale = 1f64.max(th.norm()).max((img.z * img.w).norm());
    let mut residual = (img.z * img.w - th).norm() / scale;

    // dγ(δ) = (δ_z, α δ_w + α' w δ_x, δ_x) with α' = −2πi b α.
    let dalpha = Complex64::new(0.0, -2.0 * PI * b as f64) * alpha;
    let push = |d: &Vec3| -> Vec3 { [d[0], alpha * d[1] + dalpha * p.w * d[2], d[2]] };
    let df = exact_differential(p, m);
    let df_img = exact_differential(&img, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..3 {
        let d1 = random_tangent(&df, &mut rng);
        let d2 = random_tangent(&df, &mut rng);
        let before = residue_form(&df, &d1, &d2);
        let after = residue_form(&df_img, &push(&d1), &push(&d2));
        residual = residual.max((after - before).norm() / before.norm().max(1.0));
    }
    CheckResult::new(format!("gamma_equivariance({a},{b})"), residual, 1e-9)
        .with_seed(seed)
        .with_point(*p)
}

/// Distance between `γ₁+γ₂` applied at once and `γ₂` after `γ₁`, relative.
pub fn gamma_composition_residual(
    p: &SurfacePoint,
    g1: (i64, i64),
    g2: (i64, i64),
    m: &ModularParam,
) -> f64 {
    let once = gamma_act(p, (g1.0 + g2.0, g1.1 + g2.1), m);
    let twice = gamma_act(&gamma_act(p, g1, m), g2, m);
    let dw = (once.w - twice.w).norm() / once.w.norm().max(1.0);
    dw.max((once.x - twice.x).norm())
        .max((once.z - twice.z).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentFlavor {
    AdditiveComplex,
    AdditiveReal,
    Multiplicative,
    EllipticReal,
    EllipticCurveValued,
}

/// A point of the ambient space `(z⃗, w⃗, x⃗)`; `x⃗` is ignored by the
/// additive and multiplicative flavors.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub x: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
    /// A point of `(C^×)^k`.
    Torus(Vec<Complex64>),
    Curve(TorusPointE),
}

fn iota(seq: &ExactSequenceData, i: usize, j: usize) -> f64 {
    seq.iota[(i, j)].to_f64().unwrap_or(f64::NAN)
}

/// Evaluates the moment map of the given flavor for the subtorus `K`.
pub fn moment_eval(
    flavor: MomentFlavor,
    p: &AmbientPoint,
    seq: &ExactSequenceData,
    m: &ModularParam,
) -> Result<MomentValue, GeometryError> {
    let (n, k) = (seq.n(), seq.k());
    for len in [p.z.len(), p.w.len(), p.x.len()] {
        if len != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: len,
            });
        }
    }
    let real = |weight: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..k)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        0.5 * (p.z[i].norm_sqr() - weight(i) * p.w[i].norm_sqr()) * iota(seq, i, j)
                    })
                    .sum()
            })
            .collect()
    };
    Ok(match flavor {
        MomentFlavor::AdditiveComplex => MomentValue::Complex(
            (0..k)
                .map(|j| (0..n).map(|i| p.z[i] * p.w[i] * iota(seq, i, j)).sum())
                .collect(),
        ),
        MomentFlavor::AdditiveReal => MomentValue::Real(real(&|_| 1.0)),
        MomentFlavor::Multiplicative => {
            let f: Vec<Complex64> = (0..n).map(|i| 1.0 - p.z[i] * p.w[i]).collect();
            if let Some(index) = f.iter().position(|c| c.norm() < 1e-14) {
                return Err(GeometryError::OffLocus { index });
            }
            MomentValue::Torus(
                (0..k)
                    .map(|j| {
                        (0..n)
                            .map(|i| f[i].powi(seq.iota[(i, j)].to_i32().expect("small exponent")))
                            .product()
                    })
                    .collect(),
            )
        }
        MomentFlavor::EllipticReal => {
            let imt = m.tau().im;
            MomentValue::Real(real(&|i| (-2.0 * PI * p.x[i].im * p.x[i].im / imt).exp()))
        }
        MomentFlavor::EllipticCurveValued => {
            let pt = TorusPointE::from_complex(&p.x, m);
            MomentValue::Curve(map_matrix(&seq.iota, &pt, m).expect("iota has n rows"))
        }
    })
}

/// The complex part of a moment level, in the flavor's target.
#[derive(Debug, Clone, PartialEq)]
pub enum ComplexLevel {
    Additive(Vec<Complex64>),
    Multiplicative(Vec<Complex64>),
    Elliptic(TorusPointE),
}

/// Whether `p` lies within `tol` of the level `(α, β)` for the real and the
/// complex moment maps of the flavor fixed by `beta`.
pub fn level_set_member(
    p: &AmbientPoint,
    alpha: &[f64],
    beta: &ComplexLevel,
    seq: &ExactSequenceData,
    m: &ModularParam,
    tol: f64,
) -> Result<bool, GeometryError> {
    let (real_flavor, complex_flavor) = match beta {
        ComplexLevel::Additive(_) => (MomentFlavor::AdditiveReal, MomentFlavor::AdditiveComplex),
        ComplexLevel::Multiplicative(_) => {
            (MomentFlavor::AdditiveReal, MomentFlavor::Multiplicative)
        }
        ComplexLevel::Elliptic(_) => (
            MomentFlavor::EllipticReal,
            MomentFlavor::EllipticCurveValued,
        ),
    };
    let MomentValue::Real(r) = moment_eval(real_flavor, p, seq, m)? else {
        unreachable!()
    };
    if r.len() != alpha.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: r.len(),
            got: alpha.len(),
        });
    }
    let real_ok = r.iter().zip(alpha).all(|(a, b)| (a - b).abs() < tol);
    let complex_ok = match (moment_eval(complex_flavor, p, seq, m)?, beta) {
        (MomentValue::Complex(c), ComplexLevel::Additive(b))
        | (MomentValue::Torus(c), ComplexLevel::Multiplicative(b)) => {
            c.len() == b.len() && c.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
        }
        (MomentValue::Curve(c), ComplexLevel::Elliptic(b)) => {
            c.dim() == b.dim() && c.distance(b) < tol
        }
        _ => unreachable!(),
    };
    Ok(real_ok && complex_ok)
}

/// Samples `x` uniformly from the fundamental domain.
pub fn random_fundamental_point(rng: &mut ChaCha8Rng, m: &ModularParam) -> Complex64 {
    m.from_coords(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
}

/// Seeded surface points over random `x` (one sub-seed per point).
pub fn sample_points(m: &ModularParam, count: usize, seed: u64) -> Vec<(SurfacePoint, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x = random_fundamental_point(&mut rng, m);
            let s = rng.gen();
            (sample_surface(x, m, s), s)
        })
        .collect()
}

fn worst(name: &str, tol: f64, results: Vec<CheckResult>, seed: u64) -> CheckResult {
    let count = results.len();
    let w = results
        .into_iter()
        .max_by(|a, b| a.residual.total_cmp(&b.residual));
    let mut out = CheckResult::new(name, w.as_ref().map_or(0.0, |r| r.residual), tol)
        .with_seed(seed)
        .with_samples(count);
    if let Some(r) = w {
        out.step = r.step;
        out.point = r.point;
    }
    out
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `θ(x+a+bτ)` against the factor times `θ(x)` for `|a|, |b| ≤ 3`, relative to
/// `|factor| · max(|θ(x)|, 1)`.
pub fn theta_quasi_periodicity_check(m: &ModularParam, samples: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Complex64> = (0..samples)
        .map(|_| m.from_coords(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let residual = xs
        .par_iter()
        .map(|&x| {
            let th = theta(x, m, DEFAULT_TRUNCATION);
            let mut r: f64 = 0.0;
            for a in -3..=3 {
                for b in -3..=3 {
                    let f = quasi_period_factor(a, b, x, m);
                    let lhs = theta(x + m.from_coords(a as f64, b as f64), m, DEFAULT_TRUNCATION);
                    r = r.max((lhs - f * th).norm() / (f.norm() * th.norm().max(1.0)));
                }
            }
            r
        })
        .reduce(|| 0.0, f64::max);
    CheckResult::new("theta_quasi_periodicity", residual, 1e-9)
        .with_seed(seed)
        .with_samples(samples)
}

pub fn theta_zero_check(m: &ModularParam) -> CheckResult {
    CheckResult::new(
        "theta_zero",
        theta(Complex64::zero(), m, DEFAULT_TRUNCATION).norm(),
        1e-12,
    )
}

pub fn theta_oddness_check(m: &ModularParam, samples: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let residual = (0..samples)
        .map(|_| {
            let x = m.from_coords(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let th = theta(x, m, DEFAULT_TRUNCATION);
            (theta(-x, m, DEFAULT_TRUNCATION) + th).norm() / th.norm().max(1.0)
        })
        .fold(0.0, f64::max);
    CheckResult::new("theta_oddness", residual, 1e-10)
        .with_seed(seed)
        .with_samples(samples)
}

/// Cocycle identity of the theta bundle's automorphy factor over `|a|, |b| ≤ 2`.
pub fn automorphy_cocycle_check(m: &ModularParam, samples: usize, seed: u64) -> CheckResult {
    let data = AutomorphyData::theta_bundle(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residual: f64 = 0.0;
    for _ in 0..samples {
        let x = random_fundamental_point(&mut rng, m);
        let g1 = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        let g2 = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        residual = residual.max(data.cocycle_residual(g1, g2, x, m));
        residual = residual.max(data.character_residual(g1, g2, m));
    }
    CheckResult::new("automorphy_cocycle", residual, 1e-9)
        .with_seed(seed)
        .with_samples(samples)
}

/// Worst e-moment residual over seeded points, plus the per-point residuals.
pub fn e_moment_suite(
    m: &ModularParam,
    samples: usize,
    seed: u64,
    h: f64,
) -> (CheckResult, Vec<f64>) {
    let results: Vec<CheckResult> = sample_points(m, samples, seed)
        .par_iter()
        .map(|(p, s)| {
            e_moment_check(p, m, h, Complex64::new(1.0, 0.0), *s)
                .expect("annulus points satisfy the chart bound")
        })
        .collect();
    let residuals = results.iter().map(|r| r.residual).collect();
    (worst("e_moment", 1e-5, results, seed), residuals)
}

/// Median residual ratio between steps `h` and `h/2`; second order gives about 4.
/// Reported as `3.5 / ratio` against tolerance 1.
pub fn e_moment_convergence_check(
    m: &ModularParam,
    samples: usize,
    seed: u64,
    h: f64,
) -> CheckResult {
    let (_, coarse) = e_moment_suite(m, samples, seed, h);
    let (_, fine) = e_moment_suite(m, samples, seed, h / 2.0);
    let ratio = median(coarse) / median(fine);
    CheckResult::new("e_moment_convergence", 3.5 / ratio, 1.0)
        .with_seed(seed)
        .with_step(h)
        .with_samples(samples)
}

pub fn gamma_equivariance_suite(m: &ModularParam, samples: usize, seed: u64) -> CheckResult {
    let results: Vec<CheckResult> = sample_points(m, samples, seed)
        .par_iter()
        .flat_map_iter(|(p, s)| {
            (-3..=3).flat_map(move |a| {
                (-3..=3).map(move |b| gamma_equivariance_check(p, (a, b), m, *s))
            })
        })
        .collect();
    worst("gamma_equivariance", 1e-9, results, seed)
}

/// Counts nodal points of a `(g+1)²` grid away from the four lattice corners.
pub fn fiber_scan_check(m: &ModularParam, g: u32) -> CheckResult {
    let interior = nodal_grid_points(m, g)
        .into_iter()
        .filter(|&(i, j)| !((i == 0 || i == g) && (j == 0 || j == g)))
        .count();
    let mut r = CheckResult::new("fiber_scan", interior as f64, 0.5)
        .with_samples(((g + 1) * (g + 1)) as usize);
    r.pass = interior == 0 && fiber_type(Complex64::zero(), m) == FiberType::NodalFiber;
    r
}

/// Curve-valued moment map against a direct componentwise computation.
pub fn moment_consistency_residual(
    p: &AmbientPoint,
    seq: &ExactSequenceData,
    m: &ModularParam,
) -> f64 {
    let MomentValue::Curve(c) =
        moment_eval(MomentFlavor::EllipticCurveValued, p, seq, m).expect("dimensions")
    else {
        unreachable!()
    };
    let direct: Vec<EllipticPoint> = (0..seq.k())
        .map(|j| reduce((0..seq.n()).map(|i| iota(seq, i, j) * p.x[i]).sum(), m))
        .collect();
    c.distance(&TorusPointE { components: direct })
}
