//! The curve `E_τ = C/⟨1,τ⟩`, its powers, the Jacobi theta function and
//! Appell–Humbert automorphy factors.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::frac;
use crate::matrix::{smith_normal_form, IntMatrix};

/// Equality tolerance on reduced lattice coordinates.
pub const REDUCTION_TOL: f64 = 1e-9;
/// Default number of product factors in [`theta`].
pub const DEFAULT_TRUNCATION: u32 = 40;
/// `|q|^N` above this raises the truncation warning.
pub const TRUNCATION_TOL: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipticError {
    #[error("Im(tau) must be positive, got {0}")]
    NonPositiveImTau(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is not in the image (residual {residual:e})")]
    NotInKernel { residual: f64 },
    #[error("lattice map has rank {rank} < {dim}; preimages are not unique")]
    AmbiguousPreimage { rank: usize, dim: usize },
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The modular parameter `τ` in the upper half plane, with `q = e^{2πiτ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularParam {
    tau: Complex64,
    q: Complex64,
}

impl ModularParam {
    pub fn new(tau: Complex64) -> Result<Self, EllipticError> {
        if tau.im.is_nan() || tau.im <= 0.0 {
            return Err(EllipticError::NonPositiveImTau(tau.im));
        }
        Ok(ModularParam {
            tau,
            q: (2.0 * PI * I * tau).exp(),
        })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    /// `x = s + t·τ` for real lattice coordinates.
    pub fn from_coords(&self, s: f64, t: f64) -> Complex64 {
        s + t * self.tau
    }

    /// Real lattice coordinates `(s, t)` of `x`.
    pub fn coords(&self, x: Complex64) -> (f64, f64) {
        let t = x.im / self.tau.im;
        (x.re - t * self.tau.re, t)
    }
}

/// Reduces into `[0,1)`, snapping values within tolerance of 1 to 0.
fn reduce_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 - REDUCTION_TOL * 1e-3 {
        0.0
    } else {
        r
    }
}

/// Distance on the circle `R/Z`.
fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// A point of `E_τ` with its canonical representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPoint {
    pub rep: Complex64,
    pub s: f64,
    pub t: f64,
}

impl EllipticPoint {
    pub fn identity() -> Self {
        EllipticPoint {
            rep: Complex64::zero(),
            s: 0.0,
            t: 0.0,
        }
    }

    pub fn from_coords(s: f64, t: f64, m: &ModularParam) -> Self {
        let (s, t) = (reduce_unit(s), reduce_unit(t));
        EllipticPoint {
            rep: m.from_coords(s, t),
            s,
            t,
        }
    }

    /// Equality in `E_τ` up to [`REDUCTION_TOL`] in lattice coordinates.
    pub fn approx_eq(&self, other: &EllipticPoint) -> bool {
        self.distance(other) <= REDUCTION_TOL
    }

    /// Max-norm distance of lattice coordinates on the torus.
    pub fn distance(&self, other: &EllipticPoint) -> f64 {
        circle_dist(self.s, other.s).max(circle_dist(self.t, other.t))
    }

    pub fn add(&self, other: &EllipticPoint, m: &ModularParam) -> Self {
        EllipticPoint::from_coords(self.s + other.s, self.t + other.t, m)
    }

    pub fn sub(&self, other: &EllipticPoint, m: &ModularParam) -> Self {
        EllipticPoint::from_coords(self.s - other.s, self.t - other.t, m)
    }

    pub fn is_identity(&self) -> bool {
        self.approx_eq(&EllipticPoint::identity())
    }
}

/// Canonical representative of `x` in `C/⟨1,τ⟩`.
pub fn reduce(x: Complex64, m: &ModularParam) -> EllipticPoint {
    let (s, t) = m.coords(x);
    EllipticPoint::from_coords(s, t, m)
}

/// A point of `E_τ` with exact rational lattice coordinates in `[0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatPoint {
    pub s: BigRational,
    pub t: BigRational,
}

impl RatPoint {
    pub fn new(s: BigRational, t: BigRational) -> Self {
        RatPoint {
            s: frac(&s),
            t: frac(&t),
        }
    }

    pub fn zero() -> Self {
        RatPoint {
            s: BigRational::zero(),
            t: BigRational::zero(),
        }
    }

    pub fn to_point(&self, m: &ModularParam) -> EllipticPoint {
        EllipticPoint::from_coords(rat_f64(&self.s), rat_f64(&self.t), m)
    }

    pub fn is_zero(&self) -> bool {
        self.s.is_zero() && self.t.is_zero()
    }
}

/// Best rational approximation of `x` within `tol` by continued fractions.
pub fn rationalize(x: f64, tol: f64) -> BigRational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = BigRational::new(h1.clone(), k1.clone());
        if (rat_f64(&approx) - x).abs() <= tol || r - a == 0.0 {
            return approx;
        }
        r = 1.0 / (r - a);
    }
    BigRational::new(h1, k1)
}

pub fn rat_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A point of `E_τ^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPointE {
    pub components: Vec<EllipticPoint>,
}

impl TorusPointE {
    pub fn identity(dim: usize) -> Self {
        TorusPointE {
            components: vec![EllipticPoint::identity(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn from_complex(xs: &[Complex64], m: &ModularParam) -> Self {
        TorusPointE {
            components: xs.iter().map(|&x| reduce(x, m)).collect(),
        }
    }

    pub fn approx_eq(&self, other: &TorusPointE) -> bool {
        self.dim() == other.dim()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.approx_eq(b))
    }

    pub fn distance(&self, other: &TorusPointE) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &TorusPointE, m: &ModularParam) -> Self {
        TorusPointE {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b, m))
                .collect(),
        }
    }

    pub fn sub(&self, other: &TorusPointE, m: &ModularParam) -> Self {
        TorusPointE {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b, m))
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.components.iter().all(EllipticPoint::is_identity)
    }
}

/// Applies an integer matrix to a point of `E_τ^{rows}`: output component
/// `j` is `Σ_i M_{ij} x_i`. With `M = ι` this is `φ∨_τ`; with `M = π` it is `ψ∨_τ`.
pub fn map_matrix(
    mat: &IntMatrix,
    p: &TorusPointE,
    m: &ModularParam,
) -> Result<TorusPointE, EllipticError> {
    if mat.rows() != p.dim() {
        return Err(EllipticError::DimensionMismatch {
            expected: mat.rows(),
            got: p.dim(),
        });
    }
    let components = (0..mat.cols())
        .map(|j| {
            let (mut s, mut t) = (0.0, 0.0);
            for (i, x) in p.components.iter().enumerate() {
                let c = mat[(i, j)].to_f64().unwrap_or(f64::NAN);
                s += c * x.s;
                t += c * x.t;
            }
            EllipticPoint::from_coords(s, t, m)
        })
        .collect();
    Ok(TorusPointE { components })
}

/// Result of [`kernel_preimage`].
#[derive(Debug, Clone, PartialEq)]
pub struct Preimage {
    pub point: TorusPointE,
    /// Number of solutions, `∏ d_j²` over the invariant factors of the map.
    pub torsion_count: BigInt,
}

/// Solves `ψ∨_τ(y) = p − a0` for `y ∈ E_τ^d`, where `ψ∨_τ` is
/// [`map_matrix`] with the `d × n` matrix `psi`.
///
/// Among the torsion translates the one with coordinates in `[0,1/d_j)²` (in
/// Smith coordinates) is returned.
pub fn kernel_preimage(
    psi: &IntMatrix,
    p: &TorusPointE,
    a0: &TorusPointE,
    m: &ModularParam,
) -> Result<Preimage, EllipticError> {
    let (d, n) = psi.shape();
    for q in [p, a0] {
        if q.dim() != n {
            return Err(EllipticError::DimensionMismatch {
                expected: n,
                got: q.dim(),
            });
        }
    }
    // Componentwise: Σ_j psi_{ji} y_j = b_i, i.e. A·y = b with A = psiᵀ.
    let a = psi.transpose();
    let s = smith_normal_form(&a);
    let factors = s.invariant_factors();
    if factors.len() < d {
        return Err(EllipticError::AmbiguousPreimage {
            rank: factors.len(),
            dim: d,
        });
    }
    let b = p.sub(a0, m);
    let mut coords = [vec![0.0; d], vec![0.0; d]];
    let mut residual: f64 = 0.0;
    for (part, out) in coords.iter_mut().enumerate() {
        let rhs: Vec<f64> = b
            .components
            .iter()
            .map(|x| if part == 0 { x.s } else { x.t })
            .collect();
        let c: Vec<f64> = (0..n)
            .map(|i| {
                s.u.row(i)
                    .iter()
                    .zip(&rhs)
                    .map(|(u, r)| u.to_f64().unwrap_or(f64::NAN) * r)
                    .sum()
            })
            .collect();
        for cj in &c[d..] {
            residual = residual.max(circle_dist(*cj, 0.0));
        }
        let z: Vec<f64> = (0..d)
            .map(|j| reduce_unit(c[j]) / factors[j].to_f64().unwrap_or(f64::NAN))
            .collect();
        for (i, o) in out.iter_mut().enumerate() {
            *o =
                s.v.row(i)
                    .iter()
                    .zip(&z)
                    .map(|(v, zj)| v.to_f64().unwrap_or(f64::NAN) * zj)
                    .sum();
        }
    }
    if residual > REDUCTION_TOL {
        return Err(EllipticError::NotInKernel { residual });
    }
    let point = TorusPointE {
        components: (0..d)
            .map(|j| EllipticPoint::from_coords(coords[0][j], coords[1][j], m))
            .collect(),
    };
    let torsion_count = factors.iter().fold(BigInt::one(), |acc, f| acc * f * f);
    Ok(Preimage {
        point,
        torsion_count,
    })
}

/// `θ(x) = (t^{1/2} − t^{-1/2}) ∏_{m=1}^{N} (1 − q^m t)(1 − q^m/t)` with
/// `t^{1/2} = e^{πix}`.
pub fn theta(x: Complex64, m: &ModularParam, n: u32) -> Complex64 {
    theta_checked(x, m, n).0
}

/// [`theta`] together with a flag set when `|q|^N` exceeds [`TRUNCATION_TOL`].
pub fn theta_checked(x: Complex64, m: &ModularParam, n: u32) -> (Complex64, bool) {
    let n = n.max(1);
    let half = (PI * I * x).exp();
    let t = half * half;
    let tinv = 1.0 / t;
    let mut acc = half - 1.0 / half;
    let mut qm = Complex64::one();
    for _ in 0..n {
        qm *= m.q;
        acc *= (1.0 - qm * t) * (1.0 - qm * tinv);
    }
    (acc, m.q.norm().powi(n as i32) > TRUNCATION_TOL)
}

/// `θ(x)` and `θ'(x)` by the product rule, exact at the zeros of `θ`.
pub fn theta_with_derivative(x: Complex64, m: &ModularParam, n: u32) -> (Complex64, Complex64) {
    let half = (PI * I * x).exp();
    let t = half * half;
    let tinv = 1.0 / t;
    let two_pi_i = 2.0 * PI * I;
    let mut factors = Vec::with_capacity(2 * n as usize + 1);
    let mut derivs = Vec::with_capacity(2 * n as usize + 1);
    factors.push(half - 1.0 / half);
    derivs.push(PI * I * (half + 1.0 / half));
    let mut qm = Complex64::one();
    for _ in 0..n.max(1) {
        qm *= m.q;
        factors.push(1.0 - qm * t);
        derivs.push(-two_pi_i * qm * t);
        factors.push(1.0 - qm * tinv);
        derivs.push(two_pi_i * qm * tinv);
    }
    let len = factors.len();
    let mut prefix = vec![Complex64::one(); len + 1];
    for k in 0..len {
        prefix[k + 1] = prefix[k] * factors[k];
    }
    let mut suffix = Complex64::one();
    let mut deriv = Complex64::zero();
    for k in (0..len).rev() {
        deriv += derivs[k] * prefix[k] * suffix;
        suffix *= factors[k];
    }
    (prefix[len], deriv)
}

/// `θ(x + a + bτ) = (−1)^{a+b} q^{−b²/2} t^{−b} θ(x)`, `t = e^{2πix}`,
/// `q^{1/2} = e^{πiτ}`.
pub fn quasi_period_factor(a: i64, b: i64, x: Complex64, m: &ModularParam) -> Complex64 {
    let sign = if (a + b).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let bf = b as f64;
    sign * (-PI * I * m.tau * bf * bf - 2.0 * PI * I * x * bf).exp()
}

/// An automorphy factor of the form `(H, χ)` with
/// `H(x,y) = k x ȳ / Im τ` and `χ(γ) = (−1)^{k·a·b} exp(2πi E(x0, γ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutomorphyData {
    pub degree: i64,
    pub x0: Complex64,
}

impl AutomorphyData {
    /// The factor of the bundle whose section is [`theta`]: degree 1 with
    /// `x0 = (1+τ)/2`.
    pub fn theta_bundle(m: &ModularParam) -> Self {
        AutomorphyData {
            degree: 1,
            x0: (1.0 + m.tau) / 2.0,
        }
    }

    pub fn hermitian(&self, x: Complex64, y: Complex64, m: &ModularParam) -> Complex64 {
        self.degree as f64 * x * y.conj() / m.tau.im
    }

    /// `E = Im H`; integral on the lattice, `E(a+bτ, a'+b'τ) = k(b a' − a b')`.
    pub fn alternating(&self, x: Complex64, y: Complex64, m: &ModularParam) -> f64 {
        self.hermitian(x, y, m).im
    }

    pub fn chi(&self, a: i64, b: i64, m: &ModularParam) -> Complex64 {
        let g = m.from_coords(a as f64, b as f64);
        let sign = if (self.degree * a * b).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        sign * (2.0 * PI * I * self.alternating(self.x0, g, m)).exp()
    }

    /// `e(γ, x) = χ(γ) exp(π H(x,γ) + (π/2) H(γ,γ))`.
    pub fn eval(&self, a: i64, b: i64, x: Complex64, m: &ModularParam) -> Complex64 {
        let g = m.from_coords(a as f64, b as f64);
        self.chi(a, b, m)
            * (PI * self.hermitian(x, g, m) + PI / 2.0 * self.hermitian(g, g, m)).exp()
    }

    /// `|χ(γ+γ') − χ(γ)χ(γ') e^{iπE(γ,γ')}|`.
    pub fn character_residual(&self, g1: (i64, i64), g2: (i64, i64), m: &ModularParam) -> f64 {
        let lhs = self.chi(g1.0 + g2.0, g1.1 + g2.1, m);
        let e = self.degree * (g1.1 * g2.0 - g1.0 * g2.1);
        let rhs = self.chi(g1.0, g1.1, m) * self.chi(g2.0, g2.1, m) * (PI * I * e as f64).exp();
        (lhs - rhs).norm()
    }

    /// `|e(γ+γ', x) − e(γ, x+γ') e(γ', x)|`, relative to the size of the left side.
    pub fn cocycle_residual(
        &self,
        g1: (i64, i64),
        g2: (i64, i64),
        x: Complex64,
        m: &ModularParam,
    ) -> f64 {
        let lhs = self.eval(g1.0 + g2.0, g1.1 + g2.1, x, m);
        let shifted = x + m.from_coords(g2.0 as f64, g2.1 as f64);
        let rhs = self.eval(g1.0, g1.1, shifted, m) * self.eval(g2.0, g2.1, x, m);
        (lhs - rhs).norm() / lhs.norm().max(1.0)
    }
}

/// `exp(π k x² / (2 Im τ))`, the coboundary relating [`AutomorphyData::eval`]
/// for [`AutomorphyData::theta_bundle`] to [`quasi_period_factor`]:
/// `e(γ,x) = quasi_period_factor(γ,x) · g(x+γ)/g(x)`.
pub fn theta_coboundary(k: i64, x: Complex64, m: &ModularParam) -> Complex64 {
    (PI * k as f64 * x * x / (2.0 * m.tau.im)).exp()
}

/// Dimension of the space of sections of a degree `k` line bundle on `E_τ`.
pub fn section_dim(degree: i64) -> u64 {
    match degree {
        d if d < 0 => 0,
        0 => 1,
        d => d as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tau() -> ModularParam {
        ModularParam::new(Complex64::new(0.3, 1.1)).unwrap()
    }

    fn random_x(rng: &mut ChaCha8Rng, m: &ModularParam) -> Complex64 {
        m.from_coords(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(ModularParam::new(Complex64::new(0.0, -1.0)).is_err());
        assert!(ModularParam::new(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn reduce_examples() {
        let m = tau();
        let p = reduce(Complex64::zero(), &m);
        assert_eq!((p.s, p.t), (0.0, 0.0));
        let p = reduce(1.0 + m.tau(), &m);
        assert!(p.approx_eq(&EllipticPoint::identity()));
        let p = reduce(2.5 + 0.75 * m.tau(), &m);
        assert!((p.s - 0.5).abs() < 1e-12 && (p.t - 0.75).abs() < 1e-12);
        let again = reduce(p.rep, &m);
        assert!(again.approx_eq(&p));
    }

    #[test]
    fn theta_zero_and_oddness() {
        let m = tau();
        assert_eq!(theta(Complex64::zero(), &m, 40), Complex64::zero());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = random_x(&mut rng, &m);
            assert!((theta(-x, &m, 40) + theta(x, &m, 40)).norm() < 1e-10);
        }
    }

    #[test]
    fn theta_antiperiodic_in_one() {
        // t^{1/2} = e^{πix} changes sign under x ↦ x+1.
        let m = tau();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let x = random_x(&mut rng, &m);
            assert!((theta(x + 1.0, &m, 40) + theta(x, &m, 40)).norm() < 1e-12);
        }
        assert_eq!(
            quasi_period_factor(1, 0, Complex64::new(0.2, 0.1), &m),
            Complex64::new(-1.0, 0.0)
        );
    }

    #[test]
    fn quasi_period_factor_b_one() {
        let m = tau();
        let x = Complex64::new(0.17, 0.05);
        let t = (2.0 * PI * I * x).exp();
        let q_half = (PI * I * m.tau()).exp();
        let expected = -1.0 / (q_half * t);
        assert!((quasi_period_factor(0, 1, x, &m) - expected).norm() < 1e-12);
    }

    #[test]
    fn quasi_periodicity() {
        let m = tau();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut worst: f64 = 0.0;
        for a in -3..=3 {
            for b in -3..=3 {
                for _ in 0..100 {
                    let x = random_x(&mut rng, &m);
                    let f = quasi_period_factor(a, b, x, &m);
                    let lhs = theta(x + m.from_coords(a as f64, b as f64), &m, 40);
                    let r = (lhs - f * theta(x, &m, 40)).norm() / f.norm().max(1.0);
                    worst = worst.max(r);
                }
            }
        }
        assert!(worst < 1e-9, "worst residual {worst:e}");
    }

    #[test]
    fn truncation_convergence_and_flag() {
        let m = tau();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let x = m.from_coords(rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0));
            assert!((theta(x, &m, 40) - theta(x, &m, 80)).norm() < 1e-12);
        }
        assert!(!theta_checked(Complex64::new(0.1, 0.0), &m, 40).1);
        let low = ModularParam::new(Complex64::new(0.0, 0.05)).unwrap();
        assert!(theta_checked(Complex64::new(0.1, 0.0), &low, 40).1);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let m = tau();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x = random_x(&mut rng, &m);
            let (v, d) = theta_with_derivative(x, &m, 40);
            assert!((v - theta(x, &m, 40)).norm() < 1e-12 * v.norm().max(1.0));
            let h = 1e-5;
            let fd = (theta(x + h, &m, 40) - theta(x - h, &m, 40)) / (2.0 * h);
            assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0));
        }
        let (_, d0) = theta_with_derivative(Complex64::zero(), &m, 40);
        assert!(d0.norm() > 1.0);
    }

    #[test]
    fn automorphy_identity_and_cocycle() {
        let m = tau();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for k in [1, 2, 3] {
            let ad = AutomorphyData {
                degree: k,
                x0: Complex64::new(0.21, 0.4),
            };
            let x = random_x(&mut rng, &m);
            assert!((ad.eval(0, 0, x, &m) - 1.0).norm() < 1e-12);
            for g1 in [(1, 0), (0, 1), (1, 1), (-1, 2)] {
                for g2 in [(1, 0), (0, 1), (2, -1)] {
                    assert!(ad.character_residual(g1, g2, &m) < 1e-9);
                    assert!(
                        ad.cocycle_residual(g1, g2, x, &m) < 1e-9,
                        "k={k} {g1:?} {g2:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn automorphy_matches_theta_bundle_up_to_coboundary() {
        let m = tau();
        let ad = AutomorphyData::theta_bundle(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let (a, b) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
            let x = random_x(&mut rng, &m);
            let g = m.from_coords(a as f64, b as f64);
            let expected = quasi_period_factor(a, b, x, &m) * theta_coboundary(1, x + g, &m)
                / theta_coboundary(1, x, &m);
            let got = ad.eval(a, b, x, &m);
            assert!(
                (got - expected).norm() < 1e-9 * expected.norm().max(1.0),
                "{a},{b}"
            );
        }
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        for (n, d) in [(1, 3), (-7, 5), (0, 1), (22, 7), (3, 1000)] {
            let x = n as f64 / d as f64;
            assert_eq!(rationalize(x, 1e-12), BigRational::new(n.into(), d.into()));
        }
        let pi = rationalize(PI, 1e-9);
        assert!((rat_f64(&pi) - PI).abs() <= 1e-9);
    }

    #[test]
    fn section_dims() {
        assert_eq!(section_dim(-1), 0);
        assert_eq!(section_dim(0), 1);
        assert_eq!(section_dim(3), 3);
    }

    #[test]
    fn map_matrix_examples() {
        let m = tau();
        let phi = IntMatrix::from_rows_i64(&[vec![1], vec![1]], 1);
        let x1 = m.from_coords(0.2, 0.3);
        let x2 = m.from_coords(0.5, 0.9);
        let out = map_matrix(&phi, &TorusPointE::from_complex(&[x1, x2], &m), &m).unwrap();
        assert!(out.components[0].approx_eq(&reduce(x1 + x2, &m)));
        let zero = IntMatrix::zeros(2, 3);
        let out = map_matrix(&zero, &TorusPointE::from_complex(&[x1, x2], &m), &m).unwrap();
        assert!(out.approx_eq(&TorusPointE::identity(3)));
        assert!(matches!(
            map_matrix(&phi, &TorusPointE::identity(3), &m),
            Err(EllipticError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn map_matrix_exactness() {
        use crate::lattice::{ExactSequenceData, VectorConfig};
        let m = tau();
        let cfg =
            VectorConfig::from_i64(2, &[vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]]).unwrap();
        let e = ExactSequenceData::new(&cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let y =
                TorusPointE::from_complex(&[random_x(&mut rng, &m), random_x(&mut rng, &m)], &m);
            let up = map_matrix(&e.pi, &y, &m).unwrap();
            let down = map_matrix(&e.iota, &up, &m).unwrap();
            assert!(down.is_identity());
        }
    }

    #[test]
    fn kernel_preimage_examples() {
        let m = tau();
        let psi = IntMatrix::from_rows_i64(&[vec![1, 1]], 2);
        let x = m.from_coords(0.3, 0.6);
        let p = TorusPointE::from_complex(&[x, x], &m);
        let pre = kernel_preimage(&psi, &p, &TorusPointE::identity(2), &m).unwrap();
        assert!(pre.point.components[0].approx_eq(&reduce(x, &m)));
        assert_eq!(pre.torsion_count, BigInt::one());

        let p = TorusPointE::from_complex(&[x, x + 0.3], &m);
        assert!(matches!(
            kernel_preimage(&psi, &p, &TorusPointE::identity(2), &m),
            Err(EllipticError::NotInKernel { .. })
        ));

        let flat = IntMatrix::from_rows_i64(&[vec![1, 1], vec![1, 1]], 2);
        assert!(matches!(
            kernel_preimage(&flat, &p, &TorusPointE::identity(2), &m),
            Err(EllipticError::AmbiguousPreimage { .. })
        ));
    }

    #[test]
    fn kernel_preimage_torsion() {
        // y ↦ 2y has four preimages; all of them map back.
        let m = tau();
        let psi = IntMatrix::from_rows_i64(&[vec![2]], 1);
        let p = TorusPointE::from_complex(&[m.from_coords(0.4, 0.2)], &m);
        let pre = kernel_preimage(&psi, &p, &TorusPointE::identity(1), &m).unwrap();
        assert_eq!(pre.torsion_count, BigInt::from(4));
        let c = pre.point.components[0];
        assert!(c.s < 0.5 && c.t < 0.5);
        assert!(map_matrix(&psi, &pre.point, &m).unwrap().approx_eq(&p));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coords() -> impl Strategy<Value = (f64, f64)> {
            (0.0f64..1.0, 0.0f64..1.0)
        }

        proptest! {
            #[test]
            fn reduce_idempotent(s in -5.0f64..5.0, t in -5.0f64..5.0) {
                let m = tau();
                let p = reduce(m.from_coords(s, t), &m);
                prop_assert!(p.s >= 0.0 && p.s < 1.0 && p.t >= 0.0 && p.t < 1.0);
                prop_assert!(reduce(p.rep, &m).approx_eq(&p));
            }

            #[test]
            fn map_matrix_homomorphism(
                entries in proptest::collection::vec(-3i64..=3, 6),
                a in proptest::collection::vec(coords(), 3),
                b in proptest::collection::vec(coords(), 3),
            ) {
                let m = tau();
                let mat = IntMatrix::from_rows_i64(&entries.chunks(2).map(<[i64]>::to_vec).collect::<Vec<_>>(), 2);
                let pa = TorusPointE { components: a.iter().map(|&(s, t)| EllipticPoint::from_coords(s, t, &m)).collect() };
                let pb = TorusPointE { components: b.iter().map(|&(s, t)| EllipticPoint::from_coords(s, t, &m)).collect() };
                let lhs = map_matrix(&mat, &pa.add(&pb, &m), &m).unwrap();
                let rhs = map_matrix(&mat, &pa, &m).unwrap().add(&map_matrix(&mat, &pb, &m).unwrap(), &m);
                prop_assert!(lhs.approx_eq(&rhs));
            }

            #[test]
            fn preimage_round_trip(y in proptest::collection::vec(coords(), 2)) {
                let m = tau();
                let psi = IntMatrix::from_rows_i64(&[vec![1, 0, 1, 1], vec![0, 1, 1, -1]], 4);
                let yp = TorusPointE { components: y.iter().map(|&(s, t)| EllipticPoint::from_coords(s, t, &m)).collect() };
                let p = map_matrix(&psi, &yp, &m).unwrap();
                let back = kernel_preimage(&psi, &p, &TorusPointE::identity(4), &m).unwrap();
                prop_assert!(back.point.approx_eq(&yp));
            }
        }
    }
}
