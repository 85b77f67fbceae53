//! The λ-graded coordinate rings `⊕_λ C r^λ` in three flavors, multiplied by
//! the δ-rule `r^λ r^μ = r^{λ+μ} ∏ c_i^{δ(λ_i, μ_i)}`.
//!
//! Indices `λ` are stored in ambient coordinates `λ_i = ⟨λ, e_i⟩` and must lie
//! in the row lattice of the configuration matrix. Coefficients are sparse
//! polynomials: in `y_1..y_d` (additive), Laurent in `s_1..s_d`
//! (multiplicative), or in the formal symbols `ϑ̄_1..ϑ̄_n` (elliptic).

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use thiserror::Error;

use crate::elliptic::{theta, ModularParam, DEFAULT_TRUNCATION};
use crate::ideal::ThetaMonomialIdeal;
use crate::lattice::{
    circuit_splitting, circuits, is_unimodular, row_lattice_basis, solve_rational, Circuit,
    LatticeError, VectorConfig,
};
use crate::matrix::IntMatrix;
use crate::poly::SparsePoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("cannot combine {0:?} and {1:?} elements")]
    FlavorMismatch(Flavor, Flavor),
    #[error("elements belong to rings of different configurations")]
    ConfigMismatch,
    #[error("index {0:?} is not in the character lattice")]
    NotInLattice(Vec<i64>),
    #[error("coefficient has {got} variables, ring expects {expected}")]
    CoefficientArity { expected: usize, got: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Additive,
    Multiplicative,
    Elliptic,
}

impl Flavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flavor::Additive => "additive",
            Flavor::Multiplicative => "multiplicative",
            Flavor::Elliptic => "elliptic",
        }
    }
}

/// `δ(ℓ, m) = min(|ℓ|, |m|)` when `ℓ` and `m` have strictly opposite signs, else 0.
pub fn delta(l: i64, m: i64) -> u32 {
    if (l > 0 && m < 0) || (l < 0 && m > 0) {
        l.unsigned_abs().min(m.unsigned_abs()) as u32
    } else {
        0
    }
}

/// An element `Σ_λ f_λ r^λ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymbolElement {
    flavor: Flavor,
    ring_id: u64,
    terms: BTreeMap<Vec<i64>, SparsePoly>,
}

impl SymbolElement {
    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &SparsePoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, lambda: &[i64]) -> Option<&SparsePoly> {
        self.terms.get(lambda)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, lambda: Vec<i64>, f: SparsePoly) {
        if f.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(lambda) {
            Entry::Vacant(v) => {
                v.insert(f);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &f;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }
}

impl fmt::Debug for SymbolElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{{", self.flavor)?;
        for (i, (l, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?}) r^{l:?}")?;
        }
        write!(f, "}}")
    }
}

/// A coordinate ring of one flavor for a fixed configuration `u`.
#[derive(Debug, Clone)]
pub struct BranchRing {
    flavor: Flavor,
    config: VectorConfig,
    u: Vec<Vec<i64>>,
    /// Rows form the Hermite basis of the index lattice.
    basis: IntMatrix,
    central: Vec<SparsePoly>,
    id: u64,
}

/// A point at which elements of a ring can be evaluated numerically: values of
/// the coefficient variables and of `z_i, w_i` with `z_i w_i = c_i`.
#[derive(Debug, Clone)]
pub struct EvalPoint {
    pub coeff_values: Vec<Complex64>,
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
}

impl BranchRing {
    pub fn new(flavor: Flavor, config: &VectorConfig) -> Self {
        let u = config.to_i64().expect("configuration entries exceed i64");
        let (n, d) = (config.n(), config.d());
        let central = (0..n)
            .map(|i| match flavor {
                Flavor::Additive => (0..d).fold(SparsePoly::zero(d), |acc, j| {
                    &acc + &SparsePoly::var(d, j).scale(&BigInt::from(u[i][j]))
                }),
                Flavor::Multiplicative => {
                    &SparsePoly::one(d) - &SparsePoly::monomial(u[i].clone(), BigInt::one())
                }
                Flavor::Elliptic => SparsePoly::var(n, i),
            })
            .collect();
        let mut h = DefaultHasher::new();
        config.hash(&mut h);
        BranchRing {
            flavor,
            config: config.clone(),
            u,
            basis: row_lattice_basis(config),
            central,
            id: h.finish(),
        }
    }

    pub fn additive(config: &VectorConfig) -> Self {
        Self::new(Flavor::Additive, config)
    }

    pub fn multiplicative(config: &VectorConfig) -> Self {
        Self::new(Flavor::Multiplicative, config)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn config(&self) -> &VectorConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.n()
    }

    /// Number of coefficient variables.
    pub fn coeff_vars(&self) -> usize {
        match self.flavor {
            Flavor::Additive | Flavor::Multiplicative => self.config.d(),
            Flavor::Elliptic => self.config.n(),
        }
    }

    pub fn coeff_names(&self) -> Vec<String> {
        let k = self.coeff_vars();
        match self.flavor {
            Flavor::Additive => (1..=k).map(|i| format!("y{i}")).collect(),
            Flavor::Multiplicative => (1..=k).map(|i| format!("s{i}")).collect(),
            Flavor::Elliptic => (1..=k).map(|i| format!("ϑ̄{i}")).collect(),
        }
    }

    /// The element `c_i` that `z_i w_i` reduces to.
    pub fn central_element(&self, i: usize) -> &SparsePoly {
        &self.central[i]
    }

    /// Rows: a basis of the index lattice in ambient coordinates.
    pub fn lattice_basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// Coordinates of `λ` in the lattice basis, or `None` if `λ` is not in the lattice.
    pub fn basis_coordinates(&self, lambda: &[i64]) -> Option<Vec<i64>> {
        if lambda.len() != self.n() {
            return None;
        }
        let rhs: Vec<BigRational> = lambda
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect();
        let c = solve_rational(&self.basis.transpose(), &rhs)?;
        c.iter()
            .map(|x| {
                if x.is_integer() {
                    x.to_integer().to_i64()
                } else {
                    None
                }
            })
            .collect()
    }

    /// Ambient coordinates of `Σ_j c_j b_j`.
    pub fn from_basis_coordinates(&self, c: &[i64]) -> Vec<i64> {
        assert_eq!(c.len(), self.rank());
        (0..self.n())
            .map(|i| {
                c.iter()
                    .enumerate()
                    .map(|(j, &cj)| {
                        cj * self.basis[(j, i)]
                            .to_i64()
                            .expect("basis entry exceeds i64")
                    })
                    .sum()
            })
            .collect()
    }

    fn empty(&self) -> SymbolElement {
        SymbolElement {
            flavor: self.flavor,
            ring_id: self.id,
            terms: BTreeMap::new(),
        }
    }

    pub fn zero(&self) -> SymbolElement {
        self.empty()
    }

    /// `r^0`.
    pub fn unit(&self) -> SymbolElement {
        let mut e = self.empty();
        e.insert(vec![0; self.n()], SparsePoly::one(self.coeff_vars()));
        e
    }

    /// `r^λ` for ambient `λ`.
    pub fn r(&self, lambda: &[i64]) -> Result<SymbolElement, RingError> {
        self.term(lambda, SparsePoly::one(self.coeff_vars()))
    }

    /// `f · r^λ`.
    pub fn term(&self, lambda: &[i64], f: SparsePoly) -> Result<SymbolElement, RingError> {
        if self.basis_coordinates(lambda).is_none() {
            return Err(RingError::NotInLattice(lambda.to_vec()));
        }
        if f.nvars() != self.coeff_vars() {
            return Err(RingError::CoefficientArity {
                expected: self.coeff_vars(),
                got: f.nvars(),
            });
        }
        let mut e = self.empty();
        e.insert(lambda.to_vec(), f);
        Ok(e)
    }

    /// `f · r^0`.
    pub fn scalar(&self, f: SparsePoly) -> Result<SymbolElement, RingError> {
        self.term(&vec![0; self.n()], f)
    }

    fn check(&self, a: &SymbolElement) -> Result<(), RingError> {
        if a.flavor != self.flavor {
            return Err(RingError::FlavorMismatch(self.flavor, a.flavor));
        }
        if a.ring_id != self.id {
            return Err(RingError::ConfigMismatch);
        }
        Ok(())
    }

    pub fn add(&self, a: &SymbolElement, b: &SymbolElement) -> Result<SymbolElement, RingError> {
        self.check(a)?;
        self.check(b)?;
        let mut out = a.clone();
        for (l, f) in &b.terms {
            out.insert(l.clone(), f.clone());
        }
        Ok(out)
    }

    /// The product by the δ-rule.
    pub fn mul(&self, a: &SymbolElement, b: &SymbolElement) -> Result<SymbolElement, RingError> {
        self.check(a)?;
        self.check(b)?;
        let mut out = self.empty();
        for (l, f) in &a.terms {
            for (m, g) in &b.terms {
                let mut c = f * g;
                for i in 0..self.n() {
                    let k = delta(l[i], m[i]);
                    if k > 0 {
                        c = &c * &self.central[i].pow(k);
                    }
                }
                let sum: Vec<i64> = l.iter().zip(m).map(|(x, y)| x + y).collect();
                out.insert(sum, c);
            }
        }
        Ok(out)
    }

    /// `r^λ` over the default generating set `±b_j` (basis vectors of the index
    /// lattice and their negatives), or over all nonzero basis combinations with
    /// coefficients in `[−D, D]` when a bound is given. No minimality is claimed.
    pub fn generators(&self, bound: Option<u32>) -> Vec<SymbolElement> {
        let rank = self.rank();
        let coords: Vec<Vec<i64>> = match bound {
            None => (0..rank)
                .flat_map(|j| {
                    [1, -1]
                        .into_iter()
                        .map(move |s| (0..rank).map(|i| if i == j { s } else { 0 }).collect())
                })
                .collect(),
            Some(d) => {
                let d = i64::from(d);
                let mut out = Vec::new();
                let mut c = vec![-d; rank];
                if rank > 0 && d > 0 {
                    loop {
                        if c.iter().any(|&x| x != 0) {
                            out.push(c.clone());
                        }
                        let Some(p) = (0..rank).find(|&i| c[i] < d) else {
                            break;
                        };
                        c[p] += 1;
                        for x in &mut c[..p] {
                            *x = -d;
                        }
                    }
                }
                out
            }
        };
        coords
            .into_iter()
            .map(|c| {
                self.r(&self.from_basis_coordinates(&c))
                    .expect("basis combination lies in the lattice")
            })
            .collect()
    }

    /// The `Z^n` degree of a term `ϑ̄^m r^λ` in the elliptic flavor: `deg w_i = e_i`,
    /// `deg ϑ̄_i = e_i`, `deg z_i = 0`.
    pub fn term_degree(lambda: &[i64], theta_exponents: &[i64]) -> Vec<i64> {
        lambda
            .iter()
            .zip(theta_exponents)
            .map(|(&l, &m)| (-l).max(0) + m)
            .collect()
    }

    /// A random point of `{z_i w_i = c_i}` over a random coefficient point.
    pub fn sample_eval_point<R: Rng>(&self, rng: &mut R, m: &ModularParam) -> EvalPoint {
        let d = self.config.d();
        let n = self.n();
        let unit_disk =
            |rng: &mut R| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (coeff_values, c): (Vec<Complex64>, Vec<Complex64>) = match self.flavor {
            Flavor::Additive => {
                let y: Vec<Complex64> = (0..d).map(|_| unit_disk(rng)).collect();
                let c = self.central.iter().map(|p| p.eval(&y)).collect();
                (y, c)
            }
            Flavor::Multiplicative => {
                let s: Vec<Complex64> = (0..d)
                    .map(|_| {
                        Complex64::from_polar(
                            rng.gen_range(0.7..1.4),
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        )
                    })
                    .collect();
                let c = self.central.iter().map(|p| p.eval(&s)).collect();
                (s, c)
            }
            Flavor::Elliptic => {
                let y: Vec<Complex64> = (0..d)
                    .map(|_| m.from_coords(rng.gen_range(0.0..1.0), rng.gen_range(-0.5..0.5)))
                    .collect();
                let th: Vec<Complex64> = self
                    .u
                    .iter()
                    .map(|ui| {
                        let x: Complex64 = ui.iter().zip(&y).map(|(&a, yj)| a as f64 * yj).sum();
                        theta(x, m, DEFAULT_TRUNCATION)
                    })
                    .collect();
                (th.clone(), th)
            }
        };
        let z: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::from_polar(
                    rng.gen_range(0.5..2.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let w = c.iter().zip(&z).map(|(ci, zi)| ci / zi).collect();
        EvalPoint { coeff_values, z, w }
    }

    /// `Σ f_λ(point) · ∏ z_i^{max(λ_i,0)} w_i^{max(−λ_i,0)}`.
    pub fn eval(&self, a: &SymbolElement, p: &EvalPoint) -> Complex64 {
        a.terms
            .iter()
            .map(|(l, f)| {
                let mono: Complex64 = l
                    .iter()
                    .enumerate()
                    .map(|(i, &li)| {
                        if li >= 0 {
                            p.z[i].powi(li as i32)
                        } else {
                            p.w[i].powi((-li) as i32)
                        }
                    })
                    .product();
                f.eval(&p.coeff_values) * mono
            })
            .sum()
    }

    pub fn render(&self, a: &SymbolElement) -> String {
        if a.terms.is_empty() {
            return "0".to_string();
        }
        let names = self.coeff_names();
        let parts: Vec<String> = a
            .terms
            .iter()
            .map(|(l, f)| {
                let idx: Vec<String> = l.iter().map(ToString::to_string).collect();
                let r = format!("r^({})", idx.join(","));
                if f.is_one() {
                    r
                } else {
                    format!("({})*{r}", f.render(&names))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// The elliptic-flavor ring of `u`.
pub fn elliptic_coordinate_ring(u: &VectorConfig) -> BranchRing {
    BranchRing::new(Flavor::Elliptic, u)
}

/// `C[ħ, x_1..x_n] / (∏_{S⁺} x_i ∏_{S⁻} (ħ − x_i) | S circuit)`.
#[derive(Debug, Clone)]
pub struct HbkPresentation {
    pub n: usize,
    pub unimodular: bool,
    /// Split circuits, in canonical order.
    pub circuits: Vec<Circuit>,
    /// One generator per circuit; variable 0 is `ħ`, variable `i+1` is `x_{i+1}`.
    pub generators: Vec<SparsePoly>,
}

impl HbkPresentation {
    pub fn variable_names(&self) -> Vec<String> {
        std::iter::once("hbar".to_string())
            .chain((1..=self.n).map(|i| format!("x{i}")))
            .collect()
    }

    /// Factored form, e.g. `x1*(hbar - x2)`.
    pub fn render_generator(&self, j: usize) -> String {
        let s = self.circuits[j].splitting.as_ref().expect("split circuit");
        let mut parts: Vec<String> = s.plus.iter().map(|i| format!("x{}", i + 1)).collect();
        parts.extend(s.minus.iter().map(|i| format!("(hbar - x{})", i + 1)));
        parts.join("*")
    }
}

fn split_circuits(v: &VectorConfig, alpha_hat: &[BigRational]) -> Result<Vec<Circuit>, RingError> {
    Ok(circuits(v)
        .iter()
        .map(|c| circuit_splitting(c, alpha_hat))
        .collect::<Result<_, _>>()?)
}

/// The equivariant cohomology presentation. Unimodularity is reported, not enforced.
pub fn presentation_hbk(
    v: &VectorConfig,
    alpha_hat: &[BigRational],
) -> Result<HbkPresentation, RingError> {
    let n = v.n();
    let circuits = split_circuits(v, alpha_hat)?;
    let hbar = SparsePoly::var(n + 1, 0);
    let generators = circuits
        .iter()
        .map(|c| {
            let s = c.splitting.as_ref().expect("split circuit");
            let mut g = SparsePoly::one(n + 1);
            for &i in &s.plus {
                g = &g * &SparsePoly::var(n + 1, i + 1);
            }
            for &i in &s.minus {
                g = &g * &(&hbar - &SparsePoly::var(n + 1, i + 1));
            }
            g
        })
        .collect();
    Ok(HbkPresentation {
        n,
        unimodular: is_unimodular(v),
        circuits,
        generators,
    })
}

/// The theta-monomial ideal `(ϑ_S | S circuit)` in `ϑ(x_i)`, `ϑ(ħ − x_i)`.
#[derive(Debug, Clone)]
pub struct EllPresentation {
    pub unimodular: bool,
    pub circuits: Vec<Circuit>,
    /// `ϑ_S` per circuit, as exponent vectors of length `2n`.
    pub circuit_generators: Vec<Vec<u32>>,
    /// Support degree in `Z^{n+1}` per circuit generator: `ϑ(x_i) ↦ e_i`,
    /// `ϑ(ħ − x_i) ↦ e_0 + e_i`.
    pub degrees: Vec<Vec<u32>>,
    pub ideal: ThetaMonomialIdeal,
}

pub fn ell_presentation(
    v: &VectorConfig,
    alpha_hat: &[BigRational],
) -> Result<EllPresentation, RingError> {
    let n = v.n();
    let circuits = split_circuits(v, alpha_hat)?;
    let mut circuit_generators = Vec::with_capacity(circuits.len());
    let mut degrees = Vec::with_capacity(circuits.len());
    for c in &circuits {
        let s = c.splitting.as_ref().expect("split circuit");
        let mut g = vec![0u32; 2 * n];
        let mut deg = vec![0u32; n + 1];
        for &i in &s.plus {
            g[i] += 1;
            deg[i + 1] += 1;
        }
        for &i in &s.minus {
            g[n + i] += 1;
            deg[0] += 1;
            deg[i + 1] += 1;
        }
        circuit_generators.push(g);
        degrees.push(deg);
    }
    let ideal = ThetaMonomialIdeal::new(n, true, circuit_generators.iter().cloned());
    Ok(EllPresentation {
        unimodular: is_unimodular(v),
        circuits,
        circuit_generators,
        degrees,
        ideal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::default_alpha_hat;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(d: usize, v: &[&[i64]]) -> VectorConfig {
        VectorConfig::from_i64(d, &v.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn tau() -> ModularParam {
        ModularParam::new(Complex64::new(0.3, 1.1)).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(2, -3), 2);
        assert_eq!(delta(1, 1), 0);
        assert_eq!(delta(0, -5), 0);
        assert_eq!(delta(-4, 1), 1);
    }

    #[test]
    fn delta_cocycle() {
        for l in -6..=6 {
            for m in -6..=6 {
                for p in -6..=6 {
                    assert_eq!(
                        delta(l, m) + delta(l + m, p),
                        delta(m, p) + delta(l, m + p),
                        "{l} {m} {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn a1_relations_in_all_flavors() {
        let u = cfg(1, &[&[1], &[1]]);
        let add = BranchRing::additive(&u);
        let p = add
            .mul(&add.r(&[1, 1]).unwrap(), &add.r(&[-1, -1]).unwrap())
            .unwrap();
        let y = SparsePoly::var(1, 0);
        assert_eq!(p, add.scalar(y.pow(2)).unwrap());

        let mult = BranchRing::multiplicative(&u);
        let p = mult
            .mul(&mult.r(&[1, 1]).unwrap(), &mult.r(&[-1, -1]).unwrap())
            .unwrap();
        let one_minus_s = &SparsePoly::one(1) - &SparsePoly::var(1, 0);
        assert_eq!(p, mult.scalar(one_minus_s.pow(2)).unwrap());

        let ell = elliptic_coordinate_ring(&u);
        let p = ell
            .mul(&ell.r(&[1, 1]).unwrap(), &ell.r(&[-1, -1]).unwrap())
            .unwrap();
        let th12 = &SparsePoly::var(2, 0) * &SparsePoly::var(2, 1);
        assert_eq!(p, ell.scalar(th12).unwrap());
        assert_eq!(ell.render(&p), "(ϑ̄1*ϑ̄2)*r^(0,0)");
    }

    #[test]
    fn a1_elliptic_relation_numerically() {
        // ϑ̄_1 ϑ̄_2 evaluated at y is θ(y)² under ψ = (1,1)ᵀ.
        let m = tau();
        let u = cfg(1, &[&[1], &[1]]);
        let ell = elliptic_coordinate_ring(&u);
        let lhs = ell
            .mul(&ell.r(&[1, 1]).unwrap(), &ell.r(&[-1, -1]).unwrap())
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let y = m.from_coords(rng.gen_range(0.0..1.0), rng.gen_range(-0.5..0.5));
            let th = theta(y, &m, DEFAULT_TRUNCATION);
            let z = vec![Complex64::new(1.3, 0.2), Complex64::new(-0.4, 0.9)];
            let w: Vec<Complex64> = z.iter().map(|zi| th / zi).collect();
            let p = EvalPoint {
                coeff_values: vec![th, th],
                z,
                w,
            };
            let direct =
                ell.eval(&ell.r(&[1, 1]).unwrap(), &p) * ell.eval(&ell.r(&[-1, -1]).unwrap(), &p);
            assert!((ell.eval(&lhs, &p) - th * th).norm() < 1e-9 * th.norm_sqr().max(1.0));
            assert!((direct - th * th).norm() < 1e-9 * th.norm_sqr().max(1.0));
        }
    }

    #[test]
    fn standard_basis_has_all_indices() {
        let u = cfg(2, &[&[1, 0], &[0, 1]]);
        let ell = elliptic_coordinate_ring(&u);
        assert_eq!(ell.basis_coordinates(&[3, -2]), Some(vec![3, -2]));
        let p = ell
            .mul(&ell.r(&[1, 0]).unwrap(), &ell.r(&[-1, 0]).unwrap())
            .unwrap();
        assert_eq!(p, ell.scalar(SparsePoly::var(2, 0)).unwrap());
        let p = ell
            .mul(&ell.r(&[2, -1]).unwrap(), &ell.r(&[-1, 3]).unwrap())
            .unwrap();
        let expected = ell
            .term(&[1, 2], &SparsePoly::var(2, 0) * &SparsePoly::var(2, 1))
            .unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn lattice_membership() {
        let u = cfg(1, &[&[1], &[1]]);
        let r = BranchRing::additive(&u);
        assert!(matches!(r.r(&[1, 0]), Err(RingError::NotInLattice(_))));
        assert_eq!(r.basis_coordinates(&[2, 2]), Some(vec![2]));
    }

    #[test]
    fn unit_and_mismatch() {
        let u = cfg(1, &[&[1], &[1]]);
        let add = BranchRing::additive(&u);
        let x = add.r(&[1, 1]).unwrap();
        assert_eq!(add.mul(&add.unit(), &x).unwrap(), x);
        let mult = BranchRing::multiplicative(&u);
        assert_eq!(
            add.mul(&x, &mult.unit()),
            Err(RingError::FlavorMismatch(
                Flavor::Additive,
                Flavor::Multiplicative
            ))
        );
        let other = BranchRing::additive(&cfg(1, &[&[1], &[1], &[1]]));
        assert_eq!(add.mul(&x, &other.unit()), Err(RingError::ConfigMismatch));
    }

    #[test]
    fn default_generators() {
        let u = cfg(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        let ell = elliptic_coordinate_ring(&u);
        assert_eq!(ell.generators(None).len(), 4);
        assert_eq!(ell.generators(Some(1)).len(), 8);
        assert_eq!(ell.generators(Some(0)).len(), 0);
    }

    #[test]
    fn hbk_presentations() {
        // With circuit coefficients normalized as (1,1), v = {(1),(−1)} splits as S⁺ = {1,2}.
        let v = cfg(1, &[&[1], &[-1]]);
        let p = presentation_hbk(&v, &[q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(p.generators.len(), 1);
        assert_eq!(p.render_generator(0), "x1*x2");

        // The ħ − x form arises for v = {(1),(1)}, coefficients (1,−1).
        let v = cfg(1, &[&[1], &[1]]);
        let p = presentation_hbk(&v, &[q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(p.render_generator(0), "x1*(hbar - x2)");
        let names = p.variable_names();
        assert_eq!(p.generators[0].render(&names), "hbar*x1 - x1*x2");

        let v = cfg(2, &[&[1, 0], &[0, 1]]);
        assert!(presentation_hbk(&v, &[q(1, 1), q(1, 2)])
            .unwrap()
            .generators
            .is_empty());

        let v = cfg(1, &[&[1], &[1], &[1]]);
        let p = presentation_hbk(&v, &default_alpha_hat(3)).unwrap();
        let rendered: Vec<String> = (0..3).map(|j| p.render_generator(j)).collect();
        assert_eq!(
            rendered,
            vec!["x1*(hbar - x2)", "x1*(hbar - x3)", "x2*(hbar - x3)"]
        );

        assert!(matches!(
            presentation_hbk(&cfg(1, &[&[1], &[1]]), &[q(1, 1), q(1, 1)]),
            Err(RingError::Lattice(LatticeError::NonGenericAlpha { .. }))
        ));
    }

    #[test]
    fn ell_presentations() {
        let v = cfg(1, &[&[1], &[1]]);
        let e = ell_presentation(&v, &[q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(e.ideal.to_string(), "(ϑ(x1)·ϑ(ħ-x2))");
        assert_eq!(e.degrees, vec![vec![1, 1, 1]]);

        let v = cfg(2, &[&[1, 0], &[0, 1]]);
        assert!(ell_presentation(&v, &default_alpha_hat(2))
            .unwrap()
            .ideal
            .is_zero());

        let v = cfg(1, &[&[1], &[1], &[1]]);
        let e = ell_presentation(&v, &default_alpha_hat(3)).unwrap();
        assert_eq!(e.ideal.generators().len(), 3);
        assert_eq!(e.circuit_generators[0], vec![1, 0, 0, 0, 1, 0]);
    }

    #[test]
    fn evaluation_is_multiplicative() {
        let m = tau();
        let u = cfg(2, &[&[1, 0], &[0, 1], &[1, 1], &[1, -1]]);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for flavor in [Flavor::Additive, Flavor::Multiplicative, Flavor::Elliptic] {
            let ring = BranchRing::new(flavor, &u);
            let gens = ring.generators(Some(1));
            for _ in 0..50 {
                let p = ring.sample_eval_point(&mut rng, &m);
                let a = &gens[rng.gen_range(0..gens.len())];
                let b = &gens[rng.gen_range(0..gens.len())];
                let lhs = ring.eval(&ring.mul(a, b).unwrap(), &p);
                let rhs = ring.eval(a, &p) * ring.eval(b, &p);
                assert!(
                    (lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0),
                    "{flavor:?}"
                );
            }
        }
    }

    #[test]
    fn associative_and_commutative() {
        let u = cfg(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        for flavor in [Flavor::Additive, Flavor::Multiplicative, Flavor::Elliptic] {
            let ring = BranchRing::new(flavor, &u);
            let gens = ring.generators(Some(1));
            for a in &gens {
                for b in &gens {
                    let ab = ring.mul(a, b).unwrap();
                    assert_eq!(ab, ring.mul(b, a).unwrap());
                    for c in gens.iter().step_by(3) {
                        assert_eq!(
                            ring.mul(&ab, c).unwrap(),
                            ring.mul(a, &ring.mul(b, c).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn elliptic_grading_is_additive() {
        let u = cfg(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        let ell = elliptic_coordinate_ring(&u);
        let gens = ell.generators(Some(2));
        for a in &gens {
            for b in &gens {
                let p = ell.mul(a, b).unwrap();
                let (la, _) = a.terms().next().unwrap();
                let (lb, _) = b.terms().next().unwrap();
                let expected = BranchRing::term_degree(la, &[0; 3])
                    .iter()
                    .zip(BranchRing::term_degree(lb, &[0; 3]))
                    .map(|(x, y)| x + y)
                    .collect::<Vec<_>>();
                for (l, f) in p.terms() {
                    let sum: Vec<i64> = la.iter().zip(lb).map(|(x, y)| x + y).collect();
                    assert_eq!(l, &sum);
                    for (m, _) in f.terms() {
                        assert_eq!(BranchRing::term_degree(l, m), expected);
                    }
                }
            }
        }
    }
}
