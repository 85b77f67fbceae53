//! Vector configurations, the exact sequences they determine, Gale duality
//! and circuits.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::matrix::{content, hermite_normal_form, kernel_basis, smith_normal_form, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("degenerate configuration: {0}")]
    DegenerateConfig(String),
    #[error("covector pairs to zero with the circuit on {support:?}")]
    NonGenericAlpha { support: Vec<usize> },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// `n` integer vectors in `Z^d`, each primitive or zero, jointly spanning `Z^d`.
///
/// Zero vectors are accepted because the Gale dual of a configuration with a
/// coloop contains one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorConfig {
    d: usize,
    vectors: Vec<Vec<BigInt>>,
}

impl VectorConfig {
    pub fn new(d: usize, vectors: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        for v in &vectors {
            if v.len() != d {
                return Err(LatticeError::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
            let g = content(v);
            if !g.is_zero() && !g.is_one() {
                return Err(LatticeError::DegenerateConfig(format!(
                    "vector {} is not primitive",
                    fmt_vec(v)
                )));
            }
        }
        let cfg = VectorConfig { d, vectors };
        let s = smith_normal_form(&cfg.matrix());
        let f = s.invariant_factors();
        if f.len() != d {
            return Err(LatticeError::DegenerateConfig(format!(
                "vectors span a rank {} sublattice of Z^{d}",
                f.len()
            )));
        }
        if let Some(bad) = f.iter().find(|x| !x.is_one()) {
            return Err(LatticeError::DegenerateConfig(format!(
                "vectors span a sublattice of index divisible by {bad}"
            )));
        }
        Ok(cfg)
    }

    pub fn from_i64(d: usize, vectors: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::new(
            d,
            vectors
                .iter()
                .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// The configuration formed by the columns of a `d × n` matrix.
    pub fn from_columns(m: &IntMatrix) -> Result<Self, LatticeError> {
        Self::new(m.rows(), (0..m.cols()).map(|j| m.col(j)).collect())
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[BigInt] {
        &self.vectors[i]
    }

    /// The `d × n` matrix whose columns are the vectors.
    pub fn matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.d, self.n());
        for (j, v) in self.vectors.iter().enumerate() {
            for (i, x) in v.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        self.vectors
            .iter()
            .map(|v| v.iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }

    pub fn is_loop(&self, i: usize) -> bool {
        self.vectors[i].iter().all(Zero::is_zero)
    }

    /// Flips the sign of every vector whose index is listed.
    pub fn with_signs_flipped(&self, which: &[usize]) -> Self {
        let mut out = self.clone();
        for &i in which {
            for x in &mut out.vectors[i] {
                *x = -std::mem::take(x);
            }
        }
        out
    }

    /// Reorders vectors: output vector `j` is input vector `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n());
        VectorConfig {
            d: self.d,
            vectors: perm.iter().map(|&i| self.vectors[i].clone()).collect(),
        }
    }
}

impl fmt::Debug for VectorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorConfig(d={}, {self})", self.d)
    }
}

impl fmt::Display for VectorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vectors.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_vec(v))?;
        }
        write!(f, "}}")
    }
}

fn fmt_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// The sequences `0 → k → t → a → 0` and their duals, with `π(e_i) = u_i`.
#[derive(Clone, Debug)]
pub struct ExactSequenceData {
    /// `d × n`, columns `u_i`.
    pub pi: IntMatrix,
    /// `n × k`, columns a Hermite basis of `ker π`.
    pub iota: IntMatrix,
    /// `n × d`
    pub pi_vee: IntMatrix,
    /// `k × n`
    pub iota_vee: IntMatrix,
    /// `n × k` integer right inverse of `iota_vee`, used to lift points of
    /// `k∨`-side tori to `t∨`-side tori.
    pub section: IntMatrix,
}

impl ExactSequenceData {
    pub fn new(cfg: &VectorConfig) -> Self {
        let pi = cfg.matrix();
        let iota = kernel_basis(&pi);
        let pi_vee = pi.transpose();
        let iota_vee = iota.transpose();
        let section = right_inverse(&iota_vee);
        ExactSequenceData {
            pi,
            iota,
            pi_vee,
            iota_vee,
            section,
        }
    }

    pub fn n(&self) -> usize {
        self.pi.cols()
    }

    pub fn d(&self) -> usize {
        self.pi.rows()
    }

    pub fn k(&self) -> usize {
        self.iota.cols()
    }

    /// Lifts a `k`-vector along the section to an `n`-vector.
    pub fn lift(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.k());
        (0..self.n())
            .map(|i| {
                (0..self.k()).fold(BigRational::zero(), |acc, j| {
                    acc + BigRational::from_integer(self.section[(i, j)].clone()) * &x[j]
                })
            })
            .collect()
    }
}

/// Integer right inverse of a surjective `r × c` integer matrix.
///
/// Panics if the matrix is not surjective onto `Z^r`; callers only pass
/// transposes of saturated kernel bases.
fn right_inverse(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    assert!(
        s.rank() == a.rows() && s.invariant_factors().iter().all(One::is_one),
        "right_inverse of a non-surjective matrix"
    );
    // U·A·V = [I 0]  ⇒  A·(V·[I 0]ᵀ·U) = I
    &(&s.v * &s.d.transpose()) * &s.u
}

/// The Gale dual: the rows of a saturated kernel basis of the configuration
/// matrix, as vectors of `Z^{n-d}`.
pub fn gale_dual(cfg: &VectorConfig) -> Result<VectorConfig, LatticeError> {
    let iota = kernel_basis(&cfg.matrix());
    let vectors: Vec<Vec<BigInt>> = (0..iota.rows()).map(|i| iota.row(i).to_vec()).collect();
    VectorConfig::new(iota.cols(), vectors).map_err(|e| match e {
        LatticeError::DegenerateConfig(msg) => {
            LatticeError::DegenerateConfig(format!("Gale dual is degenerate: {msg}"))
        }
        other => other,
    })
}

/// Calls `f` on every `r`-subset of `0..n`, in lexicographic order.
pub fn for_each_subset(n: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        f(&idx);
        let Some(pos) = (0..r).rev().find(|&p| idx[p] != p + n - r) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..r {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_subset(n, r, |s| out.push(s.to_vec()));
    out
}

/// True iff every `d × d` minor of the configuration matrix is `0` or `±1`.
pub fn is_unimodular(cfg: &VectorConfig) -> bool {
    unimodularity_witness(cfg).is_none()
}

/// A `d`-subset whose determinant is not in `{0, ±1}`, if any.
pub fn unimodularity_witness(cfg: &VectorConfig) -> Option<(Vec<usize>, BigInt)> {
    let m = cfg.matrix();
    let mut found = None;
    for_each_subset(cfg.n(), cfg.d(), |s| {
        if found.is_some() {
            return;
        }
        let det = m.select_cols(s).det();
        if det.abs() > BigInt::one() {
            found = Some((s.to_vec(), det));
        }
    });
    found
}

/// A splitting `S = S⁺ ⊔ S⁻` of a circuit's support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Splitting {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

/// A minimal dependent subset together with its dependency.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    /// Sorted, 0-based.
    pub support: Vec<usize>,
    /// Length `n`, zero off the support, primitive.
    pub coefficients: Vec<BigInt>,
    pub splitting: Option<Splitting>,
}

impl Circuit {
    /// `Σ_{S⁺} e_i∨ − Σ_{S⁻} e_i∨` using the signs of the coefficients.
    pub fn beta(&self) -> Vec<i64> {
        self.coefficients
            .iter()
            .map(|a| {
                if a.is_positive() {
                    1
                } else if a.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }

    pub fn has_unit_coefficients(&self) -> bool {
        self.support
            .iter()
            .all(|&i| self.coefficients[i].abs().is_one())
    }
}

/// Every circuit of the configuration, ordered lexicographically by support.
///
/// Coefficients are normalized so that the smallest support index carries a
/// positive coefficient.
pub fn circuits(cfg: &VectorConfig) -> Vec<Circuit> {
    circuits_of_matrix(&cfg.matrix())
}

/// [`circuits`] for the columns of an arbitrary integer matrix.
pub fn circuits_of_matrix(m: &IntMatrix) -> Vec<Circuit> {
    let n = m.cols();
    let mut out = Vec::new();
    for size in 1..=(m.rows() + 1).min(n) {
        for_each_subset(n, size, |s| {
            let sub = m.select_cols(s);
            if sub.rank() + 1 != size {
                return;
            }
            let ker = kernel_basis(&sub);
            debug_assert_eq!(ker.cols(), 1);
            let mut col = ker.col(0);
            if col.iter().any(Zero::is_zero) {
                return;
            }
            if col[0].is_negative() {
                col.iter_mut().for_each(|x| *x = -std::mem::take(x));
            }
            let mut coefficients = vec![BigInt::zero(); n];
            for (&i, a) in s.iter().zip(col) {
                coefficients[i] = a;
            }
            out.push(Circuit {
                support: s.to_vec(),
                coefficients,
                splitting: None,
            });
        });
    }
    out.sort_by(|a, b| a.support.cmp(&b.support));
    out
}

/// Fixes the splitting of a circuit by the sign of its pairing with `alpha_hat`.
pub fn circuit_splitting(c: &Circuit, alpha_hat: &[BigRational]) -> Result<Circuit, LatticeError> {
    if alpha_hat.len() != c.coefficients.len() {
        return Err(LatticeError::DimensionMismatch {
            expected: c.coefficients.len(),
            got: alpha_hat.len(),
        });
    }
    let pairing = c
        .beta()
        .iter()
        .zip(alpha_hat)
        .fold(BigRational::zero(), |acc, (&b, a)| {
            acc + a * BigRational::from_integer(b.into())
        });
    if pairing.is_zero() {
        return Err(LatticeError::NonGenericAlpha {
            support: c.support.clone(),
        });
    }
    let mut out = c.clone();
    if pairing.is_negative() {
        out.coefficients
            .iter_mut()
            .for_each(|x| *x = -std::mem::take(x));
    }
    let plus = out
        .support
        .iter()
        .copied()
        .filter(|&i| out.coefficients[i].is_positive())
        .collect();
    let minus = out
        .support
        .iter()
        .copied()
        .filter(|&i| out.coefficients[i].is_negative())
        .collect();
    out.splitting = Some(Splitting { plus, minus });
    Ok(out)
}

/// The default stability covector `(1, 1/2, 1/4, …)`.
///
/// Any signed sum of distinct powers of two is nonzero, so this covector is
/// generic for every circuit whose splitting is read off coefficient signs.
pub fn default_alpha_hat(n: usize) -> Vec<BigRational> {
    (0..n)
        .map(|i| BigRational::new(BigInt::one(), BigInt::one() << i))
        .collect()
}

/// Solution set of an integer system `A·y ≡ b (mod Z^r)` for `y ∈ (Q/Z)^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModOneSolutions {
    Empty,
    /// Positive-dimensional solution set.
    Infinite,
    /// All solutions, each reduced into `[0,1)^m`, sorted.
    Finite(Vec<Vec<BigRational>>),
}

/// Reduces a rational into `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Solves `A·y ≡ b` modulo integers via the Smith form of `A`.
///
/// Finite solution sets have exactly `∏ d_j` elements, the product of the
/// invariant factors.
pub fn solve_mod_one(a: &IntMatrix, b: &[BigRational]) -> ModOneSolutions {
    assert_eq!(a.rows(), b.len(), "right-hand side length");
    let m = a.cols();
    let s = smith_normal_form(a);
    let factors = s.invariant_factors();
    let r = factors.len();
    let ub: Vec<BigRational> = (0..a.rows())
        .map(|i| {
            s.u.row(i)
                .iter()
                .zip(b)
                .fold(BigRational::zero(), |acc, (x, y)| {
                    acc + BigRational::from_integer(x.clone()) * y
                })
        })
        .collect();
    if ub[r..].iter().any(|c| !c.is_integer()) {
        return ModOneSolutions::Empty;
    }
    if r < m {
        return ModOneSolutions::Infinite;
    }
    // z_j = (c_j + t) / d_j for t in 0..d_j
    let mut zs: Vec<Vec<BigRational>> = vec![Vec::new()];
    for (j, dj) in factors.iter().enumerate() {
        let mut next = Vec::new();
        let mut t = BigInt::zero();
        while &t < dj {
            let zj = frac(
                &((&ub[j] + BigRational::from_integer(t.clone()))
                    / BigRational::from_integer(dj.clone())),
            );
            for z in &zs {
                let mut z = z.clone();
                z.push(zj.clone());
                next.push(z);
            }
            t += 1;
        }
        zs = next;
    }
    let mut sols: Vec<Vec<BigRational>> = zs
        .into_iter()
        .map(|z| {
            (0..m)
                .map(|i| {
                    frac(
                        &s.v.row(i)
                            .iter()
                            .zip(&z)
                            .fold(BigRational::zero(), |acc, (x, y)| {
                                acc + BigRational::from_integer(x.clone()) * y
                            }),
                    )
                })
                .collect()
        })
        .collect();
    sols.sort();
    sols.dedup();
    ModOneSolutions::Finite(sols)
}

/// A particular rational solution of `A·y = b` (free variables set to zero),
/// or `None` if the system is inconsistent.
pub fn solve_rational(a: &IntMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    assert_eq!(a.rows(), b.len(), "right-hand side length");
    let (rows, cols) = a.shape();
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut r: Vec<BigRational> = a
                .row(i)
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in &mut m[r] {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= p * &f;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut y = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        y[c] = m[i][cols].clone();
    }
    Some(y)
}

/// The Hermite basis of the row space of the configuration's `d × n` matrix,
/// i.e. a basis of `{(⟨a,u_1⟩,…,⟨a,u_n⟩) : a ∈ Z^d}`.
pub fn row_lattice_basis(cfg: &VectorConfig) -> IntMatrix {
    let (h, _, piv) = hermite_normal_form(&cfg.matrix());
    h.select_rows(&(0..piv.len()).collect::<Vec<_>>())
}
