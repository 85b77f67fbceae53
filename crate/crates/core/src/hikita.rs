//! The three theta-monomial ideals attached to a configuration `v` and the
//! exact comparison between them.
//!
//! * the circuit ideal `(∏_{i∈S} ϑ(x_i) | S circuit)`;
//! * the coinvariant ideal `(∏ ϑ(x_i)^{|λ_i|} | 0 ≠ λ ∈ ker π_v)`, truncated to a box;
//! * the `ħ = 0` specialization of the extended circuit presentation.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::ideal::{ideal_equal, IdealComparison, ThetaMonomialIdeal};
use crate::lattice::{circuits, Circuit, LatticeError, VectorConfig};
use crate::matrix::{hermite_normal_form, kernel_basis};
use crate::rings::{ell_presentation, EllPresentation, RingError};

pub fn circuit_ideal(v: &VectorConfig) -> ThetaMonomialIdeal {
    circuit_ideal_of(v.n(), &circuits(v))
}

fn circuit_ideal_of(n: usize, circuits: &[Circuit]) -> ThetaMonomialIdeal {
    ThetaMonomialIdeal::new(
        n,
        false,
        circuits.iter().map(|c| {
            let mut g = vec![0u32; n];
            for &i in &c.support {
                g[i] = 1;
            }
            g
        }),
    )
}

/// Rows: the Hermite basis of `ker π_v ⊂ Z^n`, with pivot columns.
fn kernel_lattice(v: &VectorConfig) -> (Vec<Vec<i64>>, Vec<usize>) {
    let k = kernel_basis(&v.matrix()).transpose();
    let (h, _, pivots) = hermite_normal_form(&k);
    let rows = (0..pivots.len())
        .map(|r| {
            h.row(r)
                .iter()
                .map(|x| x.to_i64().expect("kernel entry exceeds i64"))
                .collect()
        })
        .collect();
    (rows, pivots)
}

/// Calls `f` on every nonzero `λ` in the kernel lattice with `max |λ_i| ≤ r`.
fn for_each_in_box(v: &VectorConfig, r: u32, mut f: impl FnMut(&[i64])) {
    let (basis, pivots) = kernel_lattice(v);
    let r = i64::from(r);
    let mut lambda = vec![0i64; v.n()];
    fn walk(
        j: usize,
        basis: &[Vec<i64>],
        pivots: &[usize],
        r: i64,
        lambda: &mut [i64],
        f: &mut dyn FnMut(&[i64]),
    ) {
        if j == basis.len() {
            if lambda.iter().any(|&x| x != 0) && lambda.iter().all(|x| x.abs() <= r) {
                f(lambda);
            }
            return;
        }
        // Rows after j vanish at column p_j, so λ_{p_j} is fixed once c_j is chosen.
        let (p, h) = (pivots[j], basis[j][pivots[j]]);
        let s = lambda[p];
        let lo = Integer::div_ceil(&(-r - s), &h);
        let hi = Integer::div_floor(&(r - s), &h);
        for c in lo..=hi {
            for (x, b) in lambda.iter_mut().zip(&basis[j]) {
                *x += c * b;
            }
            walk(j + 1, basis, pivots, r, lambda, f);
            for (x, b) in lambda.iter_mut().zip(&basis[j]) {
                *x -= c * b;
            }
        }
    }
    walk(0, &basis, &pivots, r, &mut lambda, &mut f);
}

/// Every nonzero `λ` in the kernel lattice with `max |λ_i| ≤ r`.
pub fn kernel_box(v: &VectorConfig, r: u32) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for_each_in_box(v, r, |l| out.push(l.to_vec()));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coinvariant {
    pub ideal: ThetaMonomialIdeal,
    pub radius: u32,
    /// The minimal generators at radius `R + 1` coincide with those at `R`.
    pub stable: bool,
}

/// The truncated coinvariant ideal. Radius must be at least 1.
pub fn coinvariant_ideal(v: &VectorConfig, radius: u32) -> Coinvariant {
    assert!(radius >= 1, "radius must be positive");
    if v.n() <= 8 && radius < 127 {
        return packed::coinvariant_ideal(v, radius);
    }
    unpacked_coinvariant_ideal(v, radius)
}

fn unpacked_coinvariant_ideal(v: &VectorConfig, radius: u32) -> Coinvariant {
    let r = i64::from(radius);
    let (mut inner, mut rim) = (Vec::new(), Vec::new());
    for_each_in_box(v, radius + 1, |l| {
        // λ and −λ give the same generator.
        if l.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            let g: Vec<u32> = l.iter().map(|x| x.unsigned_abs() as u32).collect();
            if l.iter().all(|x| x.abs() <= r) {
                inner.push(g);
            } else {
                rim.push(g);
            }
        }
    });
    let ideal = ThetaMonomialIdeal::new(v.n(), false, inner);
    let stable = rim.iter().all(|g| ideal.divisor_of(g).is_some());
    Coinvariant {
        ideal,
        radius,
        stable,
    }
}

/// Exponent vectors of at most 8 variables packed one byte each, for the
/// large candidate sets of the coinvariant ideal.
mod packed {
    use super::*;

    const HIGH: u64 = 0x8080_8080_8080_8080;

    /// Bytes must stay below 128.
    fn divides(a: u64, b: u64) -> bool {
        ((b | HIGH) - a) & HIGH == HIGH
    }

    fn degree(a: u64) -> u32 {
        a.to_le_bytes().iter().map(|&x| u32::from(x)).sum()
    }

    fn minimalize(mut all: Vec<u64>) -> Vec<u64> {
        all.sort_unstable_by_key(|&a| (degree(a), a));
        all.dedup();
        let mut minimal: Vec<u64> = Vec::new();
        for g in all {
            if !minimal.iter().any(|&m| divides(m, g)) {
                minimal.push(g);
            }
        }
        minimal
    }

    pub(super) fn coinvariant_ideal(v: &VectorConfig, radius: u32) -> Coinvariant {
        let n = v.n();
        let r = i64::from(radius);
        let (mut inner, mut rim) = (Vec::new(), Vec::new());
        for_each_in_box(v, radius + 1, |l| {
            if l.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
                let g = l
                    .iter()
                    .rev()
                    .fold(0u64, |acc, x| (acc << 8) | x.unsigned_abs());
                if l.iter().all(|x| x.abs() <= r) {
                    inner.push(g);
                } else {
                    rim.push(g);
                }
            }
        });
        let minimal = minimalize(inner);
        let stable = rim.iter().all(|&g| minimal.iter().any(|&m| divides(m, g)));
        let unpack = |g: u64| {
            (0..n)
                .map(|i| ((g >> (8 * i)) & 0xff) as u32)
                .collect::<Vec<u32>>()
        };
        Coinvariant {
            ideal: ThetaMonomialIdeal::new(n, false, minimal.into_iter().map(unpack)),
            radius,
            stable,
        }
    }

}

/// Substitutes `ϑ(ħ − x_i) ↦ ϑ(x_i)` (up to sign) and re-minimalizes.
pub fn specialize_hbar_zero(i: &ThetaMonomialIdeal) -> ThetaMonomialIdeal {
    let n = i.n();
    if !i.is_extended() {
        return i.clone();
    }
    ThetaMonomialIdeal::new(
        n,
        false,
        i.generators()
            .iter()
            .map(|g| (0..n).map(|k| g[k] + g[n + k]).collect()),
    )
}

#[derive(Debug, Clone)]
pub struct HikitaReport {
    pub config: VectorConfig,
    pub unimodular: bool,
    pub circuit: ThetaMonomialIdeal,
    pub coinvariant: Coinvariant,
    pub presentation: EllPresentation,
    pub specialized: ThetaMonomialIdeal,
    pub circuit_vs_coinvariant: IdealComparison,
    pub circuit_vs_specialized: IdealComparison,
    pub coinvariant_vs_specialized: IdealComparison,
}

impl HikitaReport {
    pub fn all_equal(&self) -> bool {
        self.circuit_vs_coinvariant.equal
            && self.circuit_vs_specialized.equal
            && self.coinvariant_vs_specialized.equal
    }

    pub fn verdict(&self) -> &'static str {
        if self.all_equal() {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// Builds all three ideals and compares them pairwise. Non-unimodular inputs
/// are processed and flagged through [`HikitaReport::unimodular`].
pub fn hikita_verify(
    v: &VectorConfig,
    alpha_hat: &[BigRational],
    radius: u32,
) -> Result<HikitaReport, LatticeError> {
    let presentation = ell_presentation(v, alpha_hat).map_err(|e| match e {
        RingError::Lattice(l) => l,
        other => unreachable!("presentation error {other}"),
    })?;
    let circuit = circuit_ideal_of(v.n(), &presentation.circuits);
    let coinvariant = coinvariant_ideal(v, radius);
    let specialized = specialize_hbar_zero(&presentation.ideal);
    let cmp = |a: &ThetaMonomialIdeal, b: &ThetaMonomialIdeal| {
        ideal_equal(a, b).expect("same variable set")
    };
    Ok(HikitaReport {
        config: v.clone(),
        unimodular: presentation.unimodular,
        circuit_vs_coinvariant: cmp(&circuit, &coinvariant.ideal),
        circuit_vs_specialized: cmp(&circuit, &specialized),
        coinvariant_vs_specialized: cmp(&coinvariant.ideal, &specialized),
        circuit,
        coinvariant,
        presentation,
        specialized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::default_alpha_hat;

    fn cfg(d: usize, v: &[&[i64]]) -> VectorConfig {
        VectorConfig::from_i64(d, &v.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn gens(i: &ThetaMonomialIdeal) -> Vec<Vec<u32>> {
        i.generators().to_vec()
    }

    #[test]
    fn circuit_ideal_examples() {
        assert_eq!(
            gens(&circuit_ideal(&cfg(1, &[&[1], &[-1]]))),
            vec![vec![1, 1]]
        );
        let a2 = circuit_ideal(&cfg(1, &[&[1], &[1], &[1]]));
        assert_eq!(gens(&a2), vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        assert!(circuit_ideal(&cfg(2, &[&[1, 0], &[0, 1]])).is_zero());
    }

    #[test]
    fn kernel_box_brute_force() {
        // Oracle: scan the whole box and test π λ = 0 directly.
        let v = cfg(2, &[&[1, 0], &[0, 1], &[1, 1], &[1, -1]]);
        let r = 3i64;
        let mut expected = Vec::new();
        let vs = v.to_i64().unwrap();
        let mut l = vec![-r; 4];
        loop {
            let image: Vec<i64> = (0..2)
                .map(|j| (0..4).map(|i| l[i] * vs[i][j]).sum())
                .collect();
            if image.iter().all(|&x| x == 0) && l.iter().any(|&x| x != 0) {
                expected.push(l.clone());
            }
            let Some(p) = (0..4).find(|&i| l[i] < r) else {
                break;
            };
            l[p] += 1;
            for x in &mut l[..p] {
                *x = -r;
            }
        }
        let mut got = kernel_box(&v, 3);
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn coinvariant_examples() {
        let c = coinvariant_ideal(&cfg(1, &[&[1], &[-1]]), 3);
        assert_eq!(gens(&c.ideal), vec![vec![1, 1]]);
        assert!(c.stable);
        assert!(coinvariant_ideal(&cfg(2, &[&[1, 0], &[0, 1]]), 2)
            .ideal
            .is_zero());
        let c = coinvariant_ideal(&cfg(1, &[&[1], &[1], &[1]]), 3);
        assert_eq!(c.ideal, circuit_ideal(&cfg(1, &[&[1], &[1], &[1]])));
        assert!(c.stable);
    }

    #[test]
    fn specialization_examples() {
        let i = ThetaMonomialIdeal::new(2, true, vec![vec![1, 0, 0, 1]]);
        assert_eq!(gens(&specialize_hbar_zero(&i)), vec![vec![1, 1]]);
        assert!(specialize_hbar_zero(&ThetaMonomialIdeal::zero(2, true)).is_zero());
        let a2 = ThetaMonomialIdeal::new(
            3,
            true,
            vec![
                vec![1, 0, 0, 0, 1, 0],
                vec![1, 0, 0, 0, 0, 1],
                vec![0, 1, 0, 0, 0, 1],
            ],
        );
        assert_eq!(
            specialize_hbar_zero(&a2),
            circuit_ideal(&cfg(1, &[&[1], &[1], &[1]]))
        );
    }

    #[test]
    fn verify_examples() {
        for v in [
            cfg(1, &[&[1], &[-1]]),
            cfg(2, &[&[1, 0], &[0, 1]]),
            cfg(1, &[&[1], &[1], &[1]]),
        ] {
            let rep = hikita_verify(&v, &default_alpha_hat(v.n()), v.n() as u32).unwrap();
            assert!(rep.unimodular);
            assert_eq!(rep.verdict(), "PASS", "{v:?}");
            assert!(rep.coinvariant.stable);
        }
        let v = cfg(1, &[&[1], &[1], &[1]]);
        assert_eq!(
            hikita_verify(&v, &default_alpha_hat(3), 3)
                .unwrap()
                .circuit
                .generators()
                .len(),
            3
        );
    }

    #[test]
    fn non_unimodular_is_flagged() {
        // Circuit coefficients (2, −1, …) make some coinvariant generators non-squarefree.
        let v = cfg(2, &[&[1, 0], &[0, 1], &[1, 2]]);
        let rep = hikita_verify(&v, &default_alpha_hat(3), 3).unwrap();
        assert!(!rep.unimodular);
        let c = &rep.coinvariant.ideal;
        assert_eq!(gens(c), vec![vec![1, 2, 1]]);
        assert_eq!(rep.verdict(), "FAIL");
    }

    #[test]
    fn non_generic_alpha_is_an_error() {
        let v = cfg(1, &[&[1], &[1]]);
        let one = BigRational::from_integer(1.into());
        assert!(matches!(
            hikita_verify(&v, &[one.clone(), one], 2),
            Err(LatticeError::NonGenericAlpha { .. })
        ));
    }

    mod props {
        use super::*;
        use crate::lattice::is_unimodular;
        use proptest::prelude::*;

        fn unimodular_config() -> impl Strategy<Value = VectorConfig> {
            (1usize..=2, 2usize..=5)
                .prop_flat_map(|(d, n)| {
                    proptest::collection::vec(proptest::collection::vec(-1i64..=1, d), n)
                        .prop_map(move |v| (d, v))
                })
                .prop_filter_map("unimodular spanning", |(d, v)| {
                    let c = VectorConfig::from_i64(d, &v).ok()?;
                    is_unimodular(&c).then_some(c)
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn three_ideals_agree(v in unimodular_config()) {
                let rep = hikita_verify(&v, &default_alpha_hat(v.n()), v.n() as u32).unwrap();
                prop_assert!(rep.all_equal());
                prop_assert!(rep.coinvariant.stable);
            }

            #[test]
            fn circuit_ideal_is_contained_in_coinvariant(v in unimodular_config(), r in 1u32..4) {
                let cmp = ideal_equal(&circuit_ideal(&v), &coinvariant_ideal(&v, r).ideal).unwrap();
                // Every coinvariant generator is a multiple of a circuit generator.
                prop_assert!(cmp.right_in_left.iter().all(Option::is_some));
            }

            #[test]
            fn specialization_ignores_alpha(v in unimodular_config(), seed in any::<u64>()) {
                let alt: Vec<BigRational> = (0..v.n())
                    .map(|i| {
                        let num = ((seed >> (4 * i)) % 13) as i64 - 6;
                        BigRational::new((7 * num + 1).into(), (7 + 2 * i as i64).into())
                    })
                    .collect();
                let Ok(p) = ell_presentation(&v, &alt) else { return Ok(()) };
                let base = ell_presentation(&v, &default_alpha_hat(v.n())).unwrap();
                prop_assert_eq!(specialize_hbar_zero(&p.ideal), specialize_hbar_zero(&base.ideal));
            }
        }
    }
}
