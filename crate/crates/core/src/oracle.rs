//! An independent model of the δ-rule product, used to cross-check [`BranchRing::mul`].
//!
//! `r^λ` is modeled as the monomial `z^{max(λ,0)} w^{max(−λ,0)}` in commuting
//! variables. Products add exponents, and every common factor `z_i w_i` is then
//! replaced by `c_i`.

use std::collections::BTreeMap;

use crate::poly::SparsePoly;
use crate::rings::{BranchRing, RingError, SymbolElement};

/// The product of `a` and `b` computed in the monomial model.
pub fn monomial_oracle_mul(
    ring: &BranchRing,
    a: &SymbolElement,
    b: &SymbolElement,
) -> Result<SymbolElement, RingError> {
    if a.flavor() != ring.flavor() {
        return Err(RingError::FlavorMismatch(ring.flavor(), a.flavor()));
    }
    if b.flavor() != ring.flavor() {
        return Err(RingError::FlavorMismatch(ring.flavor(), b.flavor()));
    }
    let n = ring.n();
    // Key: (z exponents, w exponents).
    let mut acc: BTreeMap<(Vec<i64>, Vec<i64>), SparsePoly> = BTreeMap::new();
    for (l, f) in a.terms() {
        for (m, g) in b.terms() {
            let z: Vec<i64> = (0..n).map(|i| l[i].max(0) + m[i].max(0)).collect();
            let w: Vec<i64> = (0..n).map(|i| (-l[i]).max(0) + (-m[i]).max(0)).collect();
            let mut c = f * g;
            let mut zr = z.clone();
            let mut wr = w.clone();
            for i in 0..n {
                let k = z[i].min(w[i]);
                zr[i] -= k;
                wr[i] -= k;
                for _ in 0..k {
                    c = &c * ring.central_element(i);
                }
            }
            let slot = acc
                .entry((zr, wr))
                .or_insert_with(|| SparsePoly::zero(ring.coeff_vars()));
            *slot = &*slot + &c;
        }
    }
    let mut out = ring.zero();
    for ((z, w), c) in acc {
        if c.is_zero() {
            continue;
        }
        let lambda: Vec<i64> = z.iter().zip(&w).map(|(x, y)| x - y).collect();
        out = ring.add(&out, &ring.term(&lambda, c)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::VectorConfig;
    use crate::rings::Flavor;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element<R: Rng>(ring: &BranchRing, rng: &mut R) -> SymbolElement {
        let mut e = ring.zero();
        for _ in 0..rng.gen_range(1..=3) {
            let c: Vec<i64> = (0..ring.rank()).map(|_| rng.gen_range(-3..=3)).collect();
            let lambda = ring.from_basis_coordinates(&c);
            let k = ring.coeff_vars();
            let mut exps: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=1)).collect();
            if ring.flavor() == Flavor::Multiplicative {
                exps.iter_mut().for_each(|x| *x -= rng.gen_range(0..=1));
            }
            let f = SparsePoly::monomial(
                exps,
                BigInt::from(rng.gen_range(1..=4) * if rng.gen() { 1 } else { -1 }),
            );
            e = ring.add(&e, &ring.term(&lambda, f).unwrap()).unwrap();
        }
        e
    }

    #[test]
    fn oracle_agrees_with_delta_rule() {
        let configs = [
            VectorConfig::from_i64(1, &[vec![1], vec![1]]).unwrap(),
            VectorConfig::from_i64(2, &[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap(),
            VectorConfig::from_i64(2, &[vec![1, 0], vec![0, 1], vec![1, -1], vec![1, 1]]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for flavor in [Flavor::Additive, Flavor::Multiplicative, Flavor::Elliptic] {
            for cfg in &configs {
                let ring = BranchRing::new(flavor, cfg);
                for _ in 0..1000 / configs.len() + 1 {
                    let a = random_element(&ring, &mut rng);
                    let b = random_element(&ring, &mut rng);
                    assert_eq!(
                        ring.mul(&a, &b).unwrap(),
                        monomial_oracle_mul(&ring, &a, &b).unwrap()
                    );
                }
            }
        }
    }
}
