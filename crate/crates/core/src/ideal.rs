//! Monomial ideals in the theta symbols `ϑ(x_i)` and, optionally, `ϑ(ħ − x_i)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("variable sets differ: {0} vs {1}")]
    VariableSetMismatch(String, String),
}

/// A monomial ideal given by its minimal generators.
///
/// Exponent vectors have length `n`, or `2n` when extended; slots `n..2n`
/// hold the exponents of `ϑ(ħ − x_i)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ThetaMonomialIdeal {
    n: usize,
    extended: bool,
    generators: Vec<Vec<u32>>,
}

fn degree(g: &[u32]) -> u32 {
    g.iter().sum()
}

/// `a | b` for monomials.
pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl ThetaMonomialIdeal {
    /// Builds the ideal generated by `gens`, keeping only minimal generators.
    pub fn new(n: usize, extended: bool, gens: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let width = if extended { 2 * n } else { n };
        let mut all: Vec<Vec<u32>> = gens.into_iter().collect();
        for g in &all {
            assert_eq!(g.len(), width, "generator length");
        }
        all.sort_unstable_by(|a, b| degree(a).cmp(&degree(b)).then_with(|| b.cmp(a)));
        all.dedup();
        let mut minimal: Vec<Vec<u32>> = Vec::with_capacity(all.len());
        // Sorted by degree, so any divisor of g precedes it.
        for g in all {
            if !minimal.iter().any(|m| divides(m, &g)) {
                minimal.push(g);
            }
        }
        ThetaMonomialIdeal {
            n,
            extended,
            generators: minimal,
        }
    }

    pub fn zero(n: usize, extended: bool) -> Self {
        ThetaMonomialIdeal {
            n,
            extended,
            generators: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// Index of a generator dividing `mono`, if `mono` lies in the ideal.
    pub fn divisor_of(&self, mono: &[u32]) -> Option<usize> {
        self.generators.iter().position(|g| divides(g, mono))
    }

    fn variable_set(&self) -> String {
        if self.extended {
            format!("ϑ(x_1..x_{n}), ϑ(ħ-x_1..ħ-x_{n})", n = self.n)
        } else {
            format!("ϑ(x_1..x_{})", self.n)
        }
    }

    pub fn variable_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.n).map(|i| format!("ϑ(x{i})")).collect();
        if self.extended {
            names.extend((1..=self.n).map(|i| format!("ϑ(ħ-x{i})")));
        }
        names
    }

    pub fn render_monomial(&self, mono: &[u32]) -> String {
        let names = self.variable_names();
        let factors: Vec<String> = mono
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| {
                if k == 1 {
                    names[i].clone()
                } else {
                    format!("{}^{k}", names[i])
                }
            })
            .collect();
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("·")
        }
    }
}

impl fmt::Debug for ThetaMonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ThetaMonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "(0)");
        }
        let parts: Vec<String> = self
            .generators
            .iter()
            .map(|g| self.render_monomial(g))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Outcome of [`ideal_equal`]: for each generator of one ideal, the index of a
/// dividing generator of the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealComparison {
    pub equal: bool,
    pub left_in_right: Vec<Option<usize>>,
    pub right_in_left: Vec<Option<usize>>,
}

pub fn ideal_equal(
    i: &ThetaMonomialIdeal,
    j: &ThetaMonomialIdeal,
) -> Result<IdealComparison, IdealError> {
    if i.n != j.n || i.extended != j.extended {
        return Err(IdealError::VariableSetMismatch(
            i.variable_set(),
            j.variable_set(),
        ));
    }
    let left_in_right: Vec<Option<usize>> = i.generators.iter().map(|g| j.divisor_of(g)).collect();
    let right_in_left: Vec<Option<usize>> = j.generators.iter().map(|g| i.divisor_of(g)).collect();
    let equal = left_in_right
        .iter()
        .chain(&right_in_left)
        .all(Option::is_some);
    Ok(IdealComparison {
        equal,
        left_in_right,
        right_in_left,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimalization() {
        let i = ThetaMonomialIdeal::new(2, false, (1..=3).map(|k| vec![k, k]));
        assert_eq!(i.generators(), &[vec![1, 1]]);
        let i = ThetaMonomialIdeal::new(
            3,
            false,
            vec![vec![0, 1, 1], vec![1, 1, 0], vec![1, 0, 1], vec![1, 1, 1]],
        );
        assert_eq!(
            i.generators(),
            &[vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]
        );
        assert_eq!(i.to_string(), "(ϑ(x1)·ϑ(x2), ϑ(x1)·ϑ(x3), ϑ(x2)·ϑ(x3))");
    }

    #[test]
    fn equality_examples() {
        let a = ThetaMonomialIdeal::new(2, false, vec![vec![1, 1]]);
        let b = ThetaMonomialIdeal::new(2, false, (1..=3).map(|k| vec![k, k]));
        assert!(ideal_equal(&a, &b).unwrap().equal);
        let c = ThetaMonomialIdeal::new(2, false, vec![vec![1, 0]]);
        let cmp = ideal_equal(&c, &a).unwrap();
        assert!(!cmp.equal);
        assert_eq!(cmp.left_in_right, vec![None]);
        assert_eq!(cmp.right_in_left, vec![Some(0)]);
        assert!(ideal_equal(&a, &a).unwrap().equal);
        let zero = ThetaMonomialIdeal::zero(2, false);
        assert!(ideal_equal(&zero, &zero).unwrap().equal);
        assert!(ideal_equal(&a, &ThetaMonomialIdeal::zero(2, true)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn ideal() -> impl Strategy<Value = ThetaMonomialIdeal> {
            proptest::collection::vec(proptest::collection::vec(0u32..3, 3), 0..5)
                .prop_map(|g| ThetaMonomialIdeal::new(3, false, g))
        }

        proptest! {
            #[test]
            fn generators_are_an_antichain(i in ideal()) {
                for (a, g) in i.generators().iter().enumerate() {
                    for (b, h) in i.generators().iter().enumerate() {
                        prop_assert!(a == b || !divides(g, h));
                    }
                }
            }

            #[test]
            fn equality_is_an_equivalence(a in ideal(), b in ideal(), c in ideal()) {
                let eq = |x: &ThetaMonomialIdeal, y: &ThetaMonomialIdeal| ideal_equal(x, y).unwrap().equal;
                prop_assert!(eq(&a, &a));
                prop_assert_eq!(eq(&a, &b), eq(&b, &a));
                if eq(&a, &b) && eq(&b, &c) {
                    prop_assert!(eq(&a, &c));
                }
                // Minimal generating sets are unique.
                prop_assert_eq!(eq(&a, &b), a == b);
            }
        }
    }
}
