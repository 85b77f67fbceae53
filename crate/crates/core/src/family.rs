//! Enumeration of small unimodular configurations, up to relabeling and the
//! signs of the vectors.

use rayon::prelude::*;

use crate::lattice::{subsets, VectorConfig};

/// Primitive vectors of `[−b, b]^d` whose first nonzero entry is positive, sorted.
pub fn canonical_primitive_vectors(d: usize, bound: i64) -> Vec<Vec<i64>> {
    let side = (2 * bound + 1) as usize;
    let mut out = Vec::new();
    for code in 0..side.pow(d as u32) {
        let mut v = Vec::with_capacity(d);
        let mut c = code;
        for _ in 0..d {
            v.push((c % side) as i64 - bound);
            c /= side;
        }
        v.reverse();
        let Some(first) = v.iter().find(|&&x| x != 0) else {
            continue;
        };
        if *first < 0 {
            continue;
        }
        let g = v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
        if g == 1 {
            out.push(v);
        }
    }
    out.sort();
    out
}

fn det_small(rows: &[&[i64]]) -> i64 {
    match rows.len() {
        0 => 1,
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        3 => {
            let [a, b, c] = [rows[0], rows[1], rows[2]];
            a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0])
        }
        _ => unimplemented!("dimension above 3"),
    }
}

fn rank_small(vs: &[Vec<i64>], d: usize) -> usize {
    (1..=d.min(vs.len()))
        .rev()
        .find(|&r| {
            // Some r×r minor of some r vectors is nonzero.
            subsets(vs.len(), r).iter().any(|s| {
                subsets(d, r).iter().any(|cols| {
                    let rows: Vec<Vec<i64>> = s
                        .iter()
                        .map(|&i| cols.iter().map(|&j| vs[i][j]).collect())
                        .collect();
                    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
                    det_small(&refs) != 0
                })
            })
        })
        .unwrap_or(0)
}

/// All unimodular spanning configurations of `n ≤ max_n` canonical primitive
/// vectors in `[−bound, bound]^d`, `1 ≤ d ≤ max_d`, as sorted multisets.
pub fn unimodular_family(max_n: usize, max_d: usize, bound: i64) -> Vec<VectorConfig> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        let pool = canonical_primitive_vectors(d, bound);
        let found: Vec<Vec<Vec<i64>>> = (0..pool.len())
            .into_par_iter()
            .flat_map_iter(|first| {
                let mut acc = Vec::new();
                let mut chosen = vec![pool[first].clone()];
                extend(&pool, first, d, max_n, &mut chosen, &mut acc);
                acc
            })
            .collect();
        out.extend(
            found
                .into_iter()
                .map(|vs| VectorConfig::from_i64(d, &vs).expect("unimodular and spanning")),
        );
    }
    out
}

fn extend(
    pool: &[Vec<i64>],
    last: usize,
    d: usize,
    max_n: usize,
    chosen: &mut Vec<Vec<i64>>,
    acc: &mut Vec<Vec<Vec<i64>>>,
) {
    if chosen.len() >= d && rank_small(chosen, d) == d {
        acc.push(chosen.clone());
    }
    if chosen.len() == max_n {
        return;
    }
    for next in last..pool.len() {
        let v = &pool[next];
        // Only minors through the new vector need checking.
        let ok = d == 1
            || subsets(chosen.len(), d - 1).iter().all(|s| {
                let mut rows: Vec<&[i64]> = s.iter().map(|&i| chosen[i].as_slice()).collect();
                rows.push(v);
                det_small(&rows).abs() <= 1
            });
        if ok {
            chosen.push(v.clone());
            extend(pool, next, d, max_n, chosen, acc);
            chosen.pop();
        }
    }
}
