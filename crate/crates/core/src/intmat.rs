//! Small dense integer matrices: Smith and Hermite normal forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn transpose(a: &IntMatrix, cols: usize) -> IntMatrix {
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// `u · m · v = diag(s)` with `u`, `v` unimodular and `s_i | s_{i+1}`, `s_i >= 0`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix, rows: usize, cols: usize) -> Smith {
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let steps = rows.min(cols);

    for t in 0..steps {
        // smallest nonzero entry of the trailing block becomes the pivot
        let Some((pi, pj)) = min_nonzero(&a, t, rows, cols) else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility: fold an offending row into the pivot row and retry
                let bad = (t + 1..rows).find(|&i| {
                    (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero())
                });
                match bad {
                    Some(i) => {
                        let one = -BigInt::one();
                        row_axpy(&mut a, t, i, &one);
                        row_axpy(&mut u, t, i, &one);
                    }
                    None => break,
                }
            }
            if let Some((pi, pj)) = min_nonzero_cross(&a, t, rows, cols) {
                a.swap(t, pi);
                u.swap(t, pi);
                swap_cols(&mut a, t, pj);
                swap_cols(&mut v, t, pj);
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }

    let diagonal = (0..steps).map(|i| a[i][i].clone()).collect();
    Smith { diagonal, u, v }
}

fn min_nonzero(a: &IntMatrix, t: usize, rows: usize, cols: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..rows {
        for j in t..cols {
            if a[i][j].is_zero() {
                continue;
            }
            if best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smallest nonzero entry in row `t` / column `t` of the trailing block.
fn min_nonzero_cross(a: &IntMatrix, t: usize, rows: usize, cols: usize) -> Option<(usize, usize)> {
    let mut best = (t, t);
    let mut found = !a[t][t].is_zero();
    let mut consider = |i: usize, j: usize, best: &mut (usize, usize)| {
        if !a[i][j].is_zero() && (!found || a[i][j].abs() < a[best.0][best.1].abs()) {
            *best = (i, j);
            found = true;
        }
    };
    for i in t + 1..rows {
        consider(i, t, &mut best);
    }
    for j in t + 1..cols {
        consider(t, j, &mut best);
    }
    found.then_some(best)
}

fn swap_cols(a: &mut IntMatrix, i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// `row[dst] -= q · row[src]`
fn row_axpy(a: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    let src_row = a[src].clone();
    for (x, s) in a[dst].iter_mut().zip(src_row.iter()) {
        *x -= q * s;
    }
}

/// `col[dst] -= q · col[src]`
fn col_axpy(a: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let s = row[src].clone();
        row[dst] -= q * s;
    }
}

/// Row-style Hermite normal form of the lattice spanned by `gens` (each of
/// length `dim`): echelon rows, positive pivots, entries above each pivot
/// reduced into `[0, pivot)`. Zero rows are dropped, so the result is a basis.
pub fn hermite_rows(gens: &[Vec<BigInt>], dim: usize) -> IntMatrix {
    let mut rows: IntMatrix = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut p = 0;
    for col in 0..dim {
        if p >= rows.len() {
            break;
        }
        loop {
            let pick = (p..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&i, &j| rows[i][col].abs().cmp(&rows[j][col].abs()));
            let Some(i) = pick else { break };
            rows.swap(p, i);
            let mut clean = true;
            for i in p + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[p][col]);
                row_axpy(&mut rows, i, p, &q);
                if !rows[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if p >= rows.len() || rows[p][col].is_zero() {
            continue;
        }
        if rows[p][col].is_negative() {
            for x in rows[p].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..p {
            let q = rows[i][col].div_floor(&rows[p][col]);
            if !q.is_zero() {
                row_axpy(&mut rows, i, p, &q);
            }
        }
        p += 1;
    }
    rows.truncate(p);
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    rows
}

/// Coefficients `c` with `v = Σ c_p · basis[p]` for an echelon basis, if any.
pub fn solve_in_hermite(basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest: Vec<BigInt> = v.to_vec();
    let mut coeffs = Vec::with_capacity(basis.len());
    for row in basis {
        let col = row.iter().position(|x| !x.is_zero())?;
        let (q, r) = rest[col].div_rem(&row[col]);
        if !r.is_zero() {
            return None;
        }
        for (x, b) in rest.iter_mut().zip(row.iter()) {
            *x -= &q * b;
        }
        coeffs.push(q);
    }
    rest.iter().all(|x| x.is_zero()).then_some(coeffs)
}

/// `|det|` of a square echelon basis: the product of its pivots.
pub fn hermite_index(basis: &IntMatrix) -> BigInt {
    basis
        .iter()
        .map(|row| row.iter().find(|x| !x.is_zero()).cloned().unwrap_or_default())
        .fold(BigInt::one(), |acc, p| acc * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn smith_of_known_matrix() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&a, 3, 3);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn hermite_basics() {
        let h = hermite_rows(&m(&[&[0, 3], &[2, 0]]), 2);
        assert_eq!(h, m(&[&[2, 0], &[0, 3]]));
        let h = hermite_rows(&m(&[&[4, 6], &[6, 9], &[2, 3]]), 2);
        assert_eq!(h, m(&[&[2, 3]]));
        assert_eq!(solve_in_hermite(&h, &[BigInt::from(-4), BigInt::from(-6)]), Some(vec![BigInt::from(-2)]));
        assert_eq!(solve_in_hermite(&h, &[BigInt::from(1), BigInt::from(1)]), None);
    }

    fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<Vec<i64>>)> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec(prop::collection::vec(-9i64..10, c), r))
        })
    }

    proptest! {
        #[test]
        fn smith_decomposes((r, c, raw) in small_matrix()) {
            let a: IntMatrix = raw.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let s = smith_normal_form(&a, r, c);
            let prod = mat_mul(&mat_mul(&s.u, &a), &s.v);
            for i in 0..r {
                for j in 0..c {
                    let want = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                    prop_assert_eq!(&prod[i][j], &want);
                }
            }
            for w in s.diagonal.windows(2) {
                if !w[1].is_zero() {
                    prop_assert!((&w[1] % &w[0]).is_zero());
                }
            }
        }

        #[test]
        fn hermite_is_permutation_invariant((r, c, raw) in small_matrix(), seed in 0usize..24) {
            let a: IntMatrix = raw.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let mut b = a.clone();
            let n = b.len();
            b.rotate_left(seed % n);
            if n > 1 { b.swap(0, seed % n); }
            prop_assert_eq!(hermite_rows(&a, c), hermite_rows(&b, c));
            let h = hermite_rows(&a, c);
            for g in &a {
                prop_assert!(solve_in_hermite(&h, g).is_some());
            }
            let _ = r;
        }
    }
}
