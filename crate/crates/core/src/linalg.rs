//! Exact linear algebra over the rationals.
//!
//! Ranks use fraction-free (Bareiss) elimination on integer-scaled rows; the
//! reduced row echelon form is used where an explicit basis is needed
//! (null spaces, particular solutions, pivot selection).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

fn column_count(rows: &[Vec<Rational>]) -> usize {
    rows.first().map_or(0, Vec::len)
}

/// Scales a rational row by the lcm of its denominators.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
}

/// Rank by Bareiss fraction-free elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let cols = column_count(rows);
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = pivot_row[c].clone();
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let scaled = &pivot * &row[j];
                let value = if factor.is_zero() || pivot_row[j].is_zero() {
                    scaled
                } else {
                    scaled - &factor * &pivot_row[j]
                };
                row[j] = if value.is_zero() { value } else { value / &prev };
            }
            row[c] = BigInt::zero();
        }
        prev = pivot;
        r += 1;
    }
    r
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(rows: &mut Matrix) -> Vec<usize> {
    let cols = column_count(rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for q in rows[r].iter_mut() {
            *q *= &inv;
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].clone();
            for j in c..cols {
                if rows[r][j].is_zero() {
                    continue;
                }
                let delta = &factor * &rows[r][j];
                rows[i][j] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : rows · x = 0}` in ambient dimension `cols`.
pub fn nullspace(rows: &[Vec<Rational>], cols: usize) -> Matrix {
    let mut m: Matrix = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// A particular solution of `a · x = b` (free variables set to zero).
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = column_count(a);
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][cols].clone();
    }
    Some(x)
}

/// Indices of a maximal linearly independent subset of `vectors`, chosen greedily.
pub fn independent_subset(vectors: &[Vec<Rational>]) -> Vec<usize> {
    let cols: Matrix = transpose(vectors);
    let mut m = cols;
    rref(&mut m)
}

pub fn transpose(rows: &[Vec<Rational>]) -> Matrix {
    let cols = column_count(rows);
    (0..cols).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Determinant by fraction-free elimination.
pub fn determinant(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    let mut m: Matrix = rows.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pivot = m[c][c].clone();
        det *= &pivot;
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] / &pivot;
            for j in c..n {
                let delta = &factor * &m[c][j];
                m[i][j] -= delta;
            }
        }
    }
    det
}

pub fn inverse(rows: &[Vec<Rational>]) -> Option<Matrix> {
    let n = rows.len();
    let mut aug: Matrix = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Matrix {
    let inner = column_count(a);
    let cols = column_count(b);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner)
                        .filter(|&k| !row[k].is_zero() && !b[k][j].is_zero())
                        .map(|k| &row[k] * &b[k][j])
                        .fold(Rational::zero(), |acc, x| acc + x)
                })
                .collect()
        })
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Gram matrix of a family of vectors.
pub fn gram(vectors: &[Vec<Rational>]) -> Matrix {
    vectors.iter().map(|u| vectors.iter().map(|v| dot(u, v)).collect()).collect()
}

/// Sylvester's criterion: all leading principal minors positive.
pub fn is_positive_definite(rows: &[Vec<Rational>]) -> bool {
    (1..=rows.len()).all(|k| {
        let minor: Matrix = rows[..k].iter().map(|r| r[..k].to_vec()).collect();
        determinant(&minor).is_positive()
    })
}

/// Incrementally maintained row-reduced basis of a subspace.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v`; returns whether it was independent of the current span.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let mut w = v.to_vec();
        for (pivot, row) in &self.rows {
            if w[*pivot].is_zero() {
                continue;
            }
            let factor = w[*pivot].clone();
            for (x, r) in w.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &factor * r;
                }
            }
        }
        let Some(pivot) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[pivot].recip();
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[pivot].is_zero() {
                continue;
            }
            let factor = row[pivot].clone();
            for (x, r) in row.iter_mut().zip(&w) {
                if !r.is_zero() {
                    *x -= &factor * r;
                }
            }
        }
        self.rows.push((pivot, w));
        true
    }
}
