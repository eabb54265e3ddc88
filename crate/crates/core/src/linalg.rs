//! Exact sparse linear algebra over the rationals.
//!
//! Rows are cleared to primitive integer vectors and reduced fraction-free:
//! `r_i <- p*r_i - a*r_pivot`, followed by removal of the integer content.
//! The pivot in each column is the entry of smallest bit size, ties going to
//! the lowest row, so results are reproducible.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type IntRow = Vec<(usize, BigInt)>;

/// Sparse matrix with rational entries.
#[derive(Clone, Debug, Default)]
pub struct Matrix {
    ncols: usize,
    rows: Vec<Vec<(usize, BigRational)>>,
}

impl Matrix {
    pub fn new(ncols: usize) -> Matrix {
        Matrix {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn from_dense(ncols: usize, rows: &[Vec<BigRational>]) -> Matrix {
        let mut m = Matrix::new(ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "row length mismatch");
            m.push_row(r.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect());
        }
        m
    }

    /// Adds a row given as `(column, value)` pairs; zero entries are dropped.
    pub fn push_row(&mut self, mut row: Vec<(usize, BigRational)>) {
        row.retain(|(_, c)| !c.is_zero());
        row.sort_by_key(|(k, _)| *k);
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(row.iter().all(|(k, _)| *k < self.ncols), "column out of range");
        self.rows.push(row);
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, BigRational)>] {
        &self.rows
    }

    pub fn echelon(&self) -> Echelon {
        let mut rows: Vec<IntRow> = self
            .rows
            .iter()
            .map(|r| clear_denominators(r))
            .filter(|r| !r.is_empty())
            .collect();
        let mut pivots = Vec::new();
        let mut done = 0;
        for col in 0..self.ncols {
            let pick = (done..rows.len())
                .filter_map(|i| entry(&rows[i], col).map(|v| (v.bits(), i)))
                .min();
            let Some((_, p)) = pick else { continue };
            rows.swap(done, p);
            let pivot_row = std::mem::take(&mut rows[done]);
            let pv = entry(&pivot_row, col).unwrap().clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == done {
                    continue;
                }
                if let Some(a) = entry(row, col).cloned() {
                    *row = combine(&pv, row, &a, &pivot_row);
                }
            }
            rows[done] = pivot_row;
            pivots.push(col);
            done += 1;
        }
        rows.truncate(done);
        // Positive pivots make the form canonical.
        for r in rows.iter_mut() {
            if r[0].1.is_negative() {
                for (_, v) in r.iter_mut() {
                    *v = -&*v;
                }
            }
        }
        Echelon {
            ncols: self.ncols,
            rows,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        self.echelon().nullspace()
    }
}

/// Reduced row echelon form with integer rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<IntRow>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut free = Vec::new();
        let mut p = self.pivots.iter().peekable();
        for c in 0..self.ncols {
            if p.peek() == Some(&&c) {
                p.next();
            } else {
                free.push(c);
            }
        }
        free
    }

    /// One kernel vector per free column, with a 1 in that column and 0 in
    /// the other free columns.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![BigRational::zero(); self.ncols];
                v[f] = BigRational::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if let Some(a) = entry(row, f) {
                        let pv = entry(row, p).unwrap();
                        v[p] = -BigRational::new(a.clone(), pv.clone());
                    }
                }
                v
            })
            .collect()
    }
}

fn entry(row: &IntRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |(k, _)| *k)
        .ok()
        .map(|i| &row[i].1)
}

fn clear_denominators(row: &[(usize, BigRational)]) -> IntRow {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let out = row
        .iter()
        .map(|(k, c)| (*k, c.numer() * (&l / c.denom())))
        .collect();
    make_primitive(out)
}

fn make_primitive(mut row: IntRow) -> IntRow {
    let g = row
        .iter()
        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for (_, c) in row.iter_mut() {
            *c = &*c / &g;
        }
    }
    row
}

/// `p*r - a*s`, made primitive.
fn combine(p: &BigInt, r: &IntRow, a: &BigInt, s: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(r.len() + s.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < s.len() {
        let (k, v) = match (r.get(i), s.get(j)) {
            (Some((kr, vr)), Some((ks, _))) if kr < ks => {
                i += 1;
                (*kr, p * vr)
            }
            (Some((kr, vr)), Some((ks, vs))) if kr == ks => {
                i += 1;
                j += 1;
                (*kr, p * vr - a * vs)
            }
            (Some((kr, vr)), None) => {
                i += 1;
                (*kr, p * vr)
            }
            (_, Some((ks, vs))) => {
                j += 1;
                (*ks, -(a * vs))
            }
            (None, None) => unreachable!(),
        };
        if !v.is_zero() {
            out.push((k, v));
        }
    }
    make_primitive(out)
}

/// Rank of a set of dense vectors.
pub fn rank(vectors: &[Vec<BigRational>]) -> usize {
    let Some(n) = vectors.first().map(Vec::len) else {
        return 0;
    };
    Matrix::from_dense(n, vectors).rank()
}

/// Coefficients `c` with `target = sum c_i * vectors[i]`, if any exist.
pub fn solve_combination(vectors: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = vectors.len();
    let mut m = Matrix::new(k + 1);
    for (d, t) in target.iter().enumerate() {
        let mut row: Vec<(usize, BigRational)> = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v[d].clone()))
            .collect();
        row.push((k, t.clone()));
        m.push_row(row);
    }
    let e = m.echelon();
    if e.pivots().contains(&k) {
        return None;
    }
    let v = e.nullspace().into_iter().find(|v| v[k].is_one())?;
    Some(v[..k].iter().map(|c| -c).collect())
}
