//! Vectors, matrices and polynomial interpolation over labels.
//!
//! Everything here goes through a [`RingOracle`]; nothing inspects label bytes except for
//! equality tests, which the labelling guarantees are meaningful.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{Label, RingOracle};

/// Dense row-major matrix of ring elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Label>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<Label>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::param("ragged matrix rows"));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Label) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn random(o: &mut RingOracle, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| o.sample())
    }

    pub fn identity(o: &mut RingOracle, n: usize) -> Matrix {
        let zero = o.zero();
        let one = o.one();
        Matrix::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Label {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Label) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Label] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Label] {
        &self.data
    }

    /// Rows at `idx`, in that order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn mul_vec(&self, o: &mut RingOracle, v: &[Label]) -> Result<Vec<Label>> {
        if v.len() != self.cols {
            return Err(Error::param(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        (0..self.rows).map(|i| dot(o, self.row(i), v)).collect()
    }

    pub fn mul(&self, o: &mut RingOracle, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::param("matrix dimension mismatch"));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let col: Vec<Label> = (0..other.rows).map(|l| other.get(l, j).clone()).collect();
                data.push(dot(o, self.row(i), &col)?);
            }
        }
        Ok(Matrix { rows: self.rows, cols: other.cols, data })
    }

    pub fn is_identity(&self, o: &mut RingOracle) -> bool {
        self.rows == self.cols && *self == Matrix::identity(o, self.rows)
    }

    /// Gauss–Jordan inversion. A pivot is any entry the oracle can invert, so this also works
    /// over pseudo-fields as long as unit pivots can be found.
    pub fn invert(&self, o: &mut RingOracle) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::param("cannot invert a non-square matrix"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(o, n);
        for col in 0..n {
            let mut pivot = None;
            for r in col..n {
                if let Ok(p) = o.invert(a.get(r, col)) {
                    pivot = Some((r, p));
                    break;
                }
            }
            let (pr, pinv) = pivot.ok_or(Error::NotInvertible)?;
            a.swap_rows(col, pr);
            inv.swap_rows(col, pr);
            for j in 0..n {
                let x = o.mul(&pinv, a.get(col, j))?;
                a.set(col, j, x);
                let y = o.mul(&pinv, inv.get(col, j))?;
                inv.set(col, j, y);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let t = o.mul(&f, a.get(col, j))?;
                    let x = o.sub(a.get(r, j), &t)?;
                    a.set(r, j, x);
                    let t = o.mul(&f, inv.get(col, j))?;
                    let y = o.sub(inv.get(r, j), &t)?;
                    inv.set(r, j, y);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// `Σ a_i · b_i`, each product with `a_i` on the left.
pub fn dot(o: &mut RingOracle, a: &[Label], b: &[Label]) -> Result<Label> {
    let mut acc = o.zero();
    for (x, y) in a.iter().zip(b) {
        let p = o.mul(x, y)?;
        acc = o.add(&acc, &p)?;
    }
    Ok(acc)
}

pub fn add_vec(o: &mut RingOracle, a: &[Label], b: &[Label]) -> Result<Vec<Label>> {
    a.iter().zip(b).map(|(x, y)| o.add(x, y)).collect()
}

pub fn sub_vec(o: &mut RingOracle, a: &[Label], b: &[Label]) -> Result<Vec<Label>> {
    a.iter().zip(b).map(|(x, y)| o.sub(x, y)).collect()
}

/// `s · v_i` for every entry.
pub fn scale_left(o: &mut RingOracle, s: &Label, v: &[Label]) -> Result<Vec<Label>> {
    v.iter().map(|x| o.mul(s, x)).collect()
}

/// The field elements `lo, lo+1, ..., hi` (inclusive, possibly negative), built from `one`.
pub fn int_points(o: &mut RingOracle, lo: i64, hi: i64) -> Vec<Label> {
    let one = o.one();
    let mut start = o.zero();
    if lo >= 0 {
        for _ in 0..lo {
            start = o.add(&start, &one).expect("valid");
        }
    } else {
        for _ in 0..(-lo) {
            start = o.sub(&start, &one).expect("valid");
        }
    }
    let mut out = Vec::new();
    let mut cur = start;
    for _ in lo..=hi {
        out.push(cur.clone());
        cur = o.add(&cur, &one).expect("valid");
    }
    out
}

pub fn all_distinct(points: &[Label]) -> bool {
    let mut sorted: Vec<&Label> = points.iter().collect();
    sorted.sort();
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// Matrix `M` with `M v = (P(to_1), ..., P(to_m))` for the unique polynomial `P` of degree
/// `< from.len()` with `P(from_j) = v_j`. Requires a commutative ring in which the pairwise
/// differences of `from` are units.
///
/// Barycentric form with prefix/suffix products: `|from|` inversions in total.
pub fn lagrange_matrix(o: &mut RingOracle, from: &[Label], to: &[Label]) -> Result<Matrix> {
    let m = from.len();
    if m == 0 {
        return Err(Error::param("interpolation needs at least one point"));
    }
    let mut weights = Vec::with_capacity(m);
    for j in 0..m {
        let mut d = o.one();
        for l in 0..m {
            if l != j {
                let diff = o.sub(&from[j], &from[l])?;
                d = o.mul(&d, &diff)?;
            }
        }
        weights.push(o.invert(&d)?);
    }
    let mut rows = Vec::with_capacity(to.len());
    for z in to {
        let diffs: Vec<Label> = from.iter().map(|f| o.sub(z, f)).collect::<Result<_>>()?;
        // prefix[j] = Π_{l<j} diffs[l], suffix[j] = Π_{l>j} diffs[l]
        let mut prefix = Vec::with_capacity(m);
        let mut acc = o.one();
        for d in &diffs {
            prefix.push(acc.clone());
            acc = o.mul(&acc, d)?;
        }
        let mut suffix = vec![acc.clone(); m];
        let mut acc = o.one();
        for j in (0..m).rev() {
            suffix[j] = acc.clone();
            acc = o.mul(&acc, &diffs[j])?;
        }
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let p = o.mul(&prefix[j], &suffix[j])?;
            row.push(o.mul(&p, &weights[j])?);
        }
        rows.push(row);
    }
    Matrix::from_rows(rows)
}

/// Horner evaluation of `Σ c_i z^i`.
pub fn eval_poly(o: &mut RingOracle, coeffs: &[Label], z: &Label) -> Result<Label> {
    let mut acc = o.zero();
    for c in coeffs.iter().rev() {
        acc = o.mul(&acc, z)?;
        acc = o.add(&acc, c)?;
    }
    Ok(acc)
}
