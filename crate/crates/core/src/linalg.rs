//! Dense multiprecision linear algebra for the small systems in this crate.

use std::cmp::Ordering;

use rug::Float;

/// Square matrix stored by rows.
#[derive(Clone, Debug)]
pub struct Matrix {
    n: usize,
    data: Vec<Float>,
}

impl Matrix {
    pub fn zeros(n: usize, bits: u32) -> Self {
        Self { n, data: vec![Float::new(bits); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.n + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Float {
        &mut self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Float) {
        self.data[i * self.n + j] = v;
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Matrix {
        let bits = self.data.first().map_or(64, Float::prec);
        let mut out = Matrix::zeros(k, bits);
        for i in 0..k {
            for j in 0..k {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Float]) -> Vec<Float> {
        let bits = x.first().map_or(64, Float::prec);
        (0..self.n)
            .map(|i| {
                let mut s = Float::new(bits);
                for (j, xj) in x.iter().enumerate() {
                    s += Float::with_val(bits, self.get(i, j) * xj);
                }
                s
            })
            .collect()
    }

    /// `self - sigma * other`.
    pub fn shifted(&self, sigma: &Float, other: &Matrix) -> Matrix {
        let bits = sigma.prec();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| Float::with_val(bits, a - Float::with_val(bits, sigma * b)))
            .collect();
        Matrix { n: self.n, data }
    }
}

pub fn dot(x: &[Float], y: &[Float]) -> Float {
    let bits = x.first().map_or(64, Float::prec);
    let mut s = Float::new(bits);
    for (a, b) in x.iter().zip(y) {
        s += Float::with_val(bits, a * b);
    }
    s
}

/// Gaussian elimination with partial pivoting on an augmented `m x (m+1)`
/// row set. Returns `None` if a pivot falls to `threshold` or below.
pub fn solve_augmented(a: &mut [Vec<Float>], m: usize, threshold: &Float) -> Option<Vec<Float>> {
    let bits = a[0][0].prec();
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| {
            let (ax, ay) = (a[x][col].clone().abs(), a[y][col].clone().abs());
            ax.partial_cmp(&ay).unwrap_or(Ordering::Equal)
        })?;
        if a[pivot][col].clone().abs() <= *threshold {
            return None;
        }
        a.swap(col, pivot);
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let f = Float::with_val(bits, &row[col] / &pivot_row[col]);
            for k in col..=m {
                let t = Float::with_val(bits, &f * &pivot_row[k]);
                row[k] -= t;
            }
        }
    }
    let mut x = vec![Float::new(bits); m];
    for row in (0..m).rev() {
        let mut s = a[row][m].clone();
        for k in row + 1..m {
            s -= Float::with_val(bits, &a[row][k] * &x[k]);
        }
        x[row] = s / &a[row][row];
    }
    Some(x)
}

/// Solves `a x = b`; `None` if `a` is numerically singular.
pub fn solve(a: &Matrix, b: &[Float]) -> Option<Vec<Float>> {
    let n = a.dim();
    let bits = b.first().map_or(64, Float::prec);
    let mut rows: Vec<Vec<Float>> = (0..n)
        .map(|i| {
            let mut r: Vec<Float> = (0..n).map(|j| Float::with_val(bits, a.get(i, j))).collect();
            r.push(b[i].clone());
            r
        })
        .collect();
    let threshold = Float::new(bits);
    solve_augmented(&mut rows, n, &threshold)
}

/// Number of negative pivots of the unpivoted `L D L^T` factorization,
/// which by Sylvester's law equals the number of negative eigenvalues.
/// A vanishing pivot is replaced by a tiny positive one, so an eigenvalue
/// exactly at zero is not counted.
pub fn negative_inertia(a: &Matrix) -> usize {
    let n = a.dim();
    let bits = a.data.first().map_or(64, Float::prec);
    let mut w: Vec<Vec<Float>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j).clone()).collect()).collect();
    let scale = (0..n).fold(Float::with_val(bits, 1), |m, i| m + Float::with_val(bits, a.get(i, i).abs_ref()));
    let tiny = scale >> bits;
    let mut negatives = 0;
    for k in 0..n {
        let mut d = w[k][k].clone();
        if d.is_zero() {
            d = tiny.clone();
        }
        if d.is_sign_negative() {
            negatives += 1;
        }
        for i in k + 1..n {
            if w[i][k].is_zero() {
                continue;
            }
            let f = Float::with_val(bits, &w[i][k] / &d);
            for j in k + 1..=i {
                let t = Float::with_val(bits, &f * &w[k][j]);
                w[i][j] -= t;
            }
        }
        // keep the lower triangle consistent for the next step
        for i in k + 1..n {
            for j in k + 1..i {
                let v = w[i][j].clone();
                w[j][i] = v;
            }
        }
    }
    negatives
}

/// True if the symmetric matrix admits a Cholesky factorization with all
/// pivots above `2^(-bits/2)` times its largest diagonal entry.
pub fn is_positive_definite(a: &Matrix) -> bool {
    let n = a.dim();
    let bits = a.data.first().map_or(64, Float::prec);
    let scale = (0..n).map(|i| a.get(i, i).clone()).fold(Float::new(bits), |m, x| if x > m { x } else { m });
    let floor = Float::with_val(bits, &scale) >> (bits / 2);
    let mut l = vec![vec![Float::new(bits); n]; n];
    for j in 0..n {
        let mut d = a.get(j, j).clone();
        for k in 0..j {
            d -= Float::with_val(bits, l[j][k].square_ref());
        }
        if d <= floor {
            return false;
        }
        let root = d.sqrt();
        for i in j + 1..n {
            let mut s = a.get(i, j).clone();
            for k in 0..j {
                s -= Float::with_val(bits, &l[i][k] * &l[j][k]);
            }
            l[i][j] = s / &root;
        }
        l[j][j] = root;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[f64]], bits: u32) -> Matrix {
        let n = rows.len();
        let mut m = Matrix::zeros(n, bits);
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, Float::with_val(bits, *v));
            }
        }
        m
    }

    #[test]
    fn solves_a_small_system() {
        let a = from_rows(&[&[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0], &[3.0, 0.0, 1.0]], 128);
        let b: Vec<Float> = [5.0, 3.0, 6.0].iter().map(|v| Float::with_val(128, *v)).collect();
        let x = solve(&a, &b).unwrap();
        let back = a.mul_vec(&x);
        for (u, v) in back.iter().zip(&b) {
            assert!(Float::with_val(128, u - v).abs() < 1e-30);
        }
    }

    #[test]
    fn singular_system_is_detected() {
        let a = from_rows(&[&[1.0, 2.0], &[2.0, 4.0]], 128);
        let b = vec![Float::with_val(128, 1), Float::with_val(128, 1)];
        assert!(solve(&a, &b).is_none());
    }

    #[test]
    fn inertia_counts_negative_eigenvalues() {
        // eigenvalues 1, 3 of [[2,1],[1,2]]
        let a = from_rows(&[&[2.0, 1.0], &[1.0, 2.0]], 128);
        let id = from_rows(&[&[1.0, 0.0], &[0.0, 1.0]], 128);
        for (sigma, count) in [(0.5, 0), (2.0, 1), (3.5, 2)] {
            let s = a.shifted(&Float::with_val(128, sigma), &id);
            assert_eq!(negative_inertia(&s), count);
        }
    }

    #[test]
    fn inertia_of_a_larger_tridiagonal() {
        // second-difference matrix: eigenvalues 2 - 2 cos(k pi / (n+1))
        let n = 8;
        let bits = 128;
        let mut a = Matrix::zeros(n, bits);
        let mut id = Matrix::zeros(n, bits);
        for i in 0..n {
            a.set(i, i, Float::with_val(bits, 2));
            id.set(i, i, Float::with_val(bits, 1));
            if i + 1 < n {
                a.set(i, i + 1, Float::with_val(bits, -1));
                a.set(i + 1, i, Float::with_val(bits, -1));
            }
        }
        let expected = |sigma: f64| {
            (1..=n).filter(|&k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos() < sigma).count()
        };
        for sigma in [0.1, 0.9, 1.7, 2.5, 3.3, 3.99] {
            let s = a.shifted(&Float::with_val(bits, sigma), &id);
            assert_eq!(negative_inertia(&s), expected(sigma), "sigma {sigma}");
        }
    }

    #[test]
    fn positive_definiteness() {
        assert!(is_positive_definite(&from_rows(&[&[2.0, 1.0], &[1.0, 2.0]], 128)));
        assert!(!is_positive_definite(&from_rows(&[&[1.0, 2.0], &[2.0, 1.0]], 128)));
    }
}
