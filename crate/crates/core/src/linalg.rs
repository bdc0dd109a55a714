//! Small exact linear algebra: rational inversion/solves and integer kernels.
//!
//! Matrices here are tiny (rank at most a few dozen), so plain Gauss-Jordan
//! over `BigRational` and Euclidean column reduction over `BigInt` are enough.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn big_rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Inverts a square rational matrix. Panics on singular input; callers only
/// invert positive-definite intersection forms.
pub fn invert(m: &[Vec<BigRational>]) -> RatMatrix {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut inv: RatMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("singular matrix");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= p.clone();
            inv[col][j] /= p.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let av = a[col][j].clone();
                    let iv = inv[col][j].clone();
                    a[r][j] -= &f * av;
                    inv[r][j] -= &f * iv;
                }
            }
        }
    }
    inv
}

/// Exact determinant by fraction-free elimination over rationals.
pub fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col].clone();
        let p = a[col][col].clone();
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &p;
                for j in col..n {
                    let v = a[col][j].clone();
                    a[r][j] -= &f * v;
                }
            }
        }
    }
    det
}

/// `m * v` for a rational matrix and integer vector.
pub fn mat_vec(m: &[Vec<BigRational>], v: &[i64]) -> Vec<BigRational> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(a, &b)| a * big_rat(b))
                .sum::<BigRational>()
        })
        .collect()
}

/// Integral kernel basis of an integer matrix (rows `a` of size `rows x cols`):
/// all `x` in `Z^cols` with `a x^T = 0`, returned as basis rows.
///
/// Works by Euclidean column reduction of `a` while mirroring the column
/// operations on an identity matrix; columns that end up annihilated by the
/// reduced `a` form the kernel. The result is automatically a saturated,
/// full basis of the kernel sublattice.
pub fn integer_kernel(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();

    let col_swap = |m: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
        for row in u.iter_mut() {
            row.swap(i, j);
        }
    };
    // col_j -= f * col_i
    let col_axpy =
        |m: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, j: usize, f: &BigInt, i: usize| {
            for row in m.iter_mut() {
                let t = &row[i] * f;
                row[j] -= t;
            }
            for row in u.iter_mut() {
                let t = &row[i] * f;
                row[j] -= t;
            }
        };

    let mut lead = 0usize;
    for r in 0..rows {
        if lead >= cols {
            break;
        }
        // Euclidean reduction across columns lead..cols on row r.
        loop {
            let mut min_col = None;
            for c in lead..cols {
                if !m[r][c].is_zero() {
                    min_col = match min_col {
                        None => Some(c),
                        Some(mc) if m[r][c].magnitude() < m[r][mc].magnitude() => Some(c),
                        keep => keep,
                    };
                }
            }
            let Some(mc) = min_col else {
                break;
            };
            col_swap(&mut m, &mut u, lead, mc);
            let mut done = true;
            for c in lead + 1..cols {
                if !m[r][c].is_zero() {
                    let f = &m[r][c] / &m[r][lead]; // truncated division
                    if !f.is_zero() {
                        col_axpy(&mut m, &mut u, c, &f, lead);
                    }
                    if !m[r][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                lead += 1;
                break;
            }
        }
    }

    // Kernel = columns of u on which every row of m vanishes.
    let mut basis = Vec::new();
    for c in 0..cols {
        if (0..rows).all(|r| m[r][c].is_zero()) {
            let v: Vec<i64> = (0..cols)
                .map(|i| i64::try_from(&u[i][c]).expect("kernel entry exceeds i64"))
                .collect();
            basis.push(v);
        }
    }
    basis
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram matrix of basis rows under the standard inner product.
pub fn gram_of(basis: &[Vec<i64>]) -> Vec<Vec<i64>> {
    basis
        .iter()
        .map(|u| basis.iter().map(|v| dot(u, v)).collect())
        .collect()
}

/// Greedy size reduction of a lattice basis held as ambient-coordinate rows.
/// Repeatedly subtracts rounded projections and keeps any pairwise swap that
/// shrinks a vector. Not LLL, but ample for the desk-scale ranks used here.
pub fn reduce_basis(basis: &mut [Vec<i64>]) {
    let n = basis.len();
    if n == 0 {
        return;
    }
    let norm = |v: &[i64]| dot(v, v);
    let mut changed = true;
    let mut rounds = 0;
    while changed && rounds < 100 {
        changed = false;
        rounds += 1;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let nj = norm(&basis[j]);
                if nj == 0 {
                    continue;
                }
                let d = dot(&basis[i], &basis[j]);
                // nearest integer to d / nj
                let f = (2 * d + nj.signum() * nj).div_euclid(2 * nj);
                if f != 0 {
                    let before = norm(&basis[i]);
                    let candidate: Vec<i64> = basis[i]
                        .iter()
                        .zip(&basis[j])
                        .map(|(a, b)| a - f * b)
                        .collect();
                    if norm(&candidate) < before {
                        basis[i] = candidate;
                        changed = true;
                    }
                }
            }
        }
        basis.sort_by_key(|v| norm(v));
    }
}
