//! Small exact integer matrices and linear solves.
//!
//! Everything here is desk-scale (rank at most a handful), so the
//! implementations favor exactness and clarity over asymptotics: i128
//! fraction-free elimination, no pivot heuristics.

/// Dense square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct IntMat {
    n: usize,
    a: Vec<i64>,
}

impl IntMat {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        IntMat { n, a }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix rows must be square");
            a.extend_from_slice(r);
        }
        IntMat { n, a }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| self.a[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &IntMat) -> IntMat {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut a = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let s = self.a[i * n + k];
                if s == 0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] += s * rhs.a[k * n + j];
                }
            }
        }
        IntMat { n, a }
    }

    /// Column-vector action `self * v`.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.a[i * self.n + j] * v[j]).sum())
            .collect()
    }

    /// Row-vector action `v * self` (i.e. the transpose applied to `v`).
    pub fn apply_transpose(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|j| (0..self.n).map(|i| v[i] * self.a[i * self.n + j]).sum())
            .collect()
    }
}

/// Solves `A x = b` exactly over the rationals by fraction-free Gaussian
/// elimination. `a` is given by rows and may be non-square (rows >= cols is
/// fine); a solution is returned as `(numerators, denominator)` with the
/// denominator positive. Returns `None` if the system is inconsistent or the
/// solution is not unique.
pub fn solve_rational(a: &[Vec<i64>], b: &[i64]) -> Option<(Vec<i128>, i128)> {
    let rows = a.len();
    if rows == 0 || rows != b.len() {
        return None;
    }
    let cols = a[0].len();
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row: Vec<i128> = r.iter().map(|&x| x as i128).collect();
            row.push(bi as i128);
            row
        })
        .collect();

    let mut pivot_row_of_col = vec![usize::MAX; cols];
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let (pc, rc) = (m[rank][col], m[r][col]);
                for k in 0..=cols {
                    m[r][k] = m[r][k] * pc - m[rank][k] * rc;
                }
                let g = row_gcd(&m[r]);
                if g > 1 {
                    for v in m[r].iter_mut() {
                        *v /= g;
                    }
                }
            }
        }
        pivot_row_of_col[col] = rank;
        rank += 1;
    }
    // Inconsistent system: zero row with nonzero rhs.
    for r in rank..rows {
        if m[r][cols] != 0 {
            return None;
        }
    }
    if rank < cols {
        return None; // underdetermined
    }

    // Back out x_col = rhs / pivot with a common positive denominator.
    let mut den: i128 = 1;
    for col in 0..cols {
        den = lcm128(den, m[pivot_row_of_col[col]][col].abs());
    }
    let mut num = vec![0i128; cols];
    for col in 0..cols {
        let r = pivot_row_of_col[col];
        num[col] = m[r][cols] * (den / m[r][col].abs()) * m[r][col].signum();
    }
    Some((num, den))
}

/// Solves `sum_i c_i * basis[i] = target` over the integers.
pub fn solve_integer(basis: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
    if basis.is_empty() {
        return if target.iter().all(|&x| x == 0) {
            Some(vec![])
        } else {
            None
        };
    }
    let dim = target.len();
    // Columns of the system matrix are the basis vectors.
    let rows: Vec<Vec<i64>> = (0..dim)
        .map(|d| basis.iter().map(|v| v[d]).collect())
        .collect();
    let (num, den) = solve_rational(&rows, target)?;
    num.iter()
        .map(|&n| {
            if n % den == 0 {
                i64::try_from(n / den).ok()
            } else {
                None
            }
        })
        .collect()
}

fn row_gcd(row: &[i128]) -> i128 {
    row.iter().fold(0i128, |acc, &x| gcd128(acc, x.abs()))
}

fn gcd128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd128(b, a % b)
    }
}

fn lcm128(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd128(a, b) * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_and_apply() {
        let m = IntMat::from_rows(&[vec![1, 2], vec![3, 4]]);
        let id = IntMat::identity(2);
        assert_eq!(m.mul(&id), m);
        assert_eq!(m.apply(&[1, 1]), vec![3, 7]);
        assert_eq!(m.apply_transpose(&[1, 1]), vec![4, 6]);
    }

    #[test]
    fn solve_exact() {
        let a = vec![vec![2, 1], vec![1, 3]];
        let (num, den) = solve_rational(&a, &[5, 10]).unwrap();
        // x = 1, y = 3
        assert_eq!(num[0] / den, 1);
        assert_eq!(num[1] / den, 3);
        assert_eq!(num[0] % den, 0);
    }

    #[test]
    fn solve_integer_detects_nonintegral() {
        let basis = vec![vec![2, 0], vec![0, 2]];
        assert_eq!(solve_integer(&basis, &[4, 2]), Some(vec![2, 1]));
        assert_eq!(solve_integer(&basis, &[3, 2]), None);
    }

    #[test]
    fn solve_inconsistent() {
        let a = vec![vec![1, 1], vec![2, 2]];
        assert!(solve_rational(&a, &[1, 3]).is_none());
    }
}
