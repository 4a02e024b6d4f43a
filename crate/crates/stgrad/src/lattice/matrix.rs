use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Int, Rat};

/// Dense square integer matrix with exact big-integer entries.
///
/// Entries are stored row-major. Intermediate Smith normal form pivots
/// overflow 64 bits already for 8x8 inputs, so everything here is BigInt.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    pub n: usize,
    pub entries: Vec<Int>,
}

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix {
            n,
            entries: vec![Int::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        IntMatrix {
            n,
            entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn from_i64(n: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = BigInt::from(f(i, j));
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn add_scaled_identity(&self, c: i64) -> IntMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out[(i, i)] += BigInt::from(c);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Int {
        let n = self.n;
        if n == 0 {
            return Int::one();
        }
        let mut a: Vec<Vec<Int>> = (0..n)
            .map(|i| (0..n).map(|j| self[(i, j)].clone()).collect())
            .collect();
        let mut sign = 1i32;
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let swap = (k + 1..n).find(|&i| !a[i][k].is_zero());
                match swap {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Inverse of a unimodular matrix (determinant +-1). Panics otherwise.
    pub fn inverse_unimodular(&self) -> IntMatrix {
        let n = self.n;
        // Gauss-Jordan over Q, then the result is integral because det = +-1.
        let mut a: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Rat::from(self[(i, j)].clone()))
                    .collect()
            })
            .collect();
        let mut b: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Rat::one()
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .expect("matrix is singular");
            a.swap(col, piv);
            b.swap(col, piv);
            let inv = a[col][col].recip();
            for j in 0..n {
                a[col][j] = &a[col][j] * &inv;
                b[col][j] = &b[col][j] * &inv;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        let d = &a[col][j] * &f;
                        a[r][j] = &a[r][j] - d;
                        let d = &b[col][j] * &f;
                        b[r][j] = &b[r][j] - d;
                    }
                }
            }
        }
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                assert!(b[i][j].is_integer(), "matrix is not unimodular");
                out[(i, j)] = b[i][j].to_integer();
            }
        }
        out
    }

    /// Apply to an integer column vector.
    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Apply to a rational column vector.
    pub fn apply_rat(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| Rat::from(self[(i, j)].clone()) * &v[j])
                    .sum()
            })
            .collect()
    }

    /// Characteristic polynomial det(z*I - M), exact, as coefficient vector
    /// (low degree first). Computed by Lagrange interpolation at integer nodes.
    pub fn char_poly(&self) -> Vec<Int> {
        let n = self.n;
        // Evaluate det(xI - M) at x = 0..n and interpolate.
        let vals: Vec<Int> = (0..=n as i64)
            .map(|x| {
                let mut m = IntMatrix::zero(n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = if i == j {
                            BigInt::from(x) - &self[(i, j)]
                        } else {
                            -self[(i, j)].clone()
                        };
                    }
                }
                m.det()
            })
            .collect();
        // Lagrange interpolation over Q; result is integral (monic integer poly).
        let mut coeffs = vec![Rat::zero(); n + 1];
        for (k, vk) in vals.iter().enumerate() {
            // basis polynomial prod_{j != k} (x - j)/(k - j)
            let mut basis = vec![Rat::zero(); n + 1];
            basis[0] = Rat::one();
            let mut deg = 0usize;
            let mut denom = Rat::one();
            for j in 0..=n {
                if j == k {
                    continue;
                }
                // multiply basis by (x - j)
                let mut next = vec![Rat::zero(); n + 1];
                for (d, c) in basis.iter().enumerate().take(deg + 1) {
                    next[d + 1] += c;
                    next[d] -= c * Rat::from(BigInt::from(j as i64));
                }
                deg += 1;
                basis = next;
                denom *= Rat::from(BigInt::from(k as i64 - j as i64));
            }
            let scale = Rat::from(vk.clone()) / denom;
            for d in 0..=n {
                let add = &basis[d] * &scale;
                coeffs[d] += add;
            }
        }
        coeffs
            .into_iter()
            .map(|c| {
                assert!(c.is_integer(), "char poly must be integral");
                c.to_integer()
            })
            .collect()
    }

    /// Multiplicative order of the matrix, or None if it exceeds the bound.
    pub fn order(&self, bound: usize) -> Option<usize> {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_identity() {
                return Some(k);
            }
            p = p.mul(self);
        }
        None
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.entries[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.entries[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(m.det(), BigInt::from(1));
        let inv = m.inverse_unimodular();
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn char_poly_of_companion() {
        // companion matrix of z^2 - z - 1
        let m = IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]]);
        let cp = m.char_poly();
        assert_eq!(cp, vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
    }
}
