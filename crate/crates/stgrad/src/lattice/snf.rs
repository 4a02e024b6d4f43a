use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{Int, IntMatrix};

/// Smith normal form U * A * V = D with U, V unimodular and
/// D = diag(d_1, ..., d_n), d_i >= 0, d_1 | d_2 | ... | d_n.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl SmithForm {
    pub fn invariant_factors(&self) -> Vec<Int> {
        (0..self.d.n).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Smith normal form of a square integer matrix by row/column reduction.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let n = a.n;
    let mut d = a.clone();
    let mut u = IntMatrix::identity(n);
    let mut v = IntMatrix::identity(n);

    for t in 0..n {
        loop {
            // Find pivot: nonzero entry of least absolute value in the
            // remaining block, moved to (t, t).
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !d[(i, j)].is_zero() {
                        let better = match best {
                            None => true,
                            Some((bi, bj)) => d[(i, j)].abs() < d[(bi, bj)].abs(),
                        };
                        if better {
                            best = Some((i, j));
                        }
                    }
                }
            }
            let (pi, pj) = match best {
                None => break, // remaining block is zero
                Some(p) => p,
            };
            swap_rows(&mut d, &mut u, t, pi);
            swap_cols(&mut d, &mut v, t, pj);

            // Clear column t below the pivot and row t right of the pivot.
            let mut dirty = false;
            for i in t + 1..n {
                if !d[(i, t)].is_zero() {
                    let q = div_round(&d[(i, t)], &d[(t, t)]);
                    if !q.is_zero() {
                        row_axpy(&mut d, &mut u, i, t, &q);
                    }
                    if !d[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let q = div_round(&d[(t, j)], &d[(t, t)]);
                    if !q.is_zero() {
                        col_axpy(&mut d, &mut v, j, t, &q);
                    }
                    if !d[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Pivot must divide every entry of the remaining block.
            let mut fixed = true;
            'scan: for i in t + 1..n {
                for j in t + 1..n {
                    if !d[(i, j)].mod_floor(&d[(t, t)]).is_zero() {
                        // Fold row i into row t and restart this pivot.
                        let one = Int::from(-1);
                        row_axpy(&mut d, &mut u, t, i, &one);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
    }

    // Normalize signs to make diagonal entries nonnegative.
    for t in 0..n {
        if d[(t, t)].is_negative() {
            for j in 0..n {
                let x = -d[(t, j)].clone();
                d[(t, j)] = x;
                let x = -u[(t, j)].clone();
                u[(t, j)] = x;
            }
        }
    }
    SmithForm { u, v, d }
}

fn swap_rows(d: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..d.n {
        let (x, y) = (d[(a, j)].clone(), d[(b, j)].clone());
        d[(a, j)] = y;
        d[(b, j)] = x;
        let (x, y) = (u[(a, j)].clone(), u[(b, j)].clone());
        u[(a, j)] = y;
        u[(b, j)] = x;
    }
}

fn swap_cols(d: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..d.n {
        let (x, y) = (d[(i, a)].clone(), d[(i, b)].clone());
        d[(i, a)] = y;
        d[(i, b)] = x;
        let (x, y) = (v[(i, a)].clone(), v[(i, b)].clone());
        v[(i, a)] = y;
        v[(i, b)] = x;
    }
}

/// row_i -= q * row_j, mirrored on U.
fn row_axpy(d: &mut IntMatrix, u: &mut IntMatrix, i: usize, j: usize, q: &Int) {
    for c in 0..d.n {
        let x = &d[(i, c)] - q * &d[(j, c)];
        d[(i, c)] = x;
        let x = &u[(i, c)] - q * &u[(j, c)];
        u[(i, c)] = x;
    }
}

/// col_j -= q * col_k, mirrored on V.
fn col_axpy(d: &mut IntMatrix, v: &mut IntMatrix, j: usize, k: usize, q: &Int) {
    for r in 0..d.n {
        let x = &d[(r, j)] - q * &d[(r, k)];
        d[(r, j)] = x;
        let x = &v[(r, j)] - q * &v[(r, k)];
        v[(r, j)] = x;
    }
}

/// Rounded division that keeps remainders small: |a - q*b| <= |b|/2.
fn div_round(a: &Int, b: &Int) -> Int {
    let (q, r) = a.div_mod_floor(b);
    if &(r.clone() * 2) > &b.abs() {
        q + 1
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn check(a: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d, "U*A*V = D");
        assert!(s.u.det().abs() == BigInt::from(1));
        assert!(s.v.det().abs() == BigInt::from(1));
        let f = s.invariant_factors();
        for w in f.windows(2) {
            if !w[0].is_zero() {
                assert!(w[1].mod_floor(&w[0]).is_zero(), "divisibility chain");
            } else {
                assert!(w[1].is_zero());
            }
        }
        s
    }

    #[test]
    fn identity_is_fixed() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1); 3]);
    }

    #[test]
    fn already_diagonal() {
        let s = check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 4]]));
        assert_eq!(
            s.invariant_factors(),
            vec![BigInt::from(2), BigInt::from(4)]
        );
    }

    #[test]
    fn needs_divisibility_fix() {
        let s = check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(
            s.invariant_factors(),
            vec![BigInt::from(1), BigInt::from(6)]
        );
    }

    #[test]
    fn singular_input() {
        let s = check(&IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]));
        assert_eq!(
            s.invariant_factors(),
            vec![BigInt::from(1), BigInt::from(0)]
        );
    }
}
