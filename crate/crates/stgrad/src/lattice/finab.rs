use num_traits::{ToPrimitive, Zero};

use super::{mod1, smith_normal_form, Int, IntMatrix, QmodZVec, Rat};

/// Element of a [`FinAbGroup`], coordinates a_i mod d_i over the invariant
/// factors with d_i > 1.
pub type GroupElt = Vec<u64>;

/// A finite abelian group presented by invariant factors d_1 | d_2 | ... ,
/// realized as a subgroup of (Q/Z)^n.
///
/// Constructed as the fixed points of a lattice automorphism M on the torus
/// (C^*)^n = Z^n (x) C^*: the subgroup {q in (Q/Z)^n : (M-1) q = 0}, which is
/// isomorphic to coker(M - 1) when M - 1 is nonsingular.
#[derive(Debug, Clone)]
pub struct FinAbGroup {
    /// Invariant factors > 1, in divisibility order.
    pub factors: Vec<u64>,
    /// Ambient dimension n.
    pub dim: usize,
    /// Realized generators, one per invariant factor.
    pub gens: Vec<QmodZVec>,
    /// A = M - 1 from the construction.
    amat: IntMatrix,
    /// U from the Smith form of A.
    umat: IntMatrix,
    /// All n diagonal entries of D (including 1's), aligned with U rows.
    all_factors: Vec<u64>,
    /// Positions in 0..n where d_i > 1.
    keep: Vec<usize>,
}

impl FinAbGroup {
    /// Fixed points of the torus automorphism with cocharacter matrix M.
    /// Fails when det(M - 1) = 0 (automorphism is not elliptic).
    pub fn torus_fixed_points(m: &IntMatrix) -> Result<FinAbGroup, String> {
        let n = m.n;
        let a = m.add_scaled_identity(-1);
        if a.det().is_zero() {
            return Err("det(M - 1) = 0: fixed-point group is not finite".into());
        }
        let s = smith_normal_form(&a);
        let inv = s.invariant_factors();
        let all_factors: Vec<u64> = inv
            .iter()
            .map(|d| d.to_u64().expect("invariant factor fits u64"))
            .collect();
        let keep: Vec<usize> = (0..n).filter(|&i| all_factors[i] > 1).collect();
        let factors: Vec<u64> = keep.iter().map(|&i| all_factors[i]).collect();
        // Generator for factor d_i: column i of V divided by d_i, mod 1.
        let gens: Vec<QmodZVec> = keep
            .iter()
            .map(|&i| {
                let d = Int::from(all_factors[i]);
                QmodZVec::new(
                    (0..n)
                        .map(|r| Rat::new(s.v[(r, i)].clone(), d.clone()))
                        .collect(),
                )
            })
            .collect();
        Ok(FinAbGroup {
            factors,
            dim: n,
            gens,
            amat: a,
            umat: s.u,
            all_factors,
            keep,
        })
    }

    /// Trivial group inside (Q/Z)^n.
    pub fn trivial(n: usize) -> FinAbGroup {
        let m = IntMatrix::from_i64(n, |i, j| if i == j { 2 } else { 0 });
        // M = 2*I gives A = I, whose cokernel is trivial.
        FinAbGroup::torus_fixed_points(&m).unwrap()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn identity(&self) -> GroupElt {
        vec![0; self.factors.len()]
    }

    pub fn add(&self, a: &GroupElt, b: &GroupElt) -> GroupElt {
        a.iter()
            .zip(b)
            .zip(&self.factors)
            .map(|((x, y), d)| (x + y) % d)
            .collect()
    }

    pub fn neg(&self, a: &GroupElt) -> GroupElt {
        a.iter()
            .zip(&self.factors)
            .map(|(x, d)| (d - x % d) % d)
            .collect()
    }

    pub fn elt_order(&self, a: &GroupElt) -> u64 {
        a.iter()
            .zip(&self.factors)
            .map(|(x, d)| d / num_integer::gcd(*x, *d))
            .fold(1, num_integer::lcm)
    }

    /// Realize an element as a vector in (Q/Z)^n.
    pub fn realize(&self, a: &GroupElt) -> QmodZVec {
        let mut acc = QmodZVec::zero(self.dim);
        for (coeff, g) in a.iter().zip(&self.gens) {
            acc = acc.add(&g.scale(*coeff as i64));
        }
        acc
    }

    /// Discrete log: coordinates of a realized vector, or None when the
    /// vector does not lie in the group.
    pub fn dlog(&self, q: &QmodZVec) -> Option<GroupElt> {
        if q.len() != self.dim {
            return None;
        }
        // q is in the group iff A q is integral; then coords = U A q mod D.
        let aq: Vec<Rat> = self.amat.apply_rat(&q.0);
        let mut aq_int = Vec::with_capacity(self.dim);
        for x in &aq {
            if !x.is_integer() {
                return None;
            }
            aq_int.push(x.to_integer());
        }
        let uaq = self.umat.apply(&aq_int);
        // Entries at positions with d_i = 1 are arbitrary integers (coordinate
        // in Z/1 = 0); the kept positions give the coordinates.
        let coords: Vec<u64> = self
            .keep
            .iter()
            .map(|&i| {
                let d = Int::from(self.all_factors[i]);
                let r = num_integer::Integer::mod_floor(&uaq[i], &d);
                r.to_u64().unwrap()
            })
            .collect();
        Some(coords)
    }

    /// Membership test for a realized vector.
    pub fn contains(&self, q: &QmodZVec) -> bool {
        match self.dlog(q) {
            Some(c) => self.realize(&c) == *q,
            None => false,
        }
    }

    /// All group elements, in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<GroupElt> {
        let mut out = vec![self.identity()];
        for (i, &d) in self.factors.iter().enumerate() {
            let prev = std::mem::take(&mut out);
            for e in prev {
                for v in 0..d {
                    let mut e2 = e.clone();
                    e2[i] = v;
                    out.push(e2);
                }
            }
        }
        out
    }

    /// Order of the subgroup generated by the given elements.
    pub fn subgroup_order(&self, gens: &[GroupElt]) -> u64 {
        use std::collections::HashSet;
        let mut seen: HashSet<GroupElt> = HashSet::new();
        seen.insert(self.identity());
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen.len() as u64
    }

    /// Evaluate a character of the ambient torus at a realized element:
    /// lambda(prod alpha_i^vee(e^{2 pi i q_i})) has Q/Z exponent
    /// sum_i <lambda, alpha_i^vee> q_i, where the pairing values are given.
    pub fn eval_weight(pairings: &[Int], q: &QmodZVec) -> Rat {
        let mut acc = Rat::zero();
        for (p, x) in pairings.iter().zip(&q.0) {
            acc += Rat::from(p.clone()) * x;
        }
        mod1(&acc)
    }
}

/// A character of a [`FinAbGroup`], stored as values c_i on the invariant
/// factor generators: chi(g_i) = e^{2 pi i c_i / d_i}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterOfI(pub Vec<u64>);

impl CharacterOfI {
    pub fn trivial(group: &FinAbGroup) -> Self {
        CharacterOfI(vec![0; group.factors.len()])
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Value chi(x) as an exponent in Q/Z.
    pub fn eval(&self, group: &FinAbGroup, x: &GroupElt) -> Rat {
        let mut acc = Rat::zero();
        for ((c, a), d) in self.0.iter().zip(x).zip(&group.factors) {
            acc += super::rat((c * a) as i64, *d as i64);
        }
        mod1(&acc)
    }

    /// Order of chi(x) as a root of unity.
    pub fn value_order(&self, group: &FinAbGroup, x: &GroupElt) -> u64 {
        super::qmodz_order(&self.eval(group, x))
    }

    /// Order of the character itself.
    pub fn order(&self, group: &FinAbGroup) -> u64 {
        self.0
            .iter()
            .zip(&group.factors)
            .map(|(c, d)| d / num_integer::gcd(*c, *d))
            .fold(1, num_integer::lcm)
    }

    /// All characters of the group, lexicographic.
    pub fn all(group: &FinAbGroup) -> Vec<CharacterOfI> {
        group.elements().into_iter().map(CharacterOfI).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    #[test]
    fn mu2_squared_from_minus_one() {
        // M = -1 on Z^2: fixed points of inversion are the 2-torsion mu_2^2.
        let m = IntMatrix::from_rows(&[vec![-1, 0], vec![0, -1]]);
        let g = FinAbGroup::torus_fixed_points(&m).unwrap();
        assert_eq!(g.factors, vec![2, 2]);
        assert_eq!(g.order(), 4);
        let half = QmodZVec::new(vec![rat(1, 2), rat(0, 1)]);
        let c = g.dlog(&half).expect("(1/2, 0) is fixed");
        assert_eq!(g.realize(&c), half);
    }

    #[test]
    fn round_trip_all_elements() {
        let m = IntMatrix::from_rows(&[vec![0, -1], vec![1, -1]]);
        // order-3 rotation; det(M-1) = 3, so I = mu_3
        let g = FinAbGroup::torus_fixed_points(&m).unwrap();
        assert_eq!(g.order(), 3);
        for e in g.elements() {
            assert_eq!(g.dlog(&g.realize(&e)).unwrap(), e);
        }
    }

    #[test]
    fn dlog_rejects_non_members() {
        let m = IntMatrix::from_rows(&[vec![-1, 0], vec![0, -1]]);
        let g = FinAbGroup::torus_fixed_points(&m).unwrap();
        let third = QmodZVec::new(vec![rat(1, 3), rat(0, 1)]);
        assert!(g.dlog(&third).is_none() || !g.contains(&third));
        assert!(!g.contains(&third));
    }
}
