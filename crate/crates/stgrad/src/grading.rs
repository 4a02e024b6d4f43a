//! Stable gradings realized as lattice automorphisms theta = w . vartheta,
//! their root orbits, the fixed-point group I = T^theta, the Cartan
//! subspace, and the determinant character tau.

use crate::lattice::{
    mod1, qmodz_order, Cyc, CycloFactorization, FinAbGroup, QmodZVec, Rat, UniPoly,
};
use crate::rootsys::{parse_root, RootDatum, RootVec, WeylElement};
use num_traits::{Signed, ToPrimitive, Zero};

/// How the Weyl part w of theta = Int(n_w) . vartheta is specified.
#[derive(Debug, Clone)]
pub enum WSpec {
    /// theta acts as -1 on the lattice (the split Z/2 gradings).
    MinusOne,
    /// theta = w_h^power (vartheta = 1).
    CoxeterPower { power: usize },
    /// theta = -w_h^power (inner-times-minus-one realization of an outer
    /// automorphism).
    NegCoxeterPower { power: usize },
    /// theta = ((s_{r_1} ... s_{r_k}) . vartheta)^power with vartheta the
    /// pinned diagram automorphism of the given order (1 for none). Roots
    /// are given in digit-string notation.
    TwistedWordPower {
        word: Vec<String>,
        vartheta_order: usize,
        power: usize,
    },
}

/// An order-m lattice automorphism stabilizing R.
#[derive(Debug, Clone)]
pub struct ThetaAction {
    pub m: usize,
    pub w: WeylElement,
}

#[derive(Debug, thiserror::Error)]
pub enum GradingError {
    #[error("w specification does not yield order {expected} (got {got:?})")]
    WrongOrder { expected: usize, got: Option<usize> },
    #[error("theta does not permute the roots")]
    NotRootPreserving,
    #[error("theta-orbit of {0:?} has {1} elements, expected {2}: grading is not stable")]
    BadOrbitSize(RootVec, usize, usize),
    #[error("det(M - 1) = 0: torus fixed points are not finite")]
    NotElliptic,
    #[error("tau is nontrivial on I (value {0} on a generator)")]
    NontrivialTau(Rat),
}

/// Build theta from its specification and check it has exact order m.
pub fn build_theta(datum: &RootDatum, spec: &WSpec, m: usize) -> Result<ThetaAction, GradingError> {
    let w = match spec {
        WSpec::MinusOne => WeylElement::identity(datum.rank).neg(),
        WSpec::CoxeterPower { power } => datum.coxeter_element().pow(*power),
        WSpec::NegCoxeterPower { power } => datum.coxeter_element().pow(*power).neg(),
        WSpec::TwistedWordPower {
            word,
            vartheta_order,
            power,
        } => {
            let roots: Vec<RootVec> = word.iter().map(|s| parse_root(s)).collect();
            let mut base = datum
                .reflection_word(&roots)
                .expect("catalog word contains a non-root");
            if *vartheta_order > 1 {
                let vt = datum
                    .diagram_automorphism(*vartheta_order)
                    .expect("catalog requests unsupported automorphism");
                base = base.mul(&vt);
            }
            base.pow(*power)
        }
    };
    if !datum.permutes_roots(&w) {
        return Err(GradingError::NotRootPreserving);
    }
    match w.on_roots.order(4 * m) {
        Some(k) if k == m => Ok(ThetaAction { m, w }),
        other => Err(GradingError::WrongOrder {
            expected: m,
            got: other,
        }),
    }
}

impl ThetaAction {
    pub fn apply_root(&self, r: &[i64]) -> RootVec {
        self.w.apply_root(r)
    }

    pub fn apply_coroot(&self, r: &[i64]) -> Vec<i64> {
        self.w.apply_coroot(r)
    }

    /// Characteristic polynomial of theta on the character lattice, as a
    /// product of cyclotomic polynomials.
    pub fn char_poly_cyclo(&self) -> CycloFactorization {
        let cp = self.w.on_roots.to_big().char_poly();
        let p = UniPoly::from_coeffs(cp.into_iter().map(Rat::from).collect());
        CycloFactorization::refactor(&p)
            .expect("char poly of a finite-order lattice map factors into cyclotomics")
    }
}

/// Partition R into theta-orbits. Every orbit must have exactly m elements.
pub fn theta_orbits(
    datum: &RootDatum,
    theta: &ThetaAction,
) -> Result<Vec<Vec<usize>>, GradingError> {
    let mut seen = vec![false; datum.roots.len()];
    let mut orbits = Vec::new();
    for start in 0..datum.roots.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut cur = datum.roots[start].clone();
        loop {
            cur = theta.apply_root(&cur);
            let k = datum
                .root_index(&cur)
                .ok_or(GradingError::NotRootPreserving)?;
            if k == start {
                break;
            }
            seen[k] = true;
            orbit.push(k);
        }
        if orbit.len() != theta.m {
            return Err(GradingError::BadOrbitSize(
                datum.roots[start].clone(),
                orbit.len(),
                theta.m,
            ));
        }
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// I = T^theta as a finite abelian group realized in (Q/Z)^n over the
/// simple-coroot basis.
pub fn torus_fixed_points(theta: &ThetaAction) -> Result<FinAbGroup, GradingError> {
    FinAbGroup::torus_fixed_points(&theta.w.on_coroots.to_big())
        .map_err(|_| GradingError::NotElliptic)
}

/// |det(M - 1)| on the cocharacter lattice; equals |I| for elliptic theta.
pub fn fixed_point_count(theta: &ThetaAction) -> u64 {
    theta
        .w
        .on_coroots
        .to_big()
        .add_scaled_identity(-1)
        .det()
        .abs()
        .to_u64()
        .expect("|I| fits u64")
}

/// Parse a torus element written as prod alpha_i^vee(zeta^k) into its
/// (Q/Z)^n exponent vector. Input: list of (simple root index 1-based,
/// exponent numerator, exponent denominator).
pub fn torus_element(rank: usize, parts: &[(usize, i64, i64)]) -> QmodZVec {
    let mut q = vec![Rat::zero(); rank];
    for &(i, num, den) in parts {
        q[i - 1] += crate::lattice::rat(num, den);
    }
    QmodZVec::new(q)
}

/// Basis of the zeta_m-eigenspace of theta on t = X_*(T) (x) C, computed
/// exactly over Q(zeta_m). Each basis vector is a length-n vector of
/// cyclotomic numbers in simple-coroot coordinates.
pub fn cartan_subspace(theta: &ThetaAction) -> Vec<Vec<Cyc>> {
    let n = theta.w.on_coroots.n;
    let cond = theta.m as u32;
    let zeta = Cyc::zeta_pow(cond, 1);
    // rows of (M - zeta I)
    let mut a: Vec<Vec<Cyc>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut x = Cyc::from_int(cond, theta.w.on_coroots.at(i, j));
                    if i == j {
                        x = x.sub(&zeta);
                    }
                    x
                })
                .collect()
        })
        .collect();
    // Gaussian elimination to reduced echelon form; kernel from free columns.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        let piv = (row..n).find(|&r| !a[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        a.swap(row, piv);
        let inv = a[row][col].inv();
        for j in 0..n {
            a[row][j] = a[row][j].mul(&inv);
        }
        for r in 0..n {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let d = a[row][j].mul(&f);
                    a[r][j] = a[r][j].sub(&d);
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == n {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![Cyc::zero(cond); n];
        v[fc] = Cyc::one(cond);
        for &(r, c) in &pivots {
            v[c] = a[r][fc].neg();
        }
        basis.push(v);
    }
    basis
}

/// The character tau(x) = det(x | g_1) = prod over theta-orbit
/// representatives alpha of alpha(x), evaluated on every generator of I.
/// All values must vanish in Q/Z (Lemma about det x|_{g_1}).
pub fn tau_character(
    datum: &RootDatum,
    orbits: &[Vec<usize>],
    group: &FinAbGroup,
) -> Result<(), GradingError> {
    // Lexicographically smallest root in each orbit.
    let reps: Vec<usize> = orbits
        .iter()
        .map(|orb| {
            *orb.iter()
                .min_by(|&&a, &&b| datum.roots[a].cmp(&datum.roots[b]))
                .unwrap()
        })
        .collect();
    for g in &group.gens {
        let mut acc = Rat::zero();
        for &rep in &reps {
            let alpha = &datum.roots[rep];
            for i in 0..datum.rank {
                if g.0[i].is_zero() {
                    continue;
                }
                acc +=
                    Rat::from(crate::lattice::int(datum.pair_simple_coroot(alpha, i))) * &g.0[i];
            }
        }
        let val = mod1(&acc);
        if !val.is_zero() {
            return Err(GradingError::NontrivialTau(val));
        }
    }
    Ok(())
}

/// Evaluate a character lambda of T (in the root lattice, simple-root basis)
/// at a realized torus element, as an exponent in Q/Z.
pub fn eval_root_character(datum: &RootDatum, lambda: &[i64], q: &QmodZVec) -> Rat {
    let mut acc = Rat::zero();
    for i in 0..datum.rank {
        if q.0[i].is_zero() {
            continue;
        }
        acc += Rat::from(crate::lattice::int(datum.pair_simple_coroot(lambda, i))) * &q.0[i];
    }
    mod1(&acc)
}

/// Order of the root of unity alpha(x).
pub fn root_value_order(datum: &RootDatum, lambda: &[i64], q: &QmodZVec) -> u64 {
    qmodz_order(&eval_root_character(datum, lambda, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;
    use crate::rootsys::{build_root_system, RootType};

    #[test]
    fn g2_2s_split() {
        let d = build_root_system(RootType::G2);
        let theta = build_theta(&d, &WSpec::MinusOne, 2).unwrap();
        let orbits = theta_orbits(&d, &theta).unwrap();
        assert_eq!(orbits.len(), 6);
        let i = torus_fixed_points(&theta).unwrap();
        assert_eq!(i.factors, vec![2, 2]);
        assert_eq!(fixed_point_count(&theta), 4);
        tau_character(&d, &orbits, &i).unwrap();
    }

    #[test]
    fn g2_6s_coxeter() {
        let d = build_root_system(RootType::G2);
        let theta = build_theta(&d, &WSpec::CoxeterPower { power: 1 }, 6).unwrap();
        let orbits = theta_orbits(&d, &theta).unwrap();
        assert_eq!(orbits.len(), 2);
        let i = torus_fixed_points(&theta).unwrap();
        assert!(i.is_trivial());
        let a = cartan_subspace(&theta);
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn g2_3s_word() {
        // theta = s_beta s_alpha s_beta s_alpha, order 3, I = mu_3 with
        // generator alpha^vee(zeta_3)
        let d = build_root_system(RootType::G2);
        let spec = WSpec::TwistedWordPower {
            word: vec!["01".into(), "10".into(), "01".into(), "10".into()],
            vartheta_order: 1,
            power: 1,
        };
        let theta = build_theta(&d, &spec, 3).unwrap();
        let orbits = theta_orbits(&d, &theta).unwrap();
        assert_eq!(orbits.len(), 4);
        let i = torus_fixed_points(&theta).unwrap();
        assert_eq!(i.factors, vec![3]);
        let gamma = torus_element(2, &[(1, 1, 3)]);
        assert!(i.contains(&gamma), "alpha^vee(zeta_3) generates I");
        tau_character(&d, &orbits, &i).unwrap();
        assert_eq!(cartan_subspace(&theta).len(), 1);
    }

    #[test]
    fn d4_triality_3s() {
        // theta|_R = (w . vartheta)^4 with w = s_1 s_2
        let d = build_root_system(RootType::D4);
        let spec = WSpec::TwistedWordPower {
            word: vec!["1000".into(), "0100".into()],
            vartheta_order: 3,
            power: 4,
        };
        let theta = build_theta(&d, &spec, 3).unwrap();
        assert_eq!(
            theta.char_poly_cyclo(),
            CycloFactorization::from_pairs(&[(3, 2)])
        );
        let orbits = theta_orbits(&d, &theta).unwrap();
        assert_eq!(orbits.len(), 8);
        let i = torus_fixed_points(&theta).unwrap();
        assert_eq!(i.factors, vec![3, 3]);
        // gamma_1 = alpha_2^vee(xi_3) alpha_4^vee(xi_3^2)
        let g1 = torus_element(4, &[(2, 1, 3), (4, 2, 3)]);
        // gamma_2 = alpha_1^vee(xi_3^2) alpha_3^vee(xi_3) alpha_4^vee(xi_3^2)
        let g2 = torus_element(4, &[(1, 2, 3), (3, 1, 3), (4, 2, 3)]);
        let c1 = i.dlog(&g1).expect("gamma_1 in I");
        let c2 = i.dlog(&g2).expect("gamma_2 in I");
        assert_eq!(i.subgroup_order(&[c1, c2]), 9, "gamma_1, gamma_2 generate");
        let a = cartan_subspace(&theta);
        assert_eq!(a.len(), 2);
        tau_character(&d, &orbits, &i).unwrap();
    }

    #[test]
    fn torus_element_accumulates() {
        let q = torus_element(3, &[(1, 1, 2), (1, 1, 2), (2, 1, 3)]);
        assert_eq!(q.0[0], rat(0, 1));
        assert_eq!(q.0[1], rat(1, 3));
    }
}
