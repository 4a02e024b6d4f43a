//! Little Weyl group machinery for rank >= 2 gradings: the partition of R
//! into classes S_i, distinguished reflections t_i with their local groups
//! I_s, and enumeration of the reflection group W generated by the t_i on
//! the Cartan subspace.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_traits::Zero;

use crate::grading::ThetaAction;
use crate::lattice::{Cyc, CycloFactorization, QmodZVec, Rat};
use crate::rootsys::{Mat, RootDatum, RootType, RootVec, SubsystemType, WeylElement};

/// The rank-one stable gradings that occur on (G_s)_der, with the local
/// group I_s and the reduction polynomials R_{chi_s}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RankOneType {
    /// (A_1, 2_s)
    A1,
    /// (A_2, 3_s)
    A2T3,
    /// (A_3, 4_s)
    A3T4,
    /// (A_4, 5_s)
    A4T5,
    /// (2A_2, 6_s)
    TwA2T6,
    /// (2A_4, 10_s)
    TwA4T10,
    /// (B_2, 4_s)
    B2T4,
    /// (2D_4, 8_s)
    TwD4T8,
    /// (3D_4, 12_s)
    TwD4T12,
}

impl RankOneType {
    /// Order n_s of the distinguished reflection.
    pub fn ns(self) -> usize {
        match self {
            RankOneType::A1 => 2,
            RankOneType::A2T3 | RankOneType::TwA2T6 => 3,
            RankOneType::A3T4 | RankOneType::B2T4 | RankOneType::TwD4T8 | RankOneType::TwD4T12 => 4,
            RankOneType::A4T5 | RankOneType::TwA4T10 => 5,
        }
    }

    /// |I_s|.
    pub fn local_order(self) -> u64 {
        match self {
            RankOneType::A1 => 2,
            RankOneType::A2T3 => 3,
            RankOneType::A3T4 => 4,
            RankOneType::A4T5 => 5,
            RankOneType::B2T4 | RankOneType::TwD4T8 => 2,
            RankOneType::TwA2T6 | RankOneType::TwA4T10 | RankOneType::TwD4T12 => 1,
        }
    }

    /// The reduction-to-rank-one polynomial R_{chi_s} for a restriction
    /// chi_s of order d.
    pub fn relation(self, d: u64) -> Option<CycloFactorization> {
        let f = |pairs: &[(u32, u32)]| Some(CycloFactorization::from_pairs(pairs));
        match (self, d) {
            (RankOneType::A1, 1) => f(&[(1, 2)]),
            (RankOneType::A1, 2) => f(&[(1, 1), (2, 1)]),
            (RankOneType::A2T3, 1) => f(&[(1, 3)]),
            (RankOneType::A2T3, 3) => f(&[(1, 1), (3, 1)]),
            (RankOneType::A3T4, 1) => f(&[(1, 4)]),
            (RankOneType::A3T4, 2) => f(&[(1, 2), (2, 2)]),
            (RankOneType::A3T4, 4) => f(&[(1, 1), (2, 1), (4, 1)]),
            (RankOneType::A4T5, 1) => f(&[(1, 5)]),
            (RankOneType::A4T5, 5) => f(&[(1, 1), (5, 1)]),
            (RankOneType::TwA2T6, 1) => f(&[(1, 2), (2, 1)]),
            (RankOneType::TwA4T10, 1) => f(&[(1, 3), (2, 2)]),
            (RankOneType::B2T4, 1) => f(&[(1, 3), (2, 1)]),
            (RankOneType::B2T4, 2) => f(&[(1, 2), (2, 2)]),
            (RankOneType::TwD4T8, 1) => f(&[(1, 4)]),
            (RankOneType::TwD4T8, 2) => f(&[(1, 2), (2, 2)]),
            (RankOneType::TwD4T12, 1) => f(&[(1, 3), (2, 1)]),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RankOneType::A1 => "(A1,2s)",
            RankOneType::A2T3 => "(A2,3s)",
            RankOneType::A3T4 => "(A3,4s)",
            RankOneType::A4T5 => "(A4,5s)",
            RankOneType::TwA2T6 => "(2A2,6s)",
            RankOneType::TwA4T10 => "(2A4,10s)",
            RankOneType::B2T4 => "(B2,4s)",
            RankOneType::TwD4T8 => "(2D4,8s)",
            RankOneType::TwD4T12 => "(3D4,12s)",
        }
    }
}

/// One class S_i of the partition of R.
#[derive(Debug, Clone)]
pub struct OrbitClass {
    /// Sorted indices into datum.roots.
    pub roots: Vec<usize>,
    /// Number of theta-orbits contained in the class.
    pub orbit_count: usize,
    pub rtype: SubsystemType,
}

/// A distinguished reflection t_i together with its local data.
#[derive(Debug, Clone)]
pub struct Distinguished {
    pub t: WeylElement,
    pub order: usize,
    pub rank_one: RankOneType,
    /// Generator nu_i of I_s, realized in (Q/Z)^n; None when I_s = 1.
    pub nu: Option<QmodZVec>,
    /// The chosen base root beta_i.
    pub base: RootVec,
}

#[derive(Debug, thiserror::Error)]
pub enum LwError {
    #[error("class spans do not induce a partition of R: {0}")]
    BadPartition(String),
    #[error("no base root in the class satisfies the normalization for {0:?}")]
    NoBaseRoot(ClassKind),
    #[error("distinguished reflection depends on the base-root choice in a {0:?} class")]
    NotWellDefined(ClassKind),
    #[error("t does not commute with theta")]
    NotInW,
    #[error("t has order {got}, expected {expected}")]
    WrongReflOrder { got: usize, expected: usize },
    #[error("group enumeration exceeded the bound {0}")]
    EnumerationBound(usize),
    #[error("subsystem classification failed: {0}")]
    RootSys(#[from] crate::rootsys::RootSysError),
}

/// Partition R into the classes S_i as the maximal theta-orbit spans
/// intersected with R. Verifies the result is a genuine partition.
pub fn partition_into_classes(
    datum: &RootDatum,
    theta: &ThetaAction,
    orbits: &[Vec<usize>],
) -> Result<Vec<OrbitClass>, LwError> {
    let nr = datum.roots.len();
    let mut span_sets: Vec<BTreeSet<usize>> = Vec::with_capacity(orbits.len());
    for orbit in orbits {
        let rows: Vec<&RootVec> = orbit.iter().map(|&k| &datum.roots[k]).collect();
        let base_rank = rat_rank(&rows);
        let mut members = BTreeSet::new();
        for k in 0..nr {
            let mut rows2 = rows.clone();
            rows2.push(&datum.roots[k]);
            if rat_rank(&rows2) == base_rank {
                members.insert(k);
            }
        }
        span_sets.push(members);
    }
    // keep maximal span sets
    let mut classes: Vec<BTreeSet<usize>> = Vec::new();
    for s in &span_sets {
        if span_sets
            .iter()
            .any(|t| t.len() > s.len() && t.is_superset(s))
        {
            continue;
        }
        if !classes.contains(s) {
            classes.push(s.clone());
        }
    }
    // verify partition
    let mut seen = vec![false; nr];
    for c in &classes {
        for &k in c {
            if seen[k] {
                return Err(LwError::BadPartition(format!(
                    "root {:?} lies in two maximal spans",
                    datum.roots[k]
                )));
            }
            seen[k] = true;
        }
    }
    if !seen.iter().all(|&b| b) {
        return Err(LwError::BadPartition("maximal spans do not cover R".into()));
    }
    classes.sort_by_key(|c| *c.iter().next().unwrap());
    classes
        .into_iter()
        .map(|c| {
            let roots: Vec<usize> = c.into_iter().collect();
            let orbit_count = orbits.iter().filter(|orb| roots.contains(&orb[0])).count();
            let vecs: Vec<RootVec> = roots.iter().map(|&k| datum.roots[k].clone()).collect();
            let rtype = datum.subsystem_type(&vecs)?;
            let _ = theta;
            Ok(OrbitClass {
                roots,
                orbit_count,
                rtype,
            })
        })
        .collect()
}

fn rat_rank(rows: &[&RootVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut a: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| Rat::from(crate::lattice::int(x)))
                .collect()
        })
        .collect();
    let mut rank = 0usize;
    for col in 0..ncols {
        let piv = (rank..a.len()).find(|&r| !a[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        a.swap(rank, piv);
        let inv = a[rank][col].recip();
        for j in 0..ncols {
            a[rank][j] = &a[rank][j] * &inv;
        }
        for r in 0..a.len() {
            if r != rank && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..ncols {
                    let d = &a[rank][j] * &f;
                    a[r][j] = &a[r][j] - d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The construction recipe for a class, determined by the grading case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    M2A1,
    M3A2,
    /// m = 6 class with theta^2 a - theta a + a = 0 (cyclotomic m = 6 and
    /// the 2A_2-type classes of E6 6s / E7 6s).
    M6TwA2,
    M5A4,
    M10TwA4,
    /// m = 4, E8: A_1^2 class.
    M4A1Sq,
    /// m = 4, F4: B_2 class.
    M4B2,
    /// m = 8, E8: D_4 class.
    M8D4,
    /// m = 8, E8: A_1^4 class.
    M8A1Quad,
    /// m = 12, E8: A_2^2 class (rank-one type 2A_2 6s).
    M12TwA2,
    /// m = 12, E8: D_4 class (rank-one type 3D_4 12s).
    M12TwD4,
    /// E6 6s: A_2^2 class (rank-one type A_2 3s).
    E66A2Sq,
    /// E7 6s: A_1^3 class (rank-one type A_1 2s).
    E76A1Cube,
    /// 2E6 4s: A_3 class.
    TwE64A3,
}

impl ClassKind {
    pub fn rank_one(self) -> RankOneType {
        match self {
            ClassKind::M2A1 | ClassKind::M4A1Sq | ClassKind::M8A1Quad | ClassKind::E76A1Cube => {
                RankOneType::A1
            }
            ClassKind::M3A2 | ClassKind::E66A2Sq => RankOneType::A2T3,
            ClassKind::M6TwA2 | ClassKind::M12TwA2 => RankOneType::TwA2T6,
            ClassKind::M5A4 => RankOneType::A4T5,
            ClassKind::M10TwA4 => RankOneType::TwA4T10,
            ClassKind::M4B2 => RankOneType::B2T4,
            ClassKind::M8D4 => RankOneType::TwD4T8,
            ClassKind::M12TwD4 => RankOneType::TwD4T12,
            ClassKind::TwE64A3 => RankOneType::A3T4,
        }
    }
}

/// Decide the recipe for a class from the grading and the class shape.
pub fn class_kind(datum: &RootDatum, theta: &ThetaAction, class: &OrbitClass) -> ClassKind {
    let m = theta.m;
    let t = datum.rtype;
    match m {
        2 => ClassKind::M2A1,
        3 => ClassKind::M3A2,
        5 => ClassKind::M5A4,
        10 => ClassKind::M10TwA4,
        4 => match t {
            RootType::E8 => ClassKind::M4A1Sq,
            RootType::F4 => ClassKind::M4B2,
            RootType::E6 => ClassKind::TwE64A3,
            _ => unreachable!("no m=4 classes in {t:?}"),
        },
        8 => {
            if class.roots.len() == 24 {
                ClassKind::M8D4
            } else {
                ClassKind::M8A1Quad
            }
        }
        12 => {
            if class.roots.len() == 24 {
                ClassKind::M12TwD4
            } else {
                ClassKind::M12TwA2
            }
        }
        6 => {
            if class.roots.len() == 12 {
                ClassKind::E66A2Sq
            } else {
                let a = &datum.roots[class.roots[0]];
                let ta = theta.apply_root(a);
                let tta = theta.apply_root(&ta);
                let rel: RootVec = (0..datum.rank).map(|i| tta[i] - ta[i] + a[i]).collect();
                if rel.iter().all(|&x| x == 0) {
                    ClassKind::M6TwA2
                } else {
                    ClassKind::E76A1Cube
                }
            }
        }
        _ => unreachable!("no class recipe for m = {m}"),
    }
}

fn neg(v: &[i64]) -> RootVec {
    v.iter().map(|x| -x).collect()
}

fn add(a: &[i64], b: &[i64]) -> RootVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> RootVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Squared length (up to global scale) via the diagonal symmetrizer.
fn norm2(datum: &RootDatum, r: &[i64]) -> i64 {
    let d: &[i64] = match datum.rtype {
        RootType::G2 => &[1, 3],
        RootType::F4 => &[2, 2, 1, 1],
        RootType::E6 => &[1; 6],
        RootType::E7 => &[1; 7],
        RootType::E8 => &[1; 8],
        RootType::D4 => &[1; 4],
    };
    (0..datum.rank)
        .map(|i| r[i] * d[i] * datum.pair_simple_coroot(r, i))
        .sum()
}

/// <theta^k beta, beta^vee>.
fn theta_pair(datum: &RootDatum, theta: &ThetaAction, beta: &[i64], k: usize) -> i64 {
    let mut img = beta.to_vec();
    for _ in 0..k {
        img = theta.apply_root(&img);
    }
    let cr = datum.coroot_of(beta).expect("base is a root");
    datum.pair(&img, cr)
}

/// nu = prod over parts (root^vee)(e^{2 pi i num/den}) realized in (Q/Z)^n.
fn nu_from_parts(datum: &RootDatum, parts: &[(RootVec, i64, i64)]) -> QmodZVec {
    let mut q = vec![Rat::zero(); datum.rank];
    for (root, num, den) in parts {
        let cr = datum.coroot_of(root).expect("nu part is a root");
        for i in 0..datum.rank {
            q[i] += crate::lattice::rat(cr[i] * num, *den);
        }
    }
    QmodZVec::new(q)
}

/// All base roots in the class satisfying the recipe's normalization.
fn base_candidates(
    datum: &RootDatum,
    theta: &ThetaAction,
    class: &OrbitClass,
    kind: ClassKind,
) -> Vec<RootVec> {
    let roots: Vec<RootVec> = class
        .roots
        .iter()
        .map(|&k| datum.roots[k].clone())
        .collect();
    let cond = |b: &RootVec| -> bool {
        match kind {
            ClassKind::M2A1
            | ClassKind::M3A2
            | ClassKind::M6TwA2
            | ClassKind::M4A1Sq
            | ClassKind::M8A1Quad
            | ClassKind::E76A1Cube => true,
            ClassKind::M5A4 => theta_pair(datum, theta, b, 1) == -1,
            ClassKind::M10TwA4 => theta_pair(datum, theta, b, 1) == 1,
            ClassKind::M4B2 => false, // handled by distinguished_b2
            ClassKind::M8D4 => {
                if theta_pair(datum, theta, b, 1) != -1 {
                    return false;
                }
                let tb = theta.apply_root(b);
                let alpha = add(b, &tb);
                let t3b = theta.apply_root(&theta.apply_root(&tb));
                let gamma = sub(&alpha, &t3b);
                datum.is_root(&alpha) && datum.is_root(&gamma)
            }
            ClassKind::M12TwA2 => {
                theta_pair(datum, theta, b, 1) == 0
                    && theta_pair(datum, theta, b, 2) == 1
                    && theta_pair(datum, theta, b, 4) == -1
            }
            ClassKind::M12TwD4 => {
                if theta_pair(datum, theta, b, 1) != 1 {
                    return false;
                }
                let tb = theta.apply_root(b);
                datum.is_root(&sub(&tb, b))
            }
            ClassKind::E66A2Sq => {
                let t1 = theta.apply_root(b);
                let t2 = theta.apply_root(&t1);
                let t3 = theta.apply_root(&t2);
                let t4 = theta.apply_root(&t3);
                let rel = add(&add(&t4, &t2), b);
                rel.iter().all(|&x| x == 0) && t3 != neg(b)
            }
            ClassKind::TwE64A3 => {
                let t1 = theta.apply_root(b);
                let t2 = theta.apply_root(&t1);
                if t2 == neg(b) {
                    return false;
                }
                let t3 = theta.apply_root(&t2);
                let s = add(&add(b, &t1), &add(&t2, &t3));
                s.iter().all(|&x| x == 0)
            }
        }
    };
    roots.into_iter().filter(cond).collect()
}

/// Construct the distinguished reflection and local generator of a class
/// from a given base root (which must satisfy the normalization).
pub fn distinguished_from_base(
    datum: &RootDatum,
    theta: &ThetaAction,
    kind: ClassKind,
    base: &RootVec,
) -> Result<Distinguished, LwError> {
    let th = |r: &RootVec, k: usize| -> RootVec {
        let mut v = r.clone();
        for _ in 0..k {
            v = theta.apply_root(&v);
        }
        v
    };
    let word = |rs: &[RootVec]| datum.reflection_word(rs).map_err(LwError::from);
    let b = base.clone();
    let (t, nu): (WeylElement, Option<QmodZVec>) = match kind {
        ClassKind::M2A1 => {
            let t = word(&[b.clone()])?;
            (t, Some(nu_from_parts(datum, &[(b.clone(), 1, 2)])))
        }
        ClassKind::M3A2 => {
            let t = word(&[b.clone(), th(&b, 1)])?;
            let nu = nu_from_parts(datum, &[(b.clone(), 2, 3), (th(&b, 1), 1, 3)]);
            (t, Some(nu))
        }
        ClassKind::M6TwA2 => {
            let t = word(&[b.clone(), th(&b, 1), b.clone(), th(&b, 1)])?;
            (t, None)
        }
        ClassKind::M5A4 => {
            let t = word(&[b.clone(), th(&b, 1), th(&b, 2), th(&b, 3)])?;
            let nu = nu_from_parts(
                datum,
                &[
                    (b.clone(), 4, 5),
                    (th(&b, 1), 3, 5),
                    (th(&b, 2), 2, 5),
                    (th(&b, 3), 1, 5),
                ],
            );
            (t, Some(nu))
        }
        ClassKind::M10TwA4 => {
            let w = word(&[b.clone(), th(&b, 1), th(&b, 2), th(&b, 3)])?;
            (w.mul(&w), None)
        }
        ClassKind::M4A1Sq => {
            let t = word(&[b.clone(), th(&b, 1)])?;
            let nu = nu_from_parts(datum, &[(b.clone(), 1, 2), (th(&b, 1), 1, 2)]);
            (t, Some(nu))
        }
        ClassKind::M4B2 => unreachable!("B2 classes go through distinguished_b2"),
        ClassKind::M8D4 => {
            let tb = th(&b, 1);
            let alpha = add(&b, &tb);
            let gamma = sub(&alpha, &th(&b, 3));
            let w = word(&[
                gamma,
                th(&b, 2),
                tb.clone(),
                b.clone(),
                th(&b, 2),
                tb.clone(),
            ])?;
            let nu = nu_from_parts(
                datum,
                &[
                    (b.clone(), 1, 2),
                    (th(&b, 1), 1, 2),
                    (th(&b, 2), 1, 2),
                    (th(&b, 3), 1, 2),
                ],
            );
            (w.pow(3), Some(nu))
        }
        ClassKind::M8A1Quad => {
            let t = word(&[b.clone(), th(&b, 1), th(&b, 2), th(&b, 3)])?;
            let nu = nu_from_parts(
                datum,
                &[
                    (b.clone(), 1, 2),
                    (th(&b, 1), 1, 2),
                    (th(&b, 2), 1, 2),
                    (th(&b, 3), 1, 2),
                ],
            );
            (t, Some(nu))
        }
        ClassKind::M12TwA2 => {
            let w = word(&[b.clone(), th(&b, 2), th(&b, 1), th(&b, 3)])?;
            (w.mul(&w), None)
        }
        ClassKind::M12TwD4 => {
            let beta = sub(&th(&b, 1), &b);
            let w = word(&[
                th(&beta, 1),
                beta.clone(),
                th(&beta, 3),
                th(&beta, 1),
                th(&b, 5),
                th(&beta, 3),
            ])?;
            (w.pow(3), None)
        }
        ClassKind::E66A2Sq => {
            let t = word(&[b.clone(), th(&b, 2), th(&b, 1), th(&b, 3)])?;
            let nu = nu_from_parts(
                datum,
                &[
                    (b.clone(), 2, 3),
                    (th(&b, 2), 1, 3),
                    (th(&b, 1), 2, 3),
                    (th(&b, 3), 1, 3),
                ],
            );
            (t, Some(nu))
        }
        ClassKind::E76A1Cube => {
            let t = word(&[b.clone(), th(&b, 1), th(&b, 2)])?;
            let nu = nu_from_parts(
                datum,
                &[(b.clone(), 1, 2), (th(&b, 1), 1, 2), (th(&b, 2), 1, 2)],
            );
            (t, Some(nu))
        }
        ClassKind::TwE64A3 => {
            let t = word(&[b.clone(), th(&b, 1), th(&b, 2)])?;
            let nu = nu_from_parts(
                datum,
                &[(b.clone(), 3, 4), (th(&b, 1), 2, 4), (th(&b, 2), 1, 4)],
            );
            (t, Some(nu))
        }
    };
    finish_distinguished(theta, t, nu, kind.rank_one(), b)
}

fn finish_distinguished(
    theta: &ThetaAction,
    t: WeylElement,
    nu: Option<QmodZVec>,
    rank_one: RankOneType,
    base: RootVec,
) -> Result<Distinguished, LwError> {
    if t.on_roots.mul(&theta.w.on_roots) != theta.w.on_roots.mul(&t.on_roots) {
        return Err(LwError::NotInW);
    }
    let order = t.on_roots.order(64).ok_or(LwError::WrongReflOrder {
        got: 0,
        expected: rank_one.ns(),
    })?;
    if order != rank_one.ns() {
        return Err(LwError::WrongReflOrder {
            got: order,
            expected: rank_one.ns(),
        });
    }
    Ok(Distinguished {
        t,
        order,
        rank_one,
        nu,
        base,
    })
}

/// B_2 classes of (F_4, 4_s): search for the normalized pair (delta long,
/// beta short) with delta + beta = -theta(beta) and beta - theta(beta) =
/// theta(delta); t = s_delta s_beta and I_s = <beta^vee(-1)>.
fn distinguished_b2(
    datum: &RootDatum,
    theta: &ThetaAction,
    class: &OrbitClass,
) -> Result<Distinguished, LwError> {
    let roots: Vec<RootVec> = class
        .roots
        .iter()
        .map(|&k| datum.roots[k].clone())
        .collect();
    let mut found: Vec<(RootVec, RootVec)> = Vec::new();
    for delta in &roots {
        if norm2(datum, delta) != 4 {
            continue;
        }
        for beta in &roots {
            if norm2(datum, beta) != 2 {
                continue;
            }
            let tb = theta.apply_root(beta);
            if add(delta, beta) == neg(&tb) && sub(beta, &tb) == theta.apply_root(delta) {
                found.push((delta.clone(), beta.clone()));
            }
        }
    }
    if found.is_empty() {
        return Err(LwError::NoBaseRoot(ClassKind::M4B2));
    }
    found.sort();
    let mut result: Option<Distinguished> = None;
    for (delta, beta) in &found {
        let t = datum.reflection_word(&[delta.clone(), beta.clone()])?;
        let nu = nu_from_parts(datum, &[(beta.clone(), 1, 2)]);
        let d = finish_distinguished(theta, t, Some(nu), RankOneType::B2T4, beta.clone())?;
        match &result {
            None => result = Some(d),
            Some(prev) => {
                if prev.t != d.t || prev.nu != d.nu {
                    return Err(LwError::NotWellDefined(ClassKind::M4B2));
                }
            }
        }
    }
    Ok(result.unwrap())
}

/// Construct the distinguished reflection of a class, trying every base
/// root satisfying the normalization and verifying the reflection is
/// independent of the choice.
pub fn distinguished_reflection(
    datum: &RootDatum,
    theta: &ThetaAction,
    class: &OrbitClass,
) -> Result<Distinguished, LwError> {
    let kind = class_kind(datum, theta, class);
    if kind == ClassKind::M4B2 {
        return distinguished_b2(datum, theta, class);
    }
    let cands = base_candidates(datum, theta, class, kind);
    if cands.is_empty() {
        return Err(LwError::NoBaseRoot(kind));
    }
    let mut result: Option<Distinguished> = None;
    for b in &cands {
        let d = distinguished_from_base(datum, theta, kind, b)?;
        match &result {
            None => result = Some(d),
            Some(prev) => {
                if prev.t != d.t {
                    return Err(LwError::NotWellDefined(kind));
                }
            }
        }
    }
    Ok(result.unwrap())
}

/// Solve B * C = M * B for C: the restriction of the integer lattice map M
/// to the subspace with the given Cyc basis. None when M does not stabilize
/// the subspace.
pub fn restrict_to_subspace(m: &Mat, basis: &[Vec<Cyc>], cond: u32) -> Option<Vec<Vec<Cyc>>> {
    let n = m.n;
    let r = basis.len();
    let images: Vec<Vec<Cyc>> = basis
        .iter()
        .map(|v| {
            (0..n)
                .map(|i| {
                    let mut acc = Cyc::zero(cond);
                    for j in 0..n {
                        let c = m.at(i, j);
                        if c != 0 {
                            acc = acc.add(&v[j].scale(&Rat::from(crate::lattice::int(c))));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut aug: Vec<Vec<Cyc>> = (0..n)
        .map(|i| {
            let mut row: Vec<Cyc> = basis.iter().map(|v| v[i].clone()).collect();
            row.extend(images.iter().map(|v| v[i].clone()));
            row
        })
        .collect();
    let total = r + images.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rowi = 0usize;
    for col in 0..r {
        let piv = (rowi..n).find(|&rr| !aug[rr][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        aug.swap(rowi, piv);
        let inv = aug[rowi][col].inv();
        for j in 0..total {
            aug[rowi][j] = aug[rowi][j].mul(&inv);
        }
        for rr in 0..n {
            if rr != rowi && !aug[rr][col].is_zero() {
                let f = aug[rr][col].clone();
                for j in 0..total {
                    let d = aug[rowi][j].mul(&f);
                    aug[rr][j] = aug[rr][j].sub(&d);
                }
            }
        }
        pivots.push((rowi, col));
        rowi += 1;
    }
    if pivots.len() != r {
        return None;
    }
    for row in aug.iter().take(n).skip(r) {
        for x in row.iter().take(total).skip(r) {
            if !x.is_zero() {
                return None;
            }
        }
    }
    let mut c = vec![vec![Cyc::zero(cond); images.len()]; r];
    for &(rr, col) in &pivots {
        for j in 0..images.len() {
            c[col][j] = aug[rr][r + j].clone();
        }
    }
    Some(c)
}

/// Determinant of a square Cyc matrix.
pub fn cyc_det(a: &[Vec<Cyc>], cond: u32) -> Cyc {
    let n = a.len();
    let mut m: Vec<Vec<Cyc>> = a.to_vec();
    let mut det = Cyc::one(cond);
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => return Cyc::zero(cond),
        };
        if piv != col {
            m.swap(col, piv);
            det = det.neg();
        }
        det = det.mul(&m[col][col]);
        let inv = m[col][col].inv();
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = m[r][col].mul(&inv);
                for j in col..n {
                    let d = m[col][j].mul(&f);
                    m[r][j] = m[r][j].sub(&d);
                }
            }
        }
    }
    det
}

/// Kernel basis of a rectangular Cyc matrix (consumes the input).
pub fn cyc_kernel(a: &mut [Vec<Cyc>], cond: u32) -> Vec<Vec<Cyc>> {
    let n = a.len();
    let ncols = if n == 0 { 0 } else { a[0].len() };
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..ncols {
        let piv = (row..n).find(|&r| !a[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        a.swap(row, piv);
        let inv = a[row][col].inv();
        for j in 0..ncols {
            a[row][j] = a[row][j].mul(&inv);
        }
        for r in 0..n {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..ncols {
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
    let mut out = Vec::new();
    for fc in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![Cyc::zero(cond); ncols];
        v[fc] = Cyc::one(cond);
        for &(r, c) in &pivots {
            v[c] = a[r][fc].neg();
        }
        out.push(v);
    }
    out
}

/// Result of enumerating a matrix group.
pub struct EnumeratedGroup {
    pub elements: Vec<Mat>,
    pub order: usize,
}

/// BFS closure of the group generated by the given lattice matrices.
pub fn generate_group(gens: &[Mat], order_bound: usize) -> Result<EnumeratedGroup, LwError> {
    let n = gens.first().map(|g| g.n).unwrap_or(0);
    let mut seen: HashSet<Mat> = HashSet::new();
    let id = Mat::identity(n);
    seen.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = x.mul(g);
            if !seen.contains(&y) {
                if seen.len() >= order_bound {
                    return Err(LwError::EnumerationBound(order_bound));
                }
                seen.insert(y.clone());
                frontier.push(y);
            }
        }
    }
    let mut elements: Vec<Mat> = seen.into_iter().collect();
    elements.sort_by(|a, b| a.e.cmp(&b.e));
    Ok(EnumeratedGroup {
        order: elements.len(),
        elements,
    })
}

/// Integer basis of the Phi_m-primary component of theta on the cocharacter
/// lattice (the rational span of the Cartan subspace and its conjugates).
pub fn primary_component_basis(theta: &ThetaAction) -> Vec<Vec<i64>> {
    let m = &theta.w.on_coroots;
    let n = m.n;
    let phi = crate::lattice::cyclotomic_poly(theta.m as u32);
    let mut acc = Mat {
        n,
        e: vec![0; n * n],
    };
    for c in phi.0.iter().rev() {
        let ci = c.to_integer();
        let ci64 = num_traits::ToPrimitive::to_i64(&ci).expect("small coefficient");
        acc = acc.mul(m);
        for i in 0..n {
            acc.e[i * n + i] += ci64;
        }
    }
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Rat::from(crate::lattice::int(acc.at(i, j))))
                .collect()
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        let piv = (row..n).find(|&r| !a[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        a.swap(row, piv);
        let inv = a[row][col].recip();
        for j in 0..n {
            a[row][j] = &a[row][j] * &inv;
        }
        for r in 0..n {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let d = &a[row][j] * &f;
                    a[r][j] = &a[r][j] - d;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut out = Vec::new();
    for fc in (0..n).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![Rat::zero(); n];
        v[fc] = num_traits::One::one();
        for &(r, c) in &pivots {
            v[c] = -a[r][fc].clone();
        }
        let mut den = crate::lattice::int(1);
        for x in &v {
            den = num_integer::lcm(den, x.denom().clone());
        }
        let iv: Vec<i64> = v
            .iter()
            .map(|x| {
                let y = x * Rat::from(den.clone());
                num_traits::ToPrimitive::to_i64(&y.to_integer()).expect("small entry")
            })
            .collect();
        out.push(iv);
    }
    out
}

/// dim over Q(zeta_m) of the fixed space of w on the Cartan subspace, via
/// rational rank: dim_Q(ker(w - 1) cap V_prim) / phi(m).
pub fn fix_dim_on_a(w: &Mat, prim_basis: &[Vec<i64>], phi_m: usize) -> usize {
    let n = w.n;
    let k = prim_basis.len();
    let cols: Vec<Vec<i64>> = prim_basis
        .iter()
        .map(|b| {
            (0..n)
                .map(|i| {
                    let mut acc = -b[i];
                    for j in 0..n {
                        acc += w.at(i, j) * b[j];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let rows: Vec<RootVec> = (0..n)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    let refs: Vec<&RootVec> = rows.iter().collect();
    let rank = rat_rank(&refs);
    (k - rank) / phi_m
}

/// Census of the reflections of an enumerated group acting on a.
pub struct ReflectionCensus {
    /// (hyperplane stabilizer order k, number of hyperplanes of that order)
    pub counts: Vec<(usize, usize)>,
    /// Element indices of the distinguished reflections, one per hyperplane.
    pub distinguished: Vec<usize>,
    /// Total number of reflections on a.
    pub reflections: usize,
}

/// Identify reflections, hyperplanes, and distinguished reflections of the
/// enumerated group acting on the Cartan subspace.
pub fn reflection_census(
    group: &EnumeratedGroup,
    theta: &ThetaAction,
    rank: usize,
    a_basis: &[Vec<Cyc>],
) -> ReflectionCensus {
    use rayon::prelude::*;
    let prim = primary_component_basis(theta);
    let phi_m = crate::lattice::euler_phi(theta.m as u32) as usize;
    let refl_idx: Vec<usize> = group
        .elements
        .par_iter()
        .enumerate()
        .filter_map(|(i, w)| {
            if w.is_identity() {
                return None;
            }
            (fix_dim_on_a(w, &prim, phi_m) == rank - 1).then_some(i)
        })
        .collect();
    let cond = theta.m as u32;
    let mut by_hyperplane: HashMap<Vec<Vec<Rat>>, Vec<usize>> = HashMap::new();
    for &i in &refl_idx {
        let key = hyperplane_key(&group.elements[i], &prim);
        by_hyperplane.entry(key).or_default().push(i);
    }
    let mut counts: HashMap<usize, usize> = HashMap::new();
    let mut distinguished = Vec::new();
    for members in by_hyperplane.values() {
        let k = members.len() + 1;
        *counts.entry(k).or_insert(0) += 1;
        let want = Cyc::zeta_pow(cond, (theta.m / k) as i64);
        for &i in members {
            let tm = restrict_to_subspace(&group.elements[i], a_basis, cond)
                .expect("group elements stabilize a");
            if cyc_det(&tm, cond) == want {
                distinguished.push(i);
                break;
            }
        }
    }
    let mut counts: Vec<(usize, usize)> = counts.into_iter().collect();
    counts.sort();
    distinguished.sort();
    ReflectionCensus {
        counts,
        distinguished,
        reflections: refl_idx.len(),
    }
}

fn hyperplane_key(w: &Mat, prim: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    let n = w.n;
    let cols: Vec<Vec<i64>> = prim
        .iter()
        .map(|b| {
            (0..n)
                .map(|i| {
                    let mut acc = -b[i];
                    for j in 0..n {
                        acc += w.at(i, j) * b[j];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut a: Vec<Vec<Rat>> = cols
        .iter()
        .map(|c| {
            c.iter()
                .map(|&x| Rat::from(crate::lattice::int(x)))
                .collect()
        })
        .collect();
    let ncols = n;
    let mut rank = 0usize;
    for col in 0..ncols {
        let piv = (rank..a.len()).find(|&r| !a[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        a.swap(rank, piv);
        let inv = a[rank][col].recip();
        for j in 0..ncols {
            a[rank][j] = &a[rank][j] * &inv;
        }
        for r in 0..a.len() {
            if r != rank && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..ncols {
                    let d = &a[rank][j] * &f;
                    a[r][j] = &a[r][j] - d;
                }
            }
        }
        rank += 1;
    }
    a.truncate(rank);
    a
}

/// Shephard-Todd degrees of an enumerated reflection group on a, from the
/// codimension polynomial sum_w t^{codim fix(w)} = prod_i (1 + (d_i - 1) t).
pub fn reflection_degrees(group: &EnumeratedGroup, theta: &ThetaAction, rank: usize) -> Vec<usize> {
    use rayon::prelude::*;
    let prim = primary_component_basis(theta);
    let phi_m = crate::lattice::euler_phi(theta.m as u32) as usize;
    let codims: Vec<usize> = group
        .elements
        .par_iter()
        .map(|w| rank - fix_dim_on_a(w, &prim, phi_m))
        .collect();
    let mut poly = vec![0i64; rank + 1];
    for c in codims {
        poly[c] += 1;
    }
    factor_codim_poly(&poly, rank)
}

/// Factor sum c_k t^k = prod (1 + (d_i - 1) t) into the degree multiset.
/// Degrees equal to 1 (directions fixed by the whole group) pad the result
/// up to the ambient rank.
pub fn factor_codim_poly(poly: &[i64], rank: usize) -> Vec<usize> {
    let mut p = poly.to_vec();
    while p.last() == Some(&0) {
        p.pop();
    }
    let effective = p.len().saturating_sub(1);
    let mut degrees = Vec::new();
    for _ in 0..effective {
        let mut found = None;
        for d in 2..=62i64 {
            let dm1 = d - 1;
            // synthetic division by (1 + (d-1) t)
            let mut q = vec![0i64; p.len() - 1];
            let mut rem = 0i64;
            for (i, qi) in q.iter_mut().enumerate() {
                let coeff = p[i] - rem;
                *qi = coeff;
                rem = coeff * dm1;
            }
            if p[p.len() - 1] == rem && q.iter().all(|&c| c >= 0) {
                found = Some((d as usize, q));
                break;
            }
        }
        let (d, q) = found.expect("codim polynomial factors over the degrees");
        degrees.push(d);
        p = q;
    }
    while degrees.len() < rank {
        degrees.push(1);
    }
    degrees.sort();
    degrees
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::{build_theta, cartan_subspace, theta_orbits, WSpec};
    use crate::rootsys::build_root_system;

    fn setup(
        t: RootType,
        spec: WSpec,
        m: usize,
    ) -> (RootDatum, ThetaAction, Vec<Vec<usize>>, Vec<OrbitClass>) {
        let d = build_root_system(t);
        let theta = build_theta(&d, &spec, m).unwrap();
        let orbits = theta_orbits(&d, &theta).unwrap();
        let classes = partition_into_classes(&d, &theta, &orbits).unwrap();
        (d, theta, orbits, classes)
    }

    #[test]
    fn d4_3s_classes_and_g4() {
        let spec = WSpec::TwistedWordPower {
            word: vec!["1000".into(), "0100".into()],
            vartheta_order: 3,
            power: 4,
        };
        let (d, theta, _orbits, classes) = setup(RootType::D4, spec, 3);
        assert_eq!(classes.len(), 4);
        for c in &classes {
            assert_eq!(c.rtype, SubsystemType::parse("A2"));
            assert_eq!(c.orbit_count, 2);
        }
        let dists: Vec<Distinguished> = classes
            .iter()
            .map(|c| distinguished_reflection(&d, &theta, c).unwrap())
            .collect();
        let gens: Vec<Mat> = dists.iter().map(|t| t.t.on_coroots.clone()).collect();
        let g = generate_group(&gens, 1000).unwrap();
        assert_eq!(g.order, 24, "|G_4| = 24");
        let a = cartan_subspace(&theta);
        let census = reflection_census(&g, &theta, 2, &a);
        assert_eq!(census.counts, vec![(3, 4)], "4 hyperplanes of order 3");
        assert_eq!(reflection_degrees(&g, &theta, 2), vec![4, 6]);
    }

    #[test]
    fn f4_4s_classes_and_g8() {
        let (d, theta, _orbits, classes) = setup(RootType::F4, WSpec::CoxeterPower { power: 3 }, 4);
        assert_eq!(classes.len(), 6);
        for c in &classes {
            assert_eq!(c.rtype, SubsystemType::parse("B2"));
            assert_eq!(c.orbit_count, 2);
        }
        let dists: Vec<Distinguished> = classes
            .iter()
            .map(|c| distinguished_reflection(&d, &theta, c).unwrap())
            .collect();
        for t in &dists {
            assert_eq!(t.order, 4);
            assert_eq!(t.rank_one, RankOneType::B2T4);
        }
        let gens: Vec<Mat> = dists.iter().map(|t| t.t.on_coroots.clone()).collect();
        let g = generate_group(&gens, 1000).unwrap();
        assert_eq!(g.order, 96, "|G_8| = 96");
        let a = cartan_subspace(&theta);
        let census = reflection_census(&g, &theta, 2, &a);
        assert_eq!(census.counts, vec![(4, 6)]);
        assert_eq!(reflection_degrees(&g, &theta, 2), vec![8, 12]);
    }

    #[test]
    fn f4_3s_classes_and_g5() {
        let (d, theta, _orbits, classes) = setup(RootType::F4, WSpec::CoxeterPower { power: 4 }, 3);
        assert_eq!(classes.len(), 8);
        let dists: Vec<Distinguished> = classes
            .iter()
            .map(|c| distinguished_reflection(&d, &theta, c).unwrap())
            .collect();
        let gens: Vec<Mat> = dists.iter().map(|t| t.t.on_coroots.clone()).collect();
        let g = generate_group(&gens, 1000).unwrap();
        assert_eq!(g.order, 72, "|G_5| = 72");
        let a = cartan_subspace(&theta);
        let census = reflection_census(&g, &theta, 2, &a);
        assert_eq!(census.counts, vec![(3, 8)]);
        assert_eq!(reflection_degrees(&g, &theta, 2), vec![6, 12]);
    }

    #[test]
    fn g2_2s_full_weyl() {
        let (d, theta, _orbits, classes) = setup(RootType::G2, WSpec::MinusOne, 2);
        assert_eq!(classes.len(), 6);
        let dists: Vec<Distinguished> = classes
            .iter()
            .map(|c| distinguished_reflection(&d, &theta, c).unwrap())
            .collect();
        let gens: Vec<Mat> = dists.iter().map(|t| t.t.on_coroots.clone()).collect();
        let g = generate_group(&gens, 1000).unwrap();
        assert_eq!(g.order, 12);
        let a = cartan_subspace(&theta);
        let census = reflection_census(&g, &theta, 2, &a);
        assert_eq!(census.counts, vec![(2, 6)]);
        assert_eq!(reflection_degrees(&g, &theta, 2), vec![2, 6]);
    }
}

/// Claim (5.1): a point of the Cartan subspace is fixed by t_i iff every
/// root of S_i vanishes on it. Checked as: dim fix_a(t) = r - 1, all class
/// roots vanish on fix_a(t), and no root outside the class vanishes on all
/// of fix_a(t) together with the class (the latter is implied by the
/// partition being disjoint, so here we verify the first two parts).
pub fn verify_claim_51(
    datum: &RootDatum,
    theta: &ThetaAction,
    a_basis: &[Vec<Cyc>],
    class: &OrbitClass,
    dist: &Distinguished,
    cond: u32,
) -> bool {
    let r = a_basis.len();
    let tm = match restrict_to_subspace(&dist.t.on_coroots, a_basis, cond) {
        Some(m) => m,
        None => return false,
    };
    let mut rows: Vec<Vec<Cyc>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut x = tm[i][j].clone();
                    if i == j {
                        x = x.sub(&Cyc::one(cond));
                    }
                    x
                })
                .collect()
        })
        .collect();
    let fix = cyc_kernel(&mut rows, cond);
    if fix.len() != r - 1 {
        return false;
    }
    let _ = theta;
    for &k in &class.roots {
        let alpha = &datum.roots[k];
        for v in &fix {
            // alpha evaluated at sum_j v_j basis_j
            let mut acc = Cyc::zero(cond);
            for (j, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut pairing = Cyc::zero(cond);
                for i in 0..datum.rank {
                    if a_basis[j][i].is_zero() {
                        continue;
                    }
                    let p = datum.pair_simple_coroot(alpha, i);
                    if p != 0 {
                        pairing = pairing
                            .add(&a_basis[j][i].scale(&Rat::from(crate::lattice::int(p))));
                    }
                }
                acc = acc.add(&c.mul(&pairing));
            }
            if !acc.is_zero() {
                return false;
            }
        }
    }
    true
}
