//! Root systems of the exceptional types (plus D4 for the twisted cases),
//! with the simple-root labellings, Coxeter elements, and diagram
//! automorphisms used throughout.
//!
//! Roots live in the root lattice in the simple-root basis; each root carries
//! its coroot in the simple-coroot basis, so the pairing <lambda, mu-check>
//! is a pure integer computation.

use std::collections::HashMap;
use std::fmt;

use crate::lattice::IntMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootType {
    G2,
    F4,
    E6,
    E7,
    E8,
    D4,
}

impl RootType {
    pub fn rank(self) -> usize {
        match self {
            RootType::G2 => 2,
            RootType::F4 | RootType::D4 => 4,
            RootType::E6 => 6,
            RootType::E7 => 7,
            RootType::E8 => 8,
        }
    }

    pub fn num_roots(self) -> usize {
        match self {
            RootType::G2 => 12,
            RootType::F4 => 48,
            RootType::E6 => 72,
            RootType::E7 => 126,
            RootType::E8 => 240,
            RootType::D4 => 24,
        }
    }

    pub fn parse(s: &str) -> Option<RootType> {
        match s {
            "G2" => Some(RootType::G2),
            "F4" => Some(RootType::F4),
            "E6" => Some(RootType::E6),
            "E7" => Some(RootType::E7),
            "E8" => Some(RootType::E8),
            "D4" => Some(RootType::D4),
            _ => None,
        }
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub type RootVec = Vec<i64>;

/// Small square integer matrix used for Weyl-group and lattice actions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub n: usize,
    pub e: Vec<i64>,
}

impl Mat {
    pub fn identity(n: usize) -> Mat {
        let mut e = vec![0; n * n];
        for i in 0..n {
            e[i * n + i] = 1;
        }
        Mat { n, e }
    }

    pub fn minus_identity(n: usize) -> Mat {
        let mut m = Mat::identity(n);
        for x in &mut m.e {
            *x = -*x;
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.e[i * self.n + j] = v;
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat {
            n,
            e: vec![0; n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.e[i * n + j] = out.e[i * n + j]
                        .checked_add(a.checked_mul(o.at(k, j)).expect("overflow"))
                        .expect("overflow");
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }

    pub fn pow(&self, k: usize) -> Mat {
        let mut acc = Mat::identity(self.n);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.n)
    }

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

    pub fn neg(&self) -> Mat {
        Mat {
            n: self.n,
            e: self.e.iter().map(|x| -x).collect(),
        }
    }

    pub fn to_big(&self) -> IntMatrix {
        IntMatrix::from_i64(self.n, |i, j| self.at(i, j))
    }
}

/// An element of the Weyl group (or any lattice automorphism preserving R),
/// recorded by its action on the root lattice and on the coroot lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    pub on_roots: Mat,
    pub on_coroots: Mat,
}

impl WeylElement {
    pub fn identity(n: usize) -> WeylElement {
        WeylElement {
            on_roots: Mat::identity(n),
            on_coroots: Mat::identity(n),
        }
    }

    pub fn mul(&self, o: &WeylElement) -> WeylElement {
        WeylElement {
            on_roots: self.on_roots.mul(&o.on_roots),
            on_coroots: self.on_coroots.mul(&o.on_coroots),
        }
    }

    pub fn pow(&self, k: usize) -> WeylElement {
        WeylElement {
            on_roots: self.on_roots.pow(k),
            on_coroots: self.on_coroots.pow(k),
        }
    }

    pub fn inverse(&self, order_bound: usize) -> WeylElement {
        let ord = self
            .on_roots
            .order(order_bound)
            .expect("element order exceeds bound");
        self.pow(ord - 1)
    }

    pub fn neg(&self) -> WeylElement {
        WeylElement {
            on_roots: self.on_roots.neg(),
            on_coroots: self.on_coroots.neg(),
        }
    }

    pub fn apply_root(&self, v: &[i64]) -> RootVec {
        self.on_roots.apply(v)
    }

    pub fn apply_coroot(&self, v: &[i64]) -> Vec<i64> {
        self.on_coroots.apply(v)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RootSysError {
    #[error("unknown root system label {0}")]
    UnknownType(String),
    #[error("{0:?} is not a root of the system")]
    NotARoot(RootVec),
    #[error("unsupported diagram automorphism ({0}, order {1})")]
    UnsupportedAutomorphism(RootType, usize),
    #[error("root set is not a subsystem: {0}")]
    NotASubsystem(String),
}

/// A root system with its full root list, coroots, and pairing data.
#[derive(Debug, Clone)]
pub struct RootDatum {
    pub rtype: RootType,
    pub rank: usize,
    /// cartan[i][j] = <alpha_j, alpha_i^vee>
    pub cartan: Vec<Vec<i64>>,
    /// All roots in the simple-root basis, in lexicographic order.
    pub roots: Vec<RootVec>,
    /// coroots[k] = coroot of roots[k], in the simple-coroot basis.
    pub coroots: Vec<RootVec>,
    pub index: HashMap<RootVec, usize>,
    pub highest_root: RootVec,
}

fn cartan_matrix(t: RootType) -> Vec<Vec<i64>> {
    fn simply_laced(rank: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
        let mut c = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            c[i][i] = 2;
        }
        for &(a, b) in edges {
            c[a - 1][b - 1] = -1;
            c[b - 1][a - 1] = -1;
        }
        c
    }
    match t {
        // alpha_1 short, alpha_2 long; <alpha_2, alpha_1^vee> = -3
        RootType::G2 => vec![vec![2, -3], vec![-1, 2]],
        // alpha_1, alpha_2 long; alpha_3, alpha_4 short
        RootType::F4 => vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, 0],
            vec![0, -2, 2, -1],
            vec![0, 0, -1, 2],
        ],
        RootType::E6 => simply_laced(6, &[(1, 3), (3, 4), (4, 5), (5, 6), (2, 4)]),
        RootType::E7 => simply_laced(7, &[(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (2, 4)]),
        RootType::E8 => simply_laced(8, &[(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]),
        // branch node alpha_2 (alpha_i = e_i - e_{i+1} for i = 1,2,3 and
        // alpha_4 = e_3 + e_4)
        RootType::D4 => simply_laced(4, &[(1, 2), (2, 3), (2, 4)]),
    }
}

/// Construct the root system of the given type with the fixed labelling.
pub fn build_root_system(t: RootType) -> RootDatum {
    let rank = t.rank();
    let cartan = cartan_matrix(t);

    // Closure of simple roots under simple reflections, carrying coroots.
    let mut roots: Vec<RootVec> = Vec::new();
    let mut coroots: Vec<RootVec> = Vec::new();
    let mut index: HashMap<RootVec, usize> = HashMap::new();
    let mut queue: Vec<usize> = Vec::new();
    for i in 0..rank {
        let mut r = vec![0i64; rank];
        r[i] = 1;
        let mut c = vec![0i64; rank];
        c[i] = 1;
        index.insert(r.clone(), roots.len());
        queue.push(roots.len());
        roots.push(r);
        coroots.push(c);
    }
    while let Some(k) = queue.pop() {
        let (r, cr) = (roots[k].clone(), coroots[k].clone());
        for i in 0..rank {
            // s_i on the root lattice: x -> x - <x, alpha_i^vee> alpha_i
            let pr: i64 = (0..rank).map(|j| cartan[i][j] * r[j]).sum();
            let mut r2 = r.clone();
            r2[i] -= pr;
            // s_i on the coroot lattice: y -> y - <alpha_i, y> alpha_i^vee
            let pc: i64 = (0..rank).map(|kk| cartan[kk][i] * cr[kk]).sum();
            let mut c2 = cr.clone();
            c2[i] -= pc;
            if !index.contains_key(&r2) {
                index.insert(r2.clone(), roots.len());
                queue.push(roots.len());
                roots.push(r2);
                coroots.push(c2);
            }
        }
    }
    assert_eq!(roots.len(), t.num_roots(), "root count for {t:?}");

    // Sort lexicographically, rebuilding the index and coroot table.
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| roots[a].cmp(&roots[b]));
    let roots_sorted: Vec<RootVec> = order.iter().map(|&k| roots[k].clone()).collect();
    let coroots_sorted: Vec<RootVec> = order.iter().map(|&k| coroots[k].clone()).collect();
    let mut index = HashMap::new();
    for (k, r) in roots_sorted.iter().enumerate() {
        index.insert(r.clone(), k);
    }

    let highest_root = roots_sorted
        .iter()
        .max_by_key(|r| r.iter().sum::<i64>())
        .unwrap()
        .clone();

    RootDatum {
        rtype: t,
        rank,
        cartan,
        roots: roots_sorted,
        coroots: coroots_sorted,
        index,
        highest_root,
    }
}

impl RootDatum {
    pub fn root_index(&self, r: &[i64]) -> Option<usize> {
        self.index.get(r).copied()
    }

    pub fn is_root(&self, r: &[i64]) -> bool {
        self.index.contains_key(r)
    }

    /// <lambda, mu^vee> for lambda in the root basis, mu^vee in the coroot basis.
    pub fn pair(&self, lambda: &[i64], mu_vee: &[i64]) -> i64 {
        let mut acc = 0i64;
        for i in 0..self.rank {
            if mu_vee[i] == 0 {
                continue;
            }
            let row: i64 = (0..self.rank).map(|j| self.cartan[i][j] * lambda[j]).sum();
            acc += mu_vee[i] * row;
        }
        acc
    }

    /// Pairing of a root-basis vector against the i-th simple coroot.
    pub fn pair_simple_coroot(&self, lambda: &[i64], i: usize) -> i64 {
        (0..self.rank).map(|j| self.cartan[i][j] * lambda[j]).sum()
    }

    pub fn coroot_of(&self, r: &[i64]) -> Option<&RootVec> {
        self.root_index(r).map(|k| &self.coroots[k])
    }

    /// Reflection in the given root.
    pub fn reflection(&self, alpha: &[i64]) -> Result<WeylElement, RootSysError> {
        let k = self
            .root_index(alpha)
            .ok_or_else(|| RootSysError::NotARoot(alpha.to_vec()))?;
        let cr = &self.coroots[k];
        let n = self.rank;
        let mut on_roots = Mat::identity(n);
        let mut on_coroots = Mat::identity(n);
        for j in 0..n {
            // image of alpha_j: alpha_j - <alpha_j, alpha^vee> alpha
            let mut ej = vec![0i64; n];
            ej[j] = 1;
            let p = self.pair(&ej, cr);
            for i in 0..n {
                on_roots.set(i, j, (i == j) as i64 - p * alpha[i]);
            }
            // image of alpha_j^vee: alpha_j^vee - <alpha, alpha_j^vee> alpha^vee
            let pv = self.pair(alpha, &ej);
            for i in 0..n {
                on_coroots.set(i, j, (i == j) as i64 - pv * cr[i]);
            }
        }
        Ok(WeylElement {
            on_roots,
            on_coroots,
        })
    }

    pub fn simple_reflection(&self, i: usize) -> WeylElement {
        let mut alpha = vec![0i64; self.rank];
        alpha[i] = 1;
        self.reflection(&alpha).unwrap()
    }

    /// Product of reflections, applied right to left: word [a, b] is s_a s_b.
    pub fn reflection_word(&self, word: &[RootVec]) -> Result<WeylElement, RootSysError> {
        let mut acc = WeylElement::identity(self.rank);
        for r in word {
            acc = acc.mul(&self.reflection(r)?);
        }
        Ok(acc)
    }

    /// The Coxeter element w_h fixed for this type.
    pub fn coxeter_element(&self) -> WeylElement {
        let word: &[usize] = match self.rtype {
            RootType::G2 => &[1, 2],
            RootType::F4 => &[1, 2, 3, 4],
            RootType::E6 => &[1, 4, 6, 3, 5, 2],
            RootType::E7 => &[1, 4, 3, 5, 7, 6, 2],
            RootType::E8 => &[1, 4, 6, 8, 3, 2, 5, 7],
            RootType::D4 => &[1, 2, 3, 4],
        };
        word.iter()
            .fold(WeylElement::identity(self.rank), |acc, &i| {
                acc.mul(&self.simple_reflection(i - 1))
            })
    }

    /// Pinned diagram automorphism of the given order, as a lattice map.
    pub fn diagram_automorphism(&self, order: usize) -> Result<WeylElement, RootSysError> {
        let perm: Vec<usize> = match (self.rtype, order) {
            // alpha_1 -> alpha_4 -> alpha_3 -> alpha_1, alpha_2 fixed
            (RootType::D4, 3) => vec![4, 2, 1, 3],
            (RootType::D4, 2) => vec![1, 2, 4, 3],
            (RootType::E6, 2) => vec![6, 2, 5, 4, 3, 1],
            (t, o) => return Err(RootSysError::UnsupportedAutomorphism(t, o)),
        };
        let n = self.rank;
        let mut m = Mat {
            n,
            e: vec![0; n * n],
        };
        for (j, &img) in perm.iter().enumerate() {
            m.set(img - 1, j, 1);
        }
        let w = WeylElement {
            on_roots: m.clone(),
            on_coroots: m,
        };
        debug_assert!(w.pow(order).on_roots.is_identity());
        Ok(w)
    }

    /// Check that a lattice map permutes R and preserves the pairing.
    pub fn permutes_roots(&self, w: &WeylElement) -> bool {
        self.roots.iter().all(|r| self.is_root(&w.apply_root(r)))
    }

    /// Positivity with respect to a fixed generic functional (no root of any
    /// subsystem of the ambient systems pairs to zero with it).
    fn generic_height(&self, r: &[i64]) -> i64 {
        let mut acc = 0i64;
        let mut w = 1i64;
        for &x in r {
            acc += x * w;
            w *= 101;
        }
        acc
    }

    /// Classify a negation-closed, reflection-closed set of roots.
    pub fn subsystem_type(&self, roots: &[RootVec]) -> Result<SubsystemType, RootSysError> {
        use std::collections::HashSet;
        let set: HashSet<&RootVec> = roots.iter().collect();
        if set.is_empty() {
            return Ok(SubsystemType(vec![]));
        }
        for r in roots {
            if !self.is_root(r) {
                return Err(RootSysError::NotARoot(r.clone()));
            }
            let neg: RootVec = r.iter().map(|x| -x).collect();
            if !set.contains(&neg) {
                return Err(RootSysError::NotASubsystem(format!(
                    "not closed under negation at {r:?}"
                )));
            }
        }
        // closure under internal reflections
        for a in roots {
            let s = self.reflection(a)?;
            for b in roots {
                let img = s.apply_root(b);
                if !set.contains(&img) {
                    return Err(RootSysError::NotASubsystem(format!(
                        "s_{a:?}({b:?}) escapes the set"
                    )));
                }
            }
        }
        // positive half and its simple system
        let pos: Vec<&RootVec> = roots.iter().filter(|r| self.generic_height(r) > 0).collect();
        if 2 * pos.len() != roots.len() {
            return Err(RootSysError::NotASubsystem(
                "generic functional vanishes on the set".into(),
            ));
        }
        let pos_set: HashSet<&RootVec> = pos.iter().copied().collect();
        let mut simples: Vec<RootVec> = Vec::new();
        for r in &pos {
            let decomposable = pos.iter().any(|a| {
                let rem: RootVec = r.iter().zip(a.iter()).map(|(x, y)| x - y).collect();
                !rem.iter().all(|&x| x == 0) && pos_set.contains(&rem)
            });
            if !decomposable {
                simples.push((*r).clone());
            }
        }
        simples.sort();
        self.classify_simple_system(&simples)
    }

    fn classify_simple_system(&self, simples: &[RootVec]) -> Result<SubsystemType, RootSysError> {
        let k = simples.len();
        let crs: Vec<&RootVec> = simples
            .iter()
            .map(|r| self.coroot_of(r).expect("simple roots are roots"))
            .collect();
        // local Cartan matrix c[i][j] = <beta_j, beta_i^vee>
        let mut c = vec![vec![0i64; k]; k];
        for i in 0..k {
            for j in 0..k {
                c[i][j] = self.pair(&simples[j], crs[i]);
            }
        }
        for i in 0..k {
            if c[i][i] != 2 {
                return Err(RootSysError::NotASubsystem(
                    "chosen simple system is not reduced".into(),
                ));
            }
        }
        // split into connected components
        let mut comp = vec![usize::MAX; k];
        let mut ncomp = 0;
        for start in 0..k {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = ncomp;
            while let Some(i) = stack.pop() {
                for j in 0..k {
                    if comp[j] == usize::MAX && c[i][j] != 0 {
                        comp[j] = ncomp;
                        stack.push(j);
                    }
                }
            }
            ncomp += 1;
        }
        let mut parts: Vec<SimpleType> = Vec::new();
        for cid in 0..ncomp {
            let verts: Vec<usize> = (0..k).filter(|&i| comp[i] == cid).collect();
            parts.push(classify_component(&c, &verts)?);
        }
        parts.sort_by(|a, b| {
            b.rank
                .cmp(&a.rank)
                .then(a.letter.cmp(&b.letter))
        });
        Ok(SubsystemType(parts))
    }
}

/// One irreducible factor of a subsystem type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimpleType {
    pub letter: char,
    pub rank: usize,
}

/// Canonical reducible type: factors sorted by descending rank then letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemType(pub Vec<SimpleType>);

impl SubsystemType {
    pub fn parse(s: &str) -> SubsystemType {
        // e.g. "A2", "A1^2", "D6xA1", "A3xA1^2"
        let mut parts = Vec::new();
        for piece in s.split('x') {
            let (base, mult) = match piece.split_once('^') {
                Some((b, m)) => (b, m.parse::<usize>().unwrap()),
                None => (piece, 1),
            };
            let letter = base.chars().next().unwrap();
            let rank: usize = base[1..].parse().unwrap();
            for _ in 0..mult {
                parts.push(SimpleType { letter, rank });
            }
        }
        parts.sort_by(|a, b| b.rank.cmp(&a.rank).then(a.letter.cmp(&b.letter)));
        SubsystemType(parts)
    }

    pub fn total_rank(&self) -> usize {
        self.0.iter().map(|p| p.rank).sum()
    }
}

impl fmt::Display for SubsystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        let mut first = true;
        while i < self.0.len() {
            let t = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == t {
                j += 1;
            }
            if !first {
                write!(f, "x")?;
            }
            write!(f, "{}{}", t.letter, t.rank)?;
            if j - i > 1 {
                write!(f, "^{}", j - i)?;
            }
            first = false;
            i = j;
        }
        Ok(())
    }
}

fn classify_component(c: &[Vec<i64>], verts: &[usize]) -> Result<SimpleType, RootSysError> {
    let k = verts.len();
    let bond = |i: usize, j: usize| c[verts[i]][verts[j]] * c[verts[j]][verts[i]];
    if k == 1 {
        return Ok(SimpleType {
            letter: 'A',
            rank: 1,
        });
    }
    let mut max_bond = 0;
    let mut degrees = vec![0usize; k];
    for i in 0..k {
        for j in 0..k {
            if i != j && bond(i, j) > 0 {
                degrees[i] += 1;
                max_bond = max_bond.max(bond(i, j));
            }
        }
    }
    let letter = match max_bond {
        3 => {
            if k == 2 {
                return Ok(SimpleType {
                    letter: 'G',
                    rank: 2,
                });
            }
            return Err(RootSysError::NotASubsystem("triple bond in rank > 2".into()));
        }
        2 => {
            if k == 2 {
                return Ok(SimpleType {
                    letter: 'B',
                    rank: 2,
                });
            }
            // B_n, C_n or F_4: locate the double bond
            let mut pair = None;
            for i in 0..k {
                for j in 0..k {
                    if i < j && bond(i, j) == 2 {
                        pair = Some((i, j));
                    }
                }
            }
            let (i, j) = pair.unwrap();
            if degrees.iter().all(|&d| d <= 2) {
                let ends: Vec<usize> = (0..k).filter(|&v| degrees[v] == 1).collect();
                if ends.len() != 2 {
                    return Err(RootSysError::NotASubsystem("double bond in a cycle".into()));
                }
                // F4 when the double bond is interior; otherwise B or C by
                // which end is short. c[long][short-coroot] = -2, so
                // c[verts[a]][verts[b]] = -2 means a is the long one.
                let at_end = |v: usize| degrees[v] == 1;
                if !at_end(i) && !at_end(j) {
                    if k == 4 {
                        return Ok(SimpleType {
                            letter: 'F',
                            rank: 4,
                        });
                    }
                    return Err(RootSysError::NotASubsystem(
                        "interior double bond outside F4".into(),
                    ));
                }
                // the end vertex adjacent to the double bond
                let end_v = if at_end(i) { i } else { j };
                let other = if end_v == i { j } else { i };
                // c[end][other] = <beta_other, beta_end^vee> = -2 exactly
                // when the neighbor is long and the end is short => B_n
                let end_is_short = c[verts[end_v]][verts[other]] == -2;
                return Ok(SimpleType {
                    letter: if end_is_short { 'B' } else { 'C' },
                    rank: k,
                });
            }
            return Err(RootSysError::NotASubsystem("branched multiply-laced".into()));
        }
        1 => {
            let branch: Vec<usize> = (0..k).filter(|&v| degrees[v] == 3).collect();
            match branch.len() {
                0 => 'A',
                1 => {
                    // leg lengths from the branch node
                    let b = branch[0];
                    let mut legs = Vec::new();
                    for n0 in 0..k {
                        if n0 == b || bond(b, n0) == 0 {
                            continue;
                        }
                        let mut len = 1;
                        let mut prev = b;
                        let mut cur = n0;
                        loop {
                            let next = (0..k)
                                .find(|&v| v != prev && v != cur && bond(cur, v) > 0);
                            match next {
                                Some(v) => {
                                    prev = cur;
                                    cur = v;
                                    len += 1;
                                }
                                None => break,
                            }
                        }
                        legs.push(len);
                    }
                    legs.sort();
                    match legs.as_slice() {
                        [1, 1, _] => 'D',
                        [1, 2, 2] => 'E',
                        [1, 2, 3] => 'E',
                        [1, 2, 4] => 'E',
                        _ => {
                            return Err(RootSysError::NotASubsystem(format!(
                                "unrecognized branched diagram, legs {legs:?}"
                            )))
                        }
                    }
                }
                _ => {
                    return Err(RootSysError::NotASubsystem(
                        "more than one branch node".into(),
                    ))
                }
            }
        }
        _ => unreachable!("disconnected component"),
    };
    Ok(SimpleType { letter, rank: k })
}

/// E8 change of basis: a root given in doubled e-coordinates (so that the
/// half-integer roots become integral) expressed in the simple-root basis.
pub fn e8_root_from_doubled_e_coords(v: &[i64; 8]) -> RootVec {
    // 2*alpha_1 = e1 + e8 - e2 - ... - e7, 2*alpha_2 = 2 e1 + 2 e2,
    // 2*alpha_i = 2(e_{i-1} - e_{i-2}) for i = 3..8.
    let cols: [[i64; 8]; 8] = [
        [1, -1, -1, -1, -1, -1, -1, 1],
        [2, 2, 0, 0, 0, 0, 0, 0],
        [-2, 2, 0, 0, 0, 0, 0, 0],
        [0, -2, 2, 0, 0, 0, 0, 0],
        [0, 0, -2, 2, 0, 0, 0, 0],
        [0, 0, 0, -2, 2, 0, 0, 0],
        [0, 0, 0, 0, -2, 2, 0, 0],
        [0, 0, 0, 0, 0, -2, 2, 0],
    ];
    // solve sum_j x_j col_j = v by rational elimination
    use crate::lattice::Rat;
    use num_traits::Zero;
    let mut a: Vec<Vec<Rat>> = (0..8)
        .map(|r| {
            (0..9)
                .map(|cidx| {
                    if cidx < 8 {
                        Rat::from(crate::lattice::int(cols[cidx][r]))
                    } else {
                        Rat::from(crate::lattice::int(v[r]))
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..8 {
        let piv = (col..8).find(|&r| !a[r][col].is_zero()).expect("basis");
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for j in 0..9 {
            a[col][j] = &a[col][j] * &inv;
        }
        for r in 0..8 {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..9 {
                    let d = &a[col][j] * &f;
                    a[r][j] = &a[r][j] - d;
                }
            }
        }
    }
    (0..8)
        .map(|r| {
            assert!(a[r][8].is_integer(), "not in the root lattice");
            num_traits::ToPrimitive::to_i64(&a[r][8].to_integer()).unwrap()
        })
        .collect()
}

/// Parse a root in the digit-string notation: "1120", "-0101000",
/// or comma-separated for coefficients >= 10.
pub fn parse_root(s: &str) -> RootVec {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let v: Vec<i64> = if body.contains(',') {
        body.split(',').map(|d| d.parse::<i64>().unwrap()).collect()
    } else {
        body.chars()
            .map(|c| c.to_digit(10).expect("digit") as i64)
            .collect()
    };
    if neg {
        v.into_iter().map(|x| -x).collect()
    } else {
        v
    }
}

pub fn root_string(r: &[i64]) -> String {
    let neg = r.iter().all(|&x| x <= 0) && r.iter().any(|&x| x < 0);
    let v: Vec<i64> = if neg { r.iter().map(|x| -x).collect() } else { r.to_vec() };
    let body: String = if v.iter().any(|&x| x >= 10) {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    } else {
        v.iter().map(|x| x.to_string()).collect()
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_highest_roots() {
        for (t, hi) in [
            (RootType::G2, vec![3, 2]),
            (RootType::F4, vec![2, 3, 4, 2]),
            (RootType::E6, vec![1, 2, 2, 3, 2, 1]),
            (RootType::E7, vec![2, 2, 3, 4, 3, 2, 1]),
            (RootType::E8, vec![2, 3, 4, 6, 5, 4, 3, 2]),
            (RootType::D4, vec![1, 2, 1, 1]),
        ] {
            let d = build_root_system(t);
            assert_eq!(d.roots.len(), t.num_roots());
            assert_eq!(d.highest_root, hi, "highest root of {t:?}");
            // R = -R
            for r in &d.roots {
                let neg: RootVec = r.iter().map(|x| -x).collect();
                assert!(d.is_root(&neg));
            }
        }
    }

    #[test]
    fn reflections_are_involutions_permuting_r() {
        let d = build_root_system(RootType::F4);
        for k in [0usize, 5, 17, 40] {
            let alpha = d.roots[k].clone();
            let s = d.reflection(&alpha).unwrap();
            assert!(d.permutes_roots(&s));
            assert!(s.mul(&s).on_roots.is_identity());
            let img = s.apply_root(&alpha);
            let neg: RootVec = alpha.iter().map(|x| -x).collect();
            assert_eq!(img, neg);
        }
    }

    #[test]
    fn coxeter_images_match_paper() {
        // F4: (w_h alpha_i) = 0100, 1120, 0001, -1111
        let d = build_root_system(RootType::F4);
        let w = d.coxeter_element();
        let images: Vec<RootVec> = (0..4)
            .map(|i| {
                let mut e = vec![0; 4];
                e[i] = 1;
                w.apply_root(&e)
            })
            .collect();
        assert_eq!(images[0], parse_root("0100"));
        assert_eq!(images[1], parse_root("1120"));
        assert_eq!(images[2], parse_root("0001"));
        assert_eq!(images[3], parse_root("-1111"));
    }

    #[test]
    fn coxeter_orders() {
        for (t, h) in [
            (RootType::G2, 6),
            (RootType::F4, 12),
            (RootType::E6, 12),
            (RootType::E7, 18),
            (RootType::E8, 30),
        ] {
            let d = build_root_system(t);
            let w = d.coxeter_element();
            assert_eq!(w.on_roots.order(40), Some(h), "Coxeter number of {t:?}");
        }
    }

    #[test]
    fn pairing_invariance() {
        let d = build_root_system(RootType::E6);
        let w = d.coxeter_element();
        for a in [0usize, 3, 10, 30] {
            for b in [1usize, 7, 20, 50] {
                let lam = &d.roots[a];
                let mu = &d.coroots[b];
                let p0 = d.pair(lam, mu);
                let p1 = d.pair(&w.apply_root(lam), &w.apply_coroot(mu));
                assert_eq!(p0, p1);
            }
        }
    }

    #[test]
    fn subsystem_full_f4() {
        let d = build_root_system(RootType::F4);
        let t = d.subsystem_type(&d.roots).unwrap();
        assert_eq!(t, SubsystemType::parse("F4"));
        assert_eq!(t.to_string(), "F4");
    }

    #[test]
    fn e8_e_coordinates() {
        // alpha_7 = e6 - e5
        let r = e8_root_from_doubled_e_coords(&[0, 0, 0, 0, -2, 2, 0, 0]);
        let mut e7v = vec![0i64; 8];
        e7v[6] = 1;
        assert_eq!(r, e7v);
        // e1 + e2 = alpha_2
        let r = e8_root_from_doubled_e_coords(&[2, 2, 0, 0, 0, 0, 0, 0]);
        let mut e2v = vec![0i64; 8];
        e2v[1] = 1;
        assert_eq!(r, e2v);
    }

    #[test]
    fn g2_coxeter_order_from_simple_reflections() {
        let d = build_root_system(RootType::G2);
        let s1 = d.simple_reflection(0);
        let s2 = d.simple_reflection(1);
        assert_eq!(s1.mul(&s2).on_roots.order(10), Some(6));
    }

    #[test]
    fn d4_triality() {
        let d = build_root_system(RootType::D4);
        let v = d.diagram_automorphism(3).unwrap();
        assert!(v.pow(3).on_roots.is_identity());
        assert!(!v.on_roots.is_identity());
        assert!(d.permutes_roots(&v));
    }
}
