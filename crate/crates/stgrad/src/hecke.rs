//! Cyclotomic Hecke algebra descriptors: rank-one relations, the lift
//! R_{chi,s}(z) = Rbar(z^{e_s}), assembly of the per-conjugacy-class
//! relation lists, and reflection-group fingerprinting.

use std::collections::HashSet;

use crate::lattice::CycloFactorization;
use crate::littleweyl::{EnumeratedGroup, RankOneType};
use crate::rootsys::{Mat, SubsystemType};

#[derive(Debug, thiserror::Error)]
pub enum HeckeError {
    #[error("restriction order {d} is not valid for rank-one type {t:?}")]
    BadRestriction { t: RankOneType, d: u64 },
    #[error("R_{{chi,s}} is not expressible in z^{0}")]
    NotDeflatable(usize),
    #[error("conjugate distinguished reflections carry different relations")]
    InconsistentClass,
}

/// The rank-one relation R_{chi_s} from the reduction table.
pub fn rank_one_relation(t: RankOneType, d: u64) -> Result<CycloFactorization, HeckeError> {
    t.relation(d).ok_or(HeckeError::BadRestriction { t, d })
}

/// Lift a rank-one relation: R_{chi,s}(z) = R_{chi_s}(z^{ell_s}) and the
/// Hecke relation Rbar with Rbar(z^{e_s}) = R_{chi,s}(z).
pub fn lift_relation(
    r: &CycloFactorization,
    ell: usize,
    e: usize,
) -> Result<(CycloFactorization, CycloFactorization), HeckeError> {
    let lifted = r.inflate(ell);
    let rbar = lifted.deflate(e).ok_or(HeckeError::NotDeflatable(e))?;
    Ok((lifted, rbar))
}

/// One relation of a Hecke descriptor: the order of the distinguished
/// reflections in the class and the polynomial.
pub type HeckeRelation = (usize, CycloFactorization);

/// Canonical descriptor: sorted, deduplicated (order, relation) pairs over
/// the conjugacy classes of distinguished reflections of W_chi^0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeDescriptor {
    pub relations: Vec<HeckeRelation>,
}

impl HeckeDescriptor {
    pub fn from_pairs(mut pairs: Vec<HeckeRelation>) -> Self {
        pairs.sort();
        pairs.dedup();
        HeckeDescriptor { relations: pairs }
    }

    /// Assemble from per-class data: for each class i of the ambient
    /// partition, its reflection order n_i, fix exponent e_i, restriction
    /// order d_i, rank-one type, and the conjugacy class id of t_i^{e_i} in
    /// W_chi^0 (classes with e_i = n_i contribute nothing and carry id None).
    pub fn assemble(
        per_class: &[(RankOneType, usize, u64, Option<usize>)],
    ) -> Result<HeckeDescriptor, HeckeError> {
        use std::collections::HashMap;
        let mut by_conj: HashMap<usize, HeckeRelation> = HashMap::new();
        for &(t, e, d, conj) in per_class {
            let n = t.ns();
            if e == n {
                continue;
            }
            let conj = conj.expect("active class must carry a conjugacy id");
            let r = rank_one_relation(t, d)?;
            let (_, rbar) = lift_relation(&r, 1, e)?;
            let rel = (n / e, rbar);
            match by_conj.get(&conj) {
                None => {
                    by_conj.insert(conj, rel);
                }
                Some(prev) => {
                    if *prev != rel {
                        return Err(HeckeError::InconsistentClass);
                    }
                }
            }
        }
        Ok(HeckeDescriptor::from_pairs(by_conj.into_values().collect()))
    }

    /// Parse the catalog notation: relations like "3:1^3" (order 3, Phi_1^3)
    /// separated by commas, cyclotomic factors "d^m" separated by spaces.
    pub fn parse(s: &str) -> HeckeDescriptor {
        let mut pairs = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (ord, cyc) = part.split_once(':').expect("order:relation");
            pairs.push((ord.parse().unwrap(), parse_cyclo(cyc)));
        }
        HeckeDescriptor::from_pairs(pairs)
    }

    pub fn to_notation(&self) -> String {
        self.relations
            .iter()
            .map(|(o, r)| format!("{o}:{}", cyclo_notation(r)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Parse "1^5 2^3 4" into Phi_1^5 Phi_2^3 Phi_4.
pub fn parse_cyclo(s: &str) -> CycloFactorization {
    let mut f = CycloFactorization::one();
    for tok in s.split_whitespace() {
        match tok.split_once('^') {
            Some((d, m)) => f.push(d.parse().unwrap(), m.parse().unwrap()),
            None => f.push(tok.parse().unwrap(), 1),
        }
    }
    f
}

pub fn cyclo_notation(f: &CycloFactorization) -> String {
    if f.0.is_empty() {
        return "1".into();
    }
    f.0.iter()
        .map(|(&d, &m)| {
            if m == 1 {
                format!("{d}")
            } else {
                format!("{d}^{m}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Conjugacy classes of a set of elements inside an enumerated group,
/// computed by closing each element under conjugation by the generators.
/// Returns, for each input element, its class id.
pub fn conjugacy_ids(gens: &[Mat], elements: &[Mat]) -> Vec<usize> {
    let mut ids = vec![usize::MAX; elements.len()];
    let mut next = 0usize;
    let inverses: Vec<Mat> = gens
        .iter()
        .map(|g| {
            let ord = g.order(64).expect("generator has finite order");
            g.pow(ord - 1)
        })
        .collect();
    for i in 0..elements.len() {
        if ids[i] != usize::MAX {
            continue;
        }
        // close under conjugation
        let mut orbit: HashSet<Mat> = HashSet::new();
        orbit.insert(elements[i].clone());
        let mut frontier = vec![elements[i].clone()];
        while let Some(x) = frontier.pop() {
            for (g, gi) in gens.iter().zip(&inverses) {
                let y = g.mul(&x).mul(gi);
                if orbit.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        for (j, e) in elements.iter().enumerate() {
            if orbit.contains(e) {
                ids[j] = next;
            }
        }
        next += 1;
    }
    ids
}

/// A recognized reflection group, for fingerprint comparison with the
/// catalog labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupFingerprint {
    pub order: u64,
    /// Shephard-Todd degrees, sorted.
    pub degrees: Vec<usize>,
}

/// Identify a fingerprint against the reflection groups appearing in the
/// tables. Cyclic factors render as mu_d.
pub fn identify_group(fp: &GroupFingerprint) -> Option<String> {
    let named: &[(u64, &[usize], &str)] = &[
        (24, &[4, 6], "G4"),
        (72, &[6, 12], "G5"),
        (96, &[8, 12], "G8"),
        (192, &[8, 24], "G9"),
        (288, &[12, 24], "G10"),
        (600, &[20, 30], "G16"),
        (648, &[6, 9, 12], "G25"),
        (1296, &[6, 12, 18], "G26"),
        (46080, &[8, 12, 20, 24], "G31"),
        (155520, &[12, 18, 24, 30], "G32"),
        (32, &[4, 8], "G(4,1,2)"),
        (64, &[8, 8], "G(8,2,2)"),
        (3072, &[4, 8, 8, 12], "G(4,2,4)"),
        (1944, &[3, 6, 9, 12], "G25xmu3"),
        (12, &[2, 6], "W(G2)"),
        (1152, &[2, 6, 8, 12], "W(F4)"),
        (51840, &[2, 5, 6, 8, 9, 12], "W(E6)"),
        (2903040, &[2, 6, 8, 10, 12, 14, 18], "W(E7)"),
        (696729600, &[2, 8, 12, 14, 18, 20, 24, 30], "W(E8)"),
    ];
    for &(o, d, name) in named {
        if fp.order == o && fp.degrees == d {
            return Some(name.to_string());
        }
    }
    // products of cyclic groups: degrees (d_1, ..., d_k) with order prod d_i;
    // degree-1 entries are fixed directions and drop out
    let prod: u64 = fp.degrees.iter().map(|&d| d as u64).product();
    if prod == fp.order {
        let degrees: Vec<usize> = fp.degrees.iter().copied().filter(|&d| d > 1).collect();
        let mut s = String::new();
        let mut i = 0;
        while i < degrees.len() {
            let d = degrees[i];
            let mut j = i;
            while j < degrees.len() && degrees[j] == d {
                j += 1;
            }
            if !s.is_empty() {
                s.push('x');
            }
            if j - i > 1 {
                s.push_str(&format!("mu{}^{}", d, j - i));
            } else {
                s.push_str(&format!("mu{d}"));
            }
            i = j;
        }
        if s.is_empty() {
            s = "1".into();
        }
        return Some(s);
    }
    None
}

/// Fingerprint of an enumerated group on a.
pub fn fingerprint(
    group: &EnumeratedGroup,
    theta: &crate::grading::ThetaAction,
    rank: usize,
) -> GroupFingerprint {
    GroupFingerprint {
        order: group.order as u64,
        degrees: crate::littleweyl::reflection_degrees(group, theta, rank),
    }
}

/// Weyl-group label and order for a subsystem type (the m = 2 route).
pub fn weyl_label(t: &SubsystemType) -> (String, u64) {
    let mut order: u64 = 1;
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < t.0.len() {
        let p = t.0[i];
        let mut j = i;
        while j < t.0.len() && t.0[j] == p {
            j += 1;
        }
        let mult = (j - i) as u64;
        let (label, ord): (String, u64) = match p.letter {
            'A' => (
                format!("S{}", p.rank + 1),
                (1..=p.rank as u64 + 1).product(),
            ),
            'B' | 'C' => (
                format!("W{}", p.rank),
                (1..=p.rank as u64).product::<u64>() * (1u64 << p.rank),
            ),
            'D' => (
                format!("W{}'", p.rank),
                (1..=p.rank as u64).product::<u64>() * (1u64 << (p.rank - 1)),
            ),
            'E' => match p.rank {
                6 => ("W(E6)".into(), 51840),
                7 => ("W(E7)".into(), 2903040),
                8 => ("W(E8)".into(), 696729600),
                _ => unreachable!(),
            },
            'F' => ("W(F4)".into(), 1152),
            'G' => ("W(G2)".into(), 12),
            _ => unreachable!(),
        };
        for _ in 0..mult {
            order *= ord;
        }
        if mult > 1 {
            parts.push(format!("{label}^{mult}"));
        } else {
            parts.push(label);
        }
        i = j;
    }
    (parts.join("x"), order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_one_rows() {
        // (B_2, 4_s) nontrivial: (z^2 - 1)^2
        let r = rank_one_relation(RankOneType::B2T4, 2).unwrap();
        assert_eq!(r, CycloFactorization::from_pairs(&[(1, 2), (2, 2)]));
        // (3D_4, 12_s): (z-1)^3 (z+1)
        let r = rank_one_relation(RankOneType::TwD4T12, 1).unwrap();
        assert_eq!(r, CycloFactorization::from_pairs(&[(1, 3), (2, 1)]));
    }

    #[test]
    fn lift_and_deflate() {
        // (z-1) lifted by ell = 3: z^3 - 1 = Phi_1 Phi_3
        let r = CycloFactorization::from_pairs(&[(1, 1)]);
        let (lifted, rbar) = lift_relation(&r, 3, 1).unwrap();
        assert_eq!(lifted, CycloFactorization::from_pairs(&[(1, 1), (3, 1)]));
        assert_eq!(rbar, lifted);
        // (z^2-1)^2 with e = 2 deflates to Phi_1^2
        let r = CycloFactorization::from_pairs(&[(1, 2), (2, 2)]);
        let (_, rbar) = lift_relation(&r, 1, 2).unwrap();
        assert_eq!(rbar, CycloFactorization::from_pairs(&[(1, 2)]));
        // e = n: z^3 - 1 deflates by 3 to z - 1
        let r = CycloFactorization::from_pairs(&[(1, 1), (3, 1)]);
        let (_, rbar) = lift_relation(&r, 1, 3).unwrap();
        assert_eq!(rbar, CycloFactorization::from_pairs(&[(1, 1)]));
    }

    #[test]
    fn parse_and_render() {
        let d = HeckeDescriptor::parse("2:1^2, 4:1^3 2");
        assert_eq!(d.relations.len(), 2);
        assert_eq!(d.to_notation(), "2:1^2,4:1^3 2");
    }

    #[test]
    fn weyl_labels() {
        let (l, o) = weyl_label(&SubsystemType::parse("D6xA1"));
        assert_eq!(l, "W6'xS2");
        assert_eq!(o, 23040 * 2);
        let (l, o) = weyl_label(&SubsystemType::parse("A7"));
        assert_eq!(l, "S8");
        assert_eq!(o, 40320);
    }
}
