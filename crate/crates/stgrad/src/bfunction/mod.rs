//! Rank-one gradings computed through prehomogeneous vector spaces: exact
//! semi-invariant verification, b-functions via D f^s u = b(s) f^{s-1} u,
//! cyclotomic assembly b_exp, and the G2 nilpotent orbit classifier.

mod engine;
mod g2;
mod parse;

pub use engine::{b_function_on_grid, BfnEngine};
pub use g2::{classify_orbit_g2, g2_grid_check, g2_point_counts, G2Orbit};
pub use parse::{parse_affine_form, parse_poly, AffineForm};

use num_traits::{ToPrimitive, Zero};

use crate::catalog::{parse_rat, CaseRecord, PrehomData};
use crate::cli::CaseReport;
use crate::lattice::{mod1, CycloFactorization, MultiPoly, Rat};

#[derive(Debug, thiserror::Error)]
pub enum BfnError {
    #[error("roots do not assemble into complete cyclotomic packets (residue {0} mod {1})")]
    IncompletePacket(i64, u64),
    #[error("semi-invariant {0} is not invariant under generator {1}")]
    NotInvariant(String, String),
    #[error("semi-invariant {0} is not homogeneous for the torus")]
    NotHomogeneous(String),
    #[error("weight of {0} does not match the stated character modulo the torus relations")]
    WrongCharacter(String),
    #[error("f vanishes at the stored generic point")]
    DegeneratePoint,
    #[error("D f^s u is not proportional to f^{{s-1}} u at grid point {0:?}")]
    NotEigen(Vec<Rat>),
    #[error("b-function disagrees with the stated roots at {0:?}")]
    RootMismatch(Vec<Rat>),
    #[error("two generic points disagree (wrong pairing convention?)")]
    PointDependent,
}

/// Assemble exp(2 pi i a_j) over the given rational roots into a product of
/// cyclotomic polynomials. Fails when the multiset is not Galois-stable.
pub fn b_exp(roots: &[Rat]) -> Result<CycloFactorization, BfnError> {
    use std::collections::BTreeMap;
    let mut by_den: BTreeMap<u64, BTreeMap<i64, u32>> = BTreeMap::new();
    for r in roots {
        let v = mod1(r);
        let den = v.denom().to_u64().unwrap();
        let num = v.numer().to_i64().unwrap();
        *by_den.entry(den).or_default().entry(num).or_insert(0) += 1;
    }
    let mut out = CycloFactorization::one();
    for (den, counts) in by_den {
        // all residues coprime to den must appear with equal multiplicity
        let mut mult: Option<u32> = None;
        for k in 0..den as i64 {
            if num_integer::gcd(k, den as i64) != 1 {
                continue;
            }
            let c = counts.get(&k).copied().unwrap_or(0);
            match mult {
                None => mult = Some(c),
                Some(m) if m == c => {}
                Some(_) => return Err(BfnError::IncompletePacket(k, den)),
            }
        }
        // non-coprime residues would have been reduced to a smaller denominator
        if counts.keys().any(|&k| num_integer::gcd(k, den as i64) != 1) {
            return Err(BfnError::IncompletePacket(-1, den));
        }
        if let Some(m) = mult {
            out.push(den as u32, m);
        }
    }
    if out.degree() != roots.len() {
        return Err(BfnError::IncompletePacket(0, 0));
    }
    Ok(out)
}

/// Verify every stored aspect of a prehomogeneous case and push the results
/// into the report. Heavy b-function computations run only when enabled.
pub fn verify_prehom_case(
    rec: &CaseRecord,
    p: &PrehomData,
    heavy: bool,
    rep: &mut CaseReport,
) {
    let engine = match BfnEngine::build(p) {
        Ok(e) => e,
        Err(e) => {
            rep.fail_pub("prehom_build", format!("{e}"), "well-formed data");
            return;
        }
    };
    // semi-invariance of every f_i under every symbolic generator
    match engine.verify_semi_invariants() {
        Ok(()) => rep.pass_pub("prehom_semi_invariants", "all f_i invariant"),
        Err(e) => rep.fail_pub("prehom_semi_invariants", format!("{e}"), "all f_i invariant"),
    }
    // torus weights match the printed characters modulo the relations
    match engine.verify_characters() {
        Ok(()) => rep.pass_pub("prehom_characters", "weights match psi_i"),
        Err(e) => rep.fail_pub("prehom_characters", format!("{e}"), "weights match psi_i"),
    }
    // f does not vanish at the generic point
    match engine.check_generic_point() {
        Ok(()) => rep.pass_pub("prehom_generic_point", "f(a) != 0"),
        Err(e) => rep.fail_pub("prehom_generic_point", format!("{e}"), "f(a) != 0"),
    }
    // stated lattice conditions validate the catalog chi points, and the
    // psi|_I formulas reproduce the chi values
    for cp in &p.chi_points {
        let s: Vec<Rat> = cp.s.iter().map(|x| parse_rat(x)).collect();
        let ok = engine.lattice_condition(&s);
        rep.push_pub(
            format!("prehom_lattice_{}", cp.chi),
            ok,
            true,
        );
        // psi_{s}|_I from the stored formulas vs the chi row values
        if let Some(chi_row) = rec.chis.iter().find(|c| c.name == cp.chi) {
            let vals = engine.psi_on_i(&s);
            let want: Vec<Rat> = if chi_row.value.is_empty() {
                vals.iter().map(|_| Rat::zero()).collect()
            } else {
                chi_row.value.iter().map(|v| mod1(&parse_rat(v))).collect()
            };
            rep.push_pub(
                format!("prehom_psi_{}", cp.chi),
                format!("{vals:?}"),
                format!("{want:?}"),
            );
        }
        // specialized stored roots agree with the bexp cell of this chi
        if let Some(cell) = rec.bexp_cells.iter().find(|c| c.chi == cp.chi) {
            let mut got: Vec<Rat> = engine
                .b_roots(&s)
                .iter()
                .map(mod1)
                .collect();
            got.sort();
            let mut want: Vec<Rat> = cell.roots.iter().map(|r| mod1(&parse_rat(r))).collect();
            want.sort();
            rep.push_pub(
                format!("prehom_roots_{}", cp.chi),
                format!("{got:?}"),
                format!("{want:?}"),
            );
        }
    }
    // tau on I from the stored action scalars
    if !p.i_action.is_empty() {
        let ok = p.i_action.iter().all(|row| {
            let det: Rat = row
                .iter()
                .map(|x| parse_rat(x))
                .fold(Rat::zero(), |acc, x| acc + x);
            mod1(&det).is_zero()
        });
        rep.push_pub("prehom_tau", ok, true);
    }
    // the b-function itself
    if p.computable && (!p.heavy || heavy) {
        match engine.verify_b_function() {
            Ok(points) => rep.pass_pub(
                "prehom_bfunction",
                format!("roots verified on {points} grid points"),
            ),
            Err(e) => rep.fail_pub("prehom_bfunction", format!("{e}"), "roots match"),
        }
    } else if p.computable {
        rep.skip_pub("b-function computation (enable with --bfun-heavy)");
    } else {
        rep.skip_pub("b-function derivation imported; roots-only verification");
    }
}

/// Multivariate polynomial together with its variable names.
#[derive(Debug, Clone)]
pub struct NamedPoly {
    pub poly: MultiPoly,
    pub vars: Vec<String>,
}

impl CaseReport {
    pub fn push_pub(
        &mut self,
        name: impl Into<String>,
        computed: impl ToString,
        expected: impl ToString,
    ) {
        let computed = computed.to_string();
        let expected = expected.to_string();
        let ok = computed == expected;
        self.checks.push(crate::cli::CheckLine {
            name: name.into(),
            computed,
            expected,
            ok,
        });
    }

    pub fn pass_pub(&mut self, name: impl Into<String>, detail: impl ToString) {
        self.checks.push(crate::cli::CheckLine {
            name: name.into(),
            computed: detail.to_string(),
            expected: detail.to_string(),
            ok: true,
        });
    }

    pub fn fail_pub(
        &mut self,
        name: impl Into<String>,
        computed: impl ToString,
        expected: impl ToString,
    ) {
        self.checks.push(crate::cli::CheckLine {
            name: name.into(),
            computed: computed.to_string(),
            expected: expected.to_string(),
            ok: false,
        });
    }

    pub fn skip_pub(&mut self, what: impl Into<String>) {
        self.skipped.push(what.into());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    #[test]
    fn bexp_g2() {
        let roots = vec![
            rat(0, 1),
            rat(0, 1),
            rat(0, 1),
            rat(1, 2),
            rat(1, 6),
            rat(-1, 6),
        ];
        let f = b_exp(&roots).unwrap();
        assert_eq!(
            f,
            CycloFactorization::from_pairs(&[(1, 3), (2, 1), (6, 1)])
        );
    }

    #[test]
    fn bexp_rejects_incomplete() {
        let roots = vec![rat(1, 5)];
        assert!(b_exp(&roots).is_err());
    }

    #[test]
    fn bexp_e8_30s() {
        // Phi_1^9 Phi_2^5 Phi_3^3 Phi_4^2 Phi_5 Phi_6
        let mut roots = vec![rat(0, 1); 9];
        roots.extend(vec![rat(1, 2); 5]);
        for _ in 0..3 {
            roots.push(rat(1, 3));
            roots.push(rat(2, 3));
        }
        for _ in 0..2 {
            roots.push(rat(1, 4));
            roots.push(rat(3, 4));
        }
        roots.extend([rat(1, 5), rat(2, 5), rat(3, 5), rat(4, 5)]);
        roots.extend([rat(1, 6), rat(5, 6)]);
        let f = b_exp(&roots).unwrap();
        assert_eq!(
            f,
            CycloFactorization::from_pairs(&[(1, 9), (2, 5), (3, 3), (4, 2), (5, 1), (6, 1)])
        );
        assert_eq!(f.degree(), 30);
    }
}
