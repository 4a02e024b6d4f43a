//! Batch driver: per-case analysis against the catalog, full table
//! reproduction, and b-function runs. Exit codes: 0 all match, 1 mismatch,
//! 2 usage error, 3 internal inconsistency.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::catalog::{self, CaseRecord};
use crate::characters::{
    self, act_on_character, action_on_coords, dual_orbits, endoscopic_subsystem,
    stabilizer_data,
};
use crate::grading::{
    build_theta, cartan_subspace, fixed_point_count, tau_character, theta_orbits, torus_element,
    torus_fixed_points, ThetaAction,
};
use crate::hecke::{
    conjugacy_ids, fingerprint, identify_group, weyl_label, GroupFingerprint, HeckeDescriptor,
};
use crate::lattice::{CharacterOfI, FinAbGroup, GroupElt};
use crate::littleweyl::{
    distinguished_from_base, distinguished_reflection, generate_group, partition_into_classes,
    reflection_census, verify_claim_51, Distinguished, OrbitClass,
};
use crate::rootsys::{build_root_system, parse_root, Mat, RootDatum, SubsystemType};

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub enumerate_large: bool,
    pub bfun_heavy: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            enumerate_large: false,
            bfun_heavy: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub computed: String,
    pub expected: String,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct CaseReport {
    pub label: String,
    pub checks: Vec<CheckLine>,
    pub skipped: Vec<String>,
}

impl CaseReport {
    fn push(&mut self, name: impl Into<String>, computed: impl ToString, expected: impl ToString) {
        let computed = computed.to_string();
        let expected = expected.to_string();
        let ok = computed == expected;
        self.checks.push(CheckLine {
            name: name.into(),
            computed,
            expected,
            ok,
        });
    }

    fn pass(&mut self, name: impl Into<String>, detail: impl ToString) {
        self.checks.push(CheckLine {
            name: name.into(),
            computed: detail.to_string(),
            expected: detail.to_string(),
            ok: true,
        });
    }

    fn fail(&mut self, name: impl Into<String>, computed: impl ToString, expected: impl ToString) {
        self.checks.push(CheckLine {
            name: name.into(),
            computed: computed.to_string(),
            expected: expected.to_string(),
            ok: false,
        });
    }

    fn skip(&mut self, what: impl Into<String>) {
        self.skipped.push(what.into());
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let verdict = if self.all_ok() { "MATCH" } else { "MISMATCH" };
        let _ = writeln!(s, "== {} [{}]", self.label, verdict);
        for c in &self.checks {
            if c.ok {
                let _ = writeln!(s, "  MATCH    {:28} {}", c.name, c.computed);
            } else {
                let _ = writeln!(
                    s,
                    "  MISMATCH {:28} computed {} expected {}",
                    c.name, c.computed, c.expected
                );
            }
        }
        for sk in &self.skipped {
            let _ = writeln!(s, "  skipped  {sk}");
        }
        s
    }
}

/// Everything computed for a case that later stages (Hecke assembly, table
/// rendering) need.
pub struct CaseComputation {
    pub datum: RootDatum,
    pub theta: ThetaAction,
    pub group: FinAbGroup,
    pub classes: Vec<OrbitClass>,
    pub dists: Vec<Distinguished>,
    pub gen_cols: Vec<Vec<GroupElt>>,
}

/// Analyze one case and verify it against its catalog record.
pub fn analyze_case(rec: &CaseRecord, opts: Options) -> CaseReport {
    let mut rep = CaseReport {
        label: rec.label.clone(),
        ..Default::default()
    };
    // Cases without a lattice realization carry only b_exp cells (and
    // prehomogeneous data handled by the bfunction paths).
    let Some(wspec) = rec.wspec() else {
        rep.pass("lattice", "no w specification; prehom/b_exp only");
        bexp_checks(rec, &mut rep);
        prehom_checks(rec, opts, &mut rep);
        return rep;
    };
    let datum = build_root_system(crate::rootsys::RootType::parse(&rec.base).unwrap());
    let theta = match build_theta(&datum, &wspec, rec.m) {
        Ok(t) => t,
        Err(e) => {
            rep.fail("theta_order", format!("{e}"), format!("order {}", rec.m));
            return rep;
        }
    };
    rep.pass("theta_order", rec.m);
    if let Some(cp) = &rec.char_poly {
        let got = theta.char_poly_cyclo();
        rep.push(
            "char_poly",
            crate::hecke::cyclo_notation(&got),
            crate::hecke::cyclo_notation(&crate::hecke::parse_cyclo(cp)),
        );
    }
    let orbits = match theta_orbits(&datum, &theta) {
        Ok(o) => o,
        Err(e) => {
            rep.fail("theta_orbits", format!("{e}"), "orbits of size m");
            return rep;
        }
    };
    rep.push(
        "orbit_count",
        orbits.len(),
        datum.roots.len() / rec.m,
    );
    // negation compatibility: -orbit is an orbit
    {
        let orbit_sets: BTreeSet<BTreeSet<usize>> = orbits
            .iter()
            .map(|o| o.iter().copied().collect())
            .collect();
        let neg_ok = orbits.iter().all(|o| {
            let neg: BTreeSet<usize> = o
                .iter()
                .map(|&k| {
                    let nv: Vec<i64> = datum.roots[k].iter().map(|x| -x).collect();
                    datum.root_index(&nv).unwrap()
                })
                .collect();
            orbit_sets.contains(&neg)
        });
        rep.push("orbit_negation", neg_ok, true);
    }
    let group = match torus_fixed_points(&theta) {
        Ok(g) => g,
        Err(e) => {
            rep.fail("i_factors", format!("{e}"), format!("{:?}", rec.i_factors));
            return rep;
        }
    };
    rep.push(
        "i_factors",
        format!("{:?}", group.factors),
        format!("{:?}", rec.i_factors),
    );
    rep.push("i_order_det", fixed_point_count(&theta), group.order());
    // catalog generators lie in I and generate it
    if !rec.i_gens.is_empty() {
        let mut coords = Vec::new();
        let mut ok = true;
        for g in &rec.i_gens {
            let parts = CaseRecord::parse_torus_parts(g);
            let q = torus_element(datum.rank, &parts);
            match group.dlog(&q) {
                Some(c) => coords.push(c),
                None => ok = false,
            }
        }
        let gen_ok = ok && group.subgroup_order(&coords) == group.order();
        rep.push("i_generators", gen_ok, true);
    }
    match tau_character(&datum, &orbits, &group) {
        Ok(()) => rep.pass("tau_trivial", "tau = 1 on I"),
        Err(e) => rep.fail("tau_trivial", format!("{e}"), "tau = 1 on I"),
    }
    let a_basis = cartan_subspace(&theta);
    rep.push("cartan_rank", a_basis.len(), rec.rank);

    if rec.rank == 1 {
        rank_one_lattice_checks(rec, &datum, &theta, &group, &mut rep);
        bexp_checks(rec, &mut rep);
        prehom_checks(rec, opts, &mut rep);
        return rep;
    }

    // ---- rank >= 2 ----
    let classes = match partition_into_classes(&datum, &theta, &orbits) {
        Ok(c) => c,
        Err(e) => {
            rep.fail("class_partition", format!("{e}"), "partition of R");
            return rep;
        }
    };
    {
        // census: multiset of (rtype, orbits) with counts
        let mut got: Vec<(String, usize, usize)> = Vec::new();
        for c in &classes {
            let key = (c.rtype.to_string(), c.orbit_count);
            match got.iter_mut().find(|(t, o, _)| *t == key.0 && *o == key.1) {
                Some((_, _, n)) => *n += 1,
                None => got.push((key.0, key.1, 1)),
            }
        }
        got.sort();
        let mut want: Vec<(String, usize, usize)> = rec
            .classes
            .iter()
            .map(|r| {
                (
                    SubsystemType::parse(&r.rtype).to_string(),
                    r.orbits,
                    r.count,
                )
            })
            .collect();
        want.sort();
        rep.push("class_census", format!("{got:?}"), format!("{want:?}"));
    }
    // distinguished reflections, ordered by the catalog betas when present
    let ordered: Vec<(usize, Option<Vec<i64>>)> = if rec.betas.is_empty() {
        (0..classes.len()).map(|i| (i, None)).collect()
    } else {
        let mut v = Vec::new();
        let mut ok = true;
        for b in &rec.betas {
            let bv = parse_root(b);
            match classes
                .iter()
                .position(|c| c.roots.iter().any(|&k| datum.roots[k] == bv))
            {
                Some(ci) => v.push((ci, Some(bv))),
                None => ok = false,
            }
        }
        let distinct: BTreeSet<usize> = v.iter().map(|(c, _)| *c).collect();
        rep.push(
            "beta_classes",
            ok && distinct.len() == classes.len(),
            true,
        );
        v
    };
    let mut dists: Vec<Distinguished> = Vec::new();
    for (ci, beta) in &ordered {
        let d = match beta {
            Some(bv) => {
                let kind = crate::littleweyl::class_kind(&datum, &theta, &classes[*ci]);
                if kind == crate::littleweyl::ClassKind::M4B2 {
                    distinguished_reflection(&datum, &theta, &classes[*ci])
                } else {
                    distinguished_from_base(&datum, &theta, kind, bv)
                }
            }
            None => distinguished_reflection(&datum, &theta, &classes[*ci]),
        };
        match d {
            Ok(d) => dists.push(d),
            Err(e) => {
                rep.fail("distinguished", format!("{e}"), "constructed");
                return rep;
            }
        }
    }
    // base-root independence across the whole partition
    {
        let mut ok = true;
        for (ci, _) in ordered.iter() {
            if distinguished_reflection(&datum, &theta, &classes[*ci]).is_err() {
                ok = false;
            }
        }
        rep.push("t_well_defined", ok, true);
    }
    // claim (5.1): class roots = roots vanishing on the fixed hyperplane
    {
        let cond = theta.m as u32;
        let mut ok = true;
        for ((ci, _), d) in ordered.iter().zip(&dists) {
            if !verify_claim_51(&datum, &theta, &a_basis, &classes[*ci], d, cond) {
                ok = false;
            }
        }
        rep.push("class_fixed_spaces", ok, true);
    }
    // local groups inside I, generating I
    {
        let mut nu_coords = Vec::new();
        let mut ok = true;
        for d in &dists {
            if let Some(nu) = &d.nu {
                match group.dlog(nu) {
                    Some(c) => nu_coords.push(c),
                    None => ok = false,
                }
            }
        }
        rep.push("nu_in_i", ok, true);
        if !group.is_trivial() {
            rep.push(
                "i_generated_by_local",
                group.subgroup_order(&nu_coords),
                group.order(),
            );
        }
    }
    // golden nu words
    if !rec.nus.is_empty() {
        let gammas = gamma_coords(rec, &datum, &group);
        let mut ok = true;
        let mut detail = String::new();
        for (i, (d, want)) in dists.iter().zip(&rec.nus).enumerate() {
            let got = group.dlog(d.nu.as_ref().expect("golden class has I_s")).unwrap();
            let want_elt = gamma_word_elt(&group, &gammas, want);
            if got != want_elt {
                ok = false;
                let _ = write!(detail, " nu_{}", i + 1);
            }
        }
        rep.push(
            "golden_nu",
            if ok { "all equal".into() } else { format!("mismatch at{detail}") },
            "all equal",
        );
    }
    if !rec.nu_orders.is_empty() {
        let got: Vec<u64> = dists
            .iter()
            .map(|d| match &d.nu {
                Some(nu) => group
                    .dlog(nu)
                    .map(|c| group.elt_order(&c))
                    .unwrap_or(0),
                None => 1,
            })
            .collect();
        rep.push("nu_orders", format!("{got:?}"), format!("{:?}", rec.nu_orders));
    }
    // golden action tables
    let gen_cols: Vec<Vec<GroupElt>> = match dists
        .iter()
        .map(|d| action_on_coords(&group, &d.t))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(c) => c,
        Err(e) => {
            rep.fail("action_on_i", format!("{e}"), "t_i normalize I");
            return rep;
        }
    };
    if !rec.action.is_empty() {
        let gammas = gamma_coords(rec, &datum, &group);
        let mut ok = true;
        let mut nchecked = 0usize;
        let mut detail = String::new();
        for (k, row) in rec.action.iter().enumerate() {
            for (i, want) in row.iter().enumerate() {
                let got = characters::apply_coords(&group, &gen_cols[i], &gammas[k]);
                let want_elt = gamma_word_elt(&group, &gammas, want);
                nchecked += 1;
                if got != want_elt {
                    ok = false;
                    let _ = write!(detail, " t_{}(g_{})", i + 1, k + 1);
                }
            }
        }
        rep.push(
            "golden_action",
            if ok {
                format!("{nchecked} values equal")
            } else {
                format!("mismatch at{detail}")
            },
            format!("{nchecked} values equal"),
        );
    }

    // little Weyl group enumeration
    let lw = &rec.little_weyl;
    let mut enumerated = None;
    if lw.never_enumerate || (lw.large && !opts.enumerate_large) {
        rep.skip(format!(
            "enumeration of {} (order {}): subsystem route only",
            lw.label, lw.order
        ));
    } else {
        let gens: Vec<Mat> = dists.iter().map(|d| d.t.on_coroots.clone()).collect();
        match generate_group(&gens, 4_000_000) {
            Ok(g) => {
                rep.push("w_order", g.order as u64, lw.order);
                let census = reflection_census(&g, &theta, rec.rank, &a_basis);
                let want = rec.census_pairs();
                rep.push(
                    "w_census",
                    format!("{:?}", census.counts),
                    format!("{want:?}"),
                );
                rep.push(
                    "w_hyperplanes",
                    census.counts.iter().map(|&(_, c)| c).sum::<usize>(),
                    classes.len(),
                );
                if !lw.degrees.is_empty() {
                    let degrees = crate::littleweyl::reflection_degrees(&g, &theta, rec.rank);
                    rep.push(
                        "w_degrees",
                        format!("{degrees:?}"),
                        format!("{:?}", lw.degrees),
                    );
                }
                // every t_i is a distinguished reflection of the group, and
                // every reflection is a power of some t_i
                let dist_set: BTreeSet<&Mat> = census
                    .distinguished
                    .iter()
                    .map(|&i| &g.elements[i])
                    .collect();
                let t_ok = dists.iter().all(|d| dist_set.contains(&d.t.on_coroots));
                rep.push("t_are_distinguished", t_ok, true);
                let mut powers: BTreeSet<Mat> = BTreeSet::new();
                for d in &dists {
                    let mut p = d.t.on_coroots.clone();
                    for _ in 1..d.order {
                        powers.insert(p.clone());
                        p = p.mul(&d.t.on_coroots);
                    }
                }
                let all_powers = census
                    .reflections
                    .eq(&powers.len());
                rep.push("reflections_are_powers", all_powers, true);
                enumerated = Some(g);
            }
            Err(e) => {
                rep.fail("w_order", format!("{e}"), lw.order);
            }
        }
    }

    // character orbits
    let orbs = dual_orbits(&group, &gen_cols);
    {
        let mut sizes: Vec<usize> = orbs.iter().map(|o| o.len()).collect();
        sizes.sort();
        let mut want: Vec<usize> = rec.chis.iter().map(|c| c.orbit_size).collect();
        // rows covering two conjugate characters (chi_1, chi_3 style) are
        // listed once per orbit in the catalog
        want.sort();
        rep.push("dual_orbit_sizes", format!("{sizes:?}"), format!("{want:?}"));
    }

    // per-character rows
    let gammas = gamma_coords(rec, &datum, &group);
    for chi_row in &rec.chis {
        chi_checks(
            rec, &datum, &theta, &group, &classes, &dists, &gen_cols, &gammas, chi_row,
            enumerated.as_ref(), opts, &mut rep,
        );
    }

    bexp_checks(rec, &mut rep);
    prehom_checks(rec, opts, &mut rep);
    rep
}

/// Coordinates of the catalog gamma generators in I.
fn gamma_coords(rec: &CaseRecord, datum: &RootDatum, group: &FinAbGroup) -> Vec<GroupElt> {
    rec.i_gens
        .iter()
        .map(|g| {
            let parts = CaseRecord::parse_torus_parts(g);
            group
                .dlog(&torus_element(datum.rank, &parts))
                .expect("catalog generator lies in I")
        })
        .collect()
}

fn gamma_word_elt(group: &FinAbGroup, gammas: &[GroupElt], word: &str) -> GroupElt {
    let mut acc = group.identity();
    for (c, g) in word.chars().zip(gammas) {
        let k = c.to_digit(10).expect("gamma word digit") as u64;
        for _ in 0..k {
            acc = group.add(&acc, g);
        }
    }
    acc
}

fn chi_from_row(
    group: &FinAbGroup,
    gammas: &[GroupElt],
    row: &catalog::ChiRow,
) -> Option<CharacterOfI> {
    if row.value.is_empty() {
        return Some(CharacterOfI::trivial(group));
    }
    let values: Vec<crate::lattice::Rat> =
        row.value.iter().map(|v| catalog::parse_rat(v)).collect();
    characters::character_from_values(group, gammas, &values)
}

#[allow(clippy::too_many_arguments)]
fn chi_checks(
    rec: &CaseRecord,
    datum: &RootDatum,
    theta: &ThetaAction,
    group: &FinAbGroup,
    classes: &[OrbitClass],
    dists: &[Distinguished],
    gen_cols: &[Vec<GroupElt>],
    gammas: &[GroupElt],
    row: &catalog::ChiRow,
    _enumerated: Option<&crate::littleweyl::EnumeratedGroup>,
    opts: Options,
    rep: &mut CaseReport,
) {
    let tag = |s: &str| format!("{}_{s}", row.name);
    let Some(chi) = chi_from_row(group, gammas, row) else {
        rep.fail(tag("values"), "no character with the stated values", "exists");
        return;
    };
    let stab = match stabilizer_data(group, dists, gen_cols, &chi) {
        Ok(s) => s,
        Err(e) => {
            rep.fail(tag("stabilizer"), format!("{e}"), "computed");
            return;
        }
    };
    rep.push(tag("orbit_size"), stab.orbit_size, row.orbit_size);
    let w_order = rec.little_weyl.order;
    let wchi_order = w_order / stab.orbit_size as u64;
    rep.push(tag("wchi_order"), wchi_order, row.wchi_order);

    // W_chi^0
    let m2 = theta.m == 2;
    let (label, order0): (String, u64) = if m2 {
        // subsystem route: roots with chi(alpha^vee(-1)) = 1
        let sub: Vec<Vec<i64>> = datum
            .roots
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let cr = &datum.coroots[*k];
                let q = crate::lattice::QmodZVec::new(
                    cr.iter().map(|&c| crate::lattice::rat(c, 2)).collect(),
                );
                match group.dlog(&q) {
                    Some(c) => chi.eval(group, &c).is_integer(),
                    None => false,
                }
            })
            .map(|(_, r)| r.clone())
            .collect();
        if sub.is_empty() {
            ("1".into(), 1)
        } else {
            match datum.subsystem_type(&sub) {
                Ok(t) => weyl_label(&t),
                Err(e) => {
                    rep.fail(tag("wchi0"), format!("{e}"), &row.wchi0_label);
                    return;
                }
            }
        }
    } else {
        // generated subgroup route
        let gens: Vec<Mat> = dists
            .iter()
            .zip(&stab.exponents)
            .filter(|(d, &e)| e < d.order)
            .map(|(d, &e)| d.t.on_coroots.pow(e))
            .collect();
        if gens.is_empty() {
            ("1".into(), 1)
        } else {
            match generate_group(&gens, 4_000_000) {
                Ok(g) => {
                    let fp = fingerprint(&g, theta, rec.rank);
                    let label = identify_group(&fp)
                        .unwrap_or_else(|| format!("order {} degrees {:?}", fp.order, fp.degrees));
                    (label, fp.order)
                }
                Err(e) => {
                    rep.fail(tag("wchi0"), format!("{e}"), &row.wchi0_label);
                    return;
                }
            }
        }
    };
    rep.push(tag("wchi0"), &label, &row.wchi0_label);
    rep.push(tag("wchi0_order"), order0, row.wchi0_order);
    rep.push(
        tag("wchi_quotient"),
        wchi_order / order0,
        row.wchi_order / row.wchi0_order,
    );

    // Hecke descriptor
    let desc = hecke_descriptor(theta, classes, dists, &stab, opts);
    match desc {
        Ok(d) => rep.push(
            tag("hecke"),
            d.to_notation(),
            HeckeDescriptor::parse(&row.hecke).to_notation(),
        ),
        Err(e) => rep.fail(tag("hecke"), format!("{e}"), &row.hecke),
    }

    // endoscopic subgroup W_chi^en = <t_i : chi|_{I_i} = 1> and its Hecke data
    if row.en_label.is_some() || row.hecke_en.is_some() {
        let en_idx: Vec<usize> = (0..dists.len())
            .filter(|&i| stab.restriction_orders[i] == 1)
            .collect();
        let gens: Vec<Mat> = en_idx
            .iter()
            .map(|&i| dists[i].t.on_coroots.clone())
            .collect();
        match generate_group(&gens, 4_000_000) {
            Ok(g) => {
                let fp = fingerprint(&g, theta, rec.rank);
                let label = identify_group(&fp)
                    .unwrap_or_else(|| format!("order {} degrees {:?}", fp.order, fp.degrees));
                if let Some(want) = &row.en_label {
                    rep.push(tag("en_group"), &label, want);
                }
                if let Some(want) = &row.hecke_en {
                    // relations of the generating t_i (all have e = 1, d = 1)
                    let ids = conjugacy_ids(
                        &gens,
                        &en_idx
                            .iter()
                            .map(|&i| dists[i].t.on_coroots.clone())
                            .collect::<Vec<_>>(),
                    );
                    let per: Vec<_> = en_idx
                        .iter()
                        .zip(&ids)
                        .map(|(&i, &cid)| (dists[i].rank_one, 1usize, 1u64, Some(cid)))
                        .collect();
                    match HeckeDescriptor::assemble(&per) {
                        Ok(d) => rep.push(
                            tag("hecke_en"),
                            d.to_notation(),
                            HeckeDescriptor::parse(want).to_notation(),
                        ),
                        Err(e) => rep.fail(tag("hecke_en"), format!("{e}"), want),
                    }
                }
            }
            Err(e) => rep.fail(tag("en_group"), format!("{e}"), "enumerable"),
        }
    }

    // endoscopic subsystem
    if let Some(endo) = &row.endoscopy {
        let dual = dual_datum(datum);
        match endoscopic_subsystem(datum, &dual, theta, group, &chi) {
            Ok(e) => {
                rep.push(
                    tag("endoscopy"),
                    e.subsystem.to_string(),
                    SubsystemType::parse(&endo.subsystem).to_string(),
                );
                rep.push(tag("endoscopy_twist"), e.twist, endo.twist);
            }
            Err(e) => rep.fail(tag("endoscopy"), format!("{e}"), &endo.subsystem),
        }
    }
}

/// Assemble the Hecke descriptor of W_chi^0 from the per-class data.
fn hecke_descriptor(
    theta: &ThetaAction,
    _classes: &[OrbitClass],
    dists: &[Distinguished],
    stab: &characters::StabilizerData,
    _opts: Options,
) -> Result<HeckeDescriptor, crate::hecke::HeckeError> {
    let _ = theta;
    // conjugacy classes of the active reflections t_i^{e_i} inside W_chi^0
    let active: Vec<usize> = (0..dists.len())
        .filter(|&i| stab.exponents[i] < dists[i].order)
        .collect();
    let gens: Vec<Mat> = active
        .iter()
        .map(|&i| dists[i].t.on_coroots.pow(stab.exponents[i]))
        .collect();
    let ids = conjugacy_ids(&gens, &gens);
    let mut per = Vec::new();
    let mut id_iter = ids.iter();
    for (i, d) in dists.iter().enumerate() {
        let e = stab.exponents[i];
        if e < d.order {
            let cid = *id_iter.next().unwrap();
            per.push((d.rank_one, e, stab.restriction_orders[i], Some(cid)));
        } else {
            per.push((d.rank_one, e, stab.restriction_orders[i], None));
        }
    }
    HeckeDescriptor::assemble(&per)
}

pub fn dual_datum(datum: &RootDatum) -> RootDatum {
    let rank = datum.rank;
    let mut cartan = vec![vec![0i64; rank]; rank];
    for i in 0..rank {
        for j in 0..rank {
            cartan[i][j] = datum.cartan[j][i];
        }
    }
    let roots = datum.coroots.clone();
    let coroots = datum.roots.clone();
    let mut index = std::collections::HashMap::new();
    for (k, r) in roots.iter().enumerate() {
        index.insert(r.clone(), k);
    }
    let highest_root = roots
        .iter()
        .max_by_key(|r| r.iter().sum::<i64>())
        .unwrap()
        .clone();
    RootDatum {
        rtype: datum.rtype,
        rank,
        cartan,
        roots,
        coroots,
        index,
        highest_root,
    }
}

/// Rank-one cases with a lattice realization: verify the W-action data on
/// the character group where the ambient Weyl group is small enough to
/// enumerate (G2); elsewhere the action of W on I is trivial (I = Z_G).
fn rank_one_lattice_checks(
    rec: &CaseRecord,
    datum: &RootDatum,
    theta: &ThetaAction,
    group: &FinAbGroup,
    rep: &mut CaseReport,
) {
    if group.is_trivial() {
        return;
    }
    if datum.rtype == crate::rootsys::RootType::G2 {
        // enumerate W_G and then W = W_G^theta
        let gens: Vec<Mat> = (0..datum.rank)
            .map(|i| datum.simple_reflection(i).on_coroots.clone())
            .collect();
        let wg = generate_group(&gens, 100).expect("|W(G2)| = 12");
        let commuting: Vec<Mat> = wg
            .elements
            .iter()
            .filter(|w| w.mul(&theta.w.on_coroots) == theta.w.on_coroots.mul(w))
            .cloned()
            .collect();
        rep.push("w_ambient_order", commuting.len() as u64, rec.little_weyl.order);
        // orbits of W on the characters
        let gen_cols: Vec<Vec<GroupElt>> = commuting
            .iter()
            .map(|m| {
                group
                    .gens
                    .iter()
                    .map(|g| {
                        let img = crate::lattice::QmodZVec::new(
                            (0..m.n)
                                .map(|i| {
                                    let mut acc = crate::lattice::Rat::from(
                                        crate::lattice::int(0),
                                    );
                                    for j in 0..m.n {
                                        let c = m.at(i, j);
                                        if c != 0 {
                                            acc += crate::lattice::Rat::from(
                                                crate::lattice::int(c),
                                            ) * &g.0[j];
                                        }
                                    }
                                    acc
                                })
                                .collect(),
                        );
                        group.dlog(&img).expect("W normalizes I")
                    })
                    .collect()
            })
            .collect();
        let orbs = dual_orbits(group, &gen_cols);
        let mut sizes: Vec<usize> = orbs.iter().map(|o| o.len()).collect();
        sizes.sort();
        let mut want: Vec<usize> = rec.chis.iter().map(|c| c.orbit_size).collect();
        want.sort();
        rep.push("dual_orbit_sizes", format!("{sizes:?}"), format!("{want:?}"));
        for row in &rec.chis {
            let gammas = gamma_coords(rec, datum, group);
            if let Some(chi) = chi_from_row(group, gammas.as_slice(), row) {
                let mut orbit = BTreeSet::new();
                orbit.insert(chi.clone());
                let mut frontier = vec![chi];
                while let Some(c) = frontier.pop() {
                    for cols in &gen_cols {
                        let img = act_on_character(group, cols, &c);
                        if orbit.insert(img.clone()) {
                            frontier.push(img);
                        }
                    }
                }
                rep.push(
                    format!("{}_orbit_size", row.name),
                    orbit.len(),
                    row.orbit_size,
                );
                rep.push(
                    format!("{}_wchi_order", row.name),
                    rec.little_weyl.order / orbit.len() as u64,
                    row.wchi_order,
                );
            }
        }
    } else {
        // I = Z_G here; the Weyl action on the center is trivial.
        let all_central = rec.chis.iter().all(|c| c.orbit_size == 1);
        rep.push("central_orbits", all_central, true);
    }
}

/// Verify the b_exp cells of a rank-one case.
fn bexp_checks(rec: &CaseRecord, rep: &mut CaseReport) {
    for cell in &rec.bexp_cells {
        let roots: Vec<crate::lattice::Rat> =
            cell.roots.iter().map(|r| catalog::parse_rat(r)).collect();
        match crate::bfunction::b_exp(&roots) {
            Ok(f) => {
                let want = crate::hecke::parse_cyclo(&cell.expect);
                rep.push(
                    format!("bexp_{}", cell.chi),
                    f.phi_string(),
                    want.phi_string(),
                );
                if let Some(deg) = cell.degree {
                    rep.push(format!("bexp_{}_degree", cell.chi), f.degree(), deg);
                }
            }
            Err(e) => rep.fail(format!("bexp_{}", cell.chi), format!("{e}"), &cell.expect),
        }
    }
}

/// Verify the prehomogeneous data and, where enabled, the b-function.
fn prehom_checks(rec: &CaseRecord, opts: Options, rep: &mut CaseReport) {
    let Some(p) = &rec.prehom else {
        return;
    };
    crate::bfunction::verify_prehom_case(rec, p, opts.bfun_heavy, rep);
}

// ---- batch commands ----

pub struct TableOutcome {
    pub reports: Vec<CaseReport>,
    pub all_ok: bool,
}

pub fn cmd_analyze(label: &str, opts: Options) -> Result<CaseReport, String> {
    let cases = catalog::load_catalog().map_err(|e| e.to_string())?;
    let rec = catalog::find_case(&cases, label).ok_or_else(|| format!("unknown case {label}"))?;
    Ok(analyze_case(rec, opts))
}

pub fn cmd_tables(opts: Options) -> Result<TableOutcome, String> {
    use rayon::prelude::*;
    let cases = catalog::load_catalog().map_err(|e| e.to_string())?;
    let reports: Vec<CaseReport> = cases.par_iter().map(|rec| analyze_case(rec, opts)).collect();
    let all_ok = reports.iter().all(|r| r.all_ok());
    Ok(TableOutcome { reports, all_ok })
}

/// b-function command: print b(s) and b_exp for a rank-one case.
pub fn cmd_bfun(
    label: &str,
    s: &[i64],
    roots_only: bool,
    opts: Options,
) -> Result<String, String> {
    use std::fmt::Write;
    let cases = catalog::load_catalog().map_err(|e| e.to_string())?;
    let rec = catalog::find_case(&cases, label).ok_or_else(|| format!("unknown case {label}"))?;
    let mut out = String::new();
    if let Some(p) = &rec.prehom {
        let engine = crate::bfunction::BfnEngine::build(p).map_err(|e| e.to_string())?;
        let svals: Vec<crate::lattice::Rat> =
            s.iter().map(|&x| crate::lattice::rat(x, 1)).collect();
        let mut padded = svals.clone();
        padded.resize(engine.nparams(), crate::lattice::Rat::from(crate::lattice::int(0)));
        let roots = engine.b_roots(&padded);
        let _ = writeln!(out, "case {}: deg b = {}", rec.display, engine.degree());
        let _ = writeln!(
            out,
            "b roots at s = {s:?}: {:?}",
            roots.iter().map(|r| r.to_string()).collect::<Vec<_>>()
        );
        match crate::bfunction::b_exp(&roots) {
            Ok(f) => {
                let _ = writeln!(out, "b_exp = {}", f.phi_string());
            }
            Err(e) => {
                let _ = writeln!(out, "b_exp not assembled: {e}");
            }
        }
        if !roots_only && p.computable && (!p.heavy || opts.bfun_heavy) {
            let mut si = s.to_vec();
            si.resize(engine.nparams(), 0);
            let b = crate::bfunction::b_function_on_grid(&engine, &si)
                .map_err(|e| e.to_string())?;
            let _ = writeln!(out, "monic b(z) at integer s = {si:?}: {b}");
        } else if !roots_only {
            let _ = writeln!(out, "(direct computation disabled for this case; roots from catalog)");
        }
        return Ok(out);
    }
    // no prehom data: report the stored b_exp cells
    if rec.bexp_cells.is_empty() {
        return Err(format!("case {label} has no b-function data"));
    }
    for cell in &rec.bexp_cells {
        let roots: Vec<crate::lattice::Rat> =
            cell.roots.iter().map(|r| catalog::parse_rat(r)).collect();
        match crate::bfunction::b_exp(&roots) {
            Ok(f) => {
                let _ = writeln!(out, "{}: b_exp = {} (expected {})", cell.chi, f.phi_string(), cell.expect);
            }
            Err(e) => {
                let _ = writeln!(out, "{}: error {e}", cell.chi);
            }
        }
    }
    Ok(out)
}

/// Exploration helper: print the computed orbit representatives of the dual
/// character group with their stabilizer data (used to seed catalog rows).
pub fn cmd_probe(label: &str, opts: Options) -> Result<String, String> {
    use std::fmt::Write;
    let cases = catalog::load_catalog().map_err(|e| e.to_string())?;
    let rec = catalog::find_case(&cases, label).ok_or_else(|| format!("unknown case {label}"))?;
    let wspec = rec.wspec().ok_or("case has no lattice realization")?;
    let datum = build_root_system(crate::rootsys::RootType::parse(&rec.base).unwrap());
    let theta = build_theta(&datum, &wspec, rec.m).map_err(|e| e.to_string())?;
    let orbits = theta_orbits(&datum, &theta).map_err(|e| e.to_string())?;
    let group = torus_fixed_points(&theta).map_err(|e| e.to_string())?;
    let classes = partition_into_classes(&datum, &theta, &orbits).map_err(|e| e.to_string())?;
    let mut out = String::new();
    let _ = writeln!(out, "case {}: |I| = {}, factors {:?}", rec.label, group.order(), group.factors);
    let _ = writeln!(out, "classes: {}", classes.len());
    let dists: Vec<Distinguished> = classes
        .iter()
        .map(|c| distinguished_reflection(&datum, &theta, c).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let gen_cols: Vec<Vec<GroupElt>> = dists
        .iter()
        .map(|d| action_on_coords(&group, &d.t).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let orbs = dual_orbits(&group, &gen_cols);
    for orb in &orbs {
        let rep = &orb[0];
        let stab = stabilizer_data(&group, &dists, &gen_cols, rep).map_err(|e| e.to_string())?;
        let _ = write!(out, "orbit size {:4} rep {:?}: ", orb.len(), rep.0);
        if theta.m == 2 {
            let sub: Vec<Vec<i64>> = datum
                .roots
                .iter()
                .enumerate()
                .filter(|(k, _)| {
                    let cr = &datum.coroots[*k];
                    let q = crate::lattice::QmodZVec::new(
                        cr.iter().map(|&c| crate::lattice::rat(c, 2)).collect(),
                    );
                    group
                        .dlog(&q)
                        .map(|c| rep.eval(&group, &c).is_integer())
                        .unwrap_or(false)
                })
                .map(|(_, r)| r.clone())
                .collect();
            match datum.subsystem_type(&sub) {
                Ok(t) => {
                    let (lbl, ord) = weyl_label(&t);
                    let _ = write!(out, "W_chi^0 subsystem {t} = {lbl} order {ord} ");
                }
                Err(e) => {
                    let _ = write!(out, "subsystem error {e} ");
                }
            }
        } else {
            let gens: Vec<Mat> = dists
                .iter()
                .zip(&stab.exponents)
                .filter(|(d, &e)| e < d.order)
                .map(|(d, &e)| d.t.on_coroots.pow(e))
                .collect();
            if gens.is_empty() {
                let _ = write!(out, "W_chi^0 trivial ");
            } else if let Ok(g) = generate_group(&gens, 4_000_000) {
                let fp = fingerprint(&g, &theta, rec.rank);
                let lbl = identify_group(&fp)
                    .unwrap_or_else(|| format!("?(order {} deg {:?})", fp.order, fp.degrees));
                let _ = write!(out, "W_chi^0 = {lbl} order {} ", fp.order);
            }
        }
        // endoscopy
        if !rep.is_trivial() {
            let dual = dual_datum(&datum);
            match endoscopic_subsystem(&datum, &dual, &theta, &group, rep) {
                Ok(e) => {
                    let _ = write!(out, "endo {} twist {} ", e.subsystem, e.twist);
                }
                Err(e) => {
                    let _ = write!(out, "endo error {e} ");
                }
            }
        }
        let _ = writeln!(out);
        let _ = opts;
    }
    let _ = writeln!(out, "exponents/restrictions per class for each orbit rep:");
    for orb in &orbs {
        let rep = &orb[0];
        let stab = stabilizer_data(&group, &dists, &gen_cols, rep).map_err(|e| e.to_string())?;
        let _ = writeln!(
            out,
            "  rep {:?}: e = {:?}, d = {:?}",
            rep.0, stab.exponents, stab.restriction_orders
        );
    }
    Ok(out)
}
