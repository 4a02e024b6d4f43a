//! The frozen data layer: every stable grading case with its realization
//! data, expected table rows, golden generator tables, and the rank-one
//! prehomogeneous case definitions. The catalog is the only place where
//! expected values live; everything else computes and compares.

use serde::Deserialize;

use crate::grading::WSpec;
use crate::lattice::{rat, Rat};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("catalog parse error: {0}")]
    Parse(String),
    #[error("catalog schema violation in case {label}: {msg}")]
    Schema { label: String, msg: String },
}

/// Top-level document of one catalog file.
#[derive(Debug, Deserialize)]
pub struct CatalogFile {
    pub version: String,
    #[serde(rename = "case", default)]
    pub cases: Vec<CaseRecord>,
}

/// How the Weyl part of theta is specified in the catalog.
#[derive(Debug, Clone, Deserialize)]
pub struct WSpecData {
    pub kind: String,
    #[serde(default)]
    pub word: Vec<String>,
    #[serde(default = "one")]
    pub power: usize,
    /// Words given in doubled E8 e-coordinates instead of root digits.
    #[serde(default)]
    pub e_coords: bool,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
pub struct LittleWeylData {
    pub label: String,
    pub order: u64,
    #[serde(default)]
    pub degrees: Vec<usize>,
    /// Hyperplane census "k^count k^count" by stabilizer order.
    #[serde(default)]
    pub census: String,
    /// Enumerate this group only behind --enumerate-large.
    #[serde(default)]
    pub large: bool,
    /// Do not enumerate at all (E8 2s).
    #[serde(default)]
    pub never_enumerate: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ClassRow {
    pub rtype: String,
    pub orbits: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EndoData {
    /// The paper's printed name, e.g. "^3D_4" or "D_6xA_1".
    pub display: String,
    /// Underlying subsystem type in canonical notation, e.g. "D4".
    pub subsystem: String,
    /// Expected order of the diagram automorphism induced by theta-dual.
    pub twist: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ChiRow {
    pub name: String,
    /// Values of chi on the catalog gamma generators, as exponents "p/q".
    #[serde(default)]
    pub value: Vec<String>,
    #[serde(default = "one")]
    pub orbit_size: usize,
    pub wchi_label: String,
    pub wchi_order: u64,
    pub wchi0_label: String,
    pub wchi0_order: u64,
    /// Canonical Hecke relations "order:cyclo,order:cyclo".
    pub hecke: String,
    /// The paper's rendering.
    pub hecke_display: String,
    #[serde(default)]
    pub endoscopy: Option<EndoData>,
    #[serde(default)]
    pub hecke_en: Option<String>,
    #[serde(default)]
    pub hecke_en_display: Option<String>,
    /// Expected fingerprint label of W_chi^en = <t_i : chi|_{I_i} = 1>.
    #[serde(default)]
    pub en_label: Option<String>,
}

/// One rank-one Hecke cell verified through b_exp assembly.
#[derive(Debug, Clone, Deserialize)]
pub struct BexpCell {
    pub chi: String,
    /// b(s) roots as rationals.
    pub roots: Vec<String>,
    /// Expected cyclotomic product.
    pub expect: String,
    /// When set, the assembled degree must equal this (|W| for chi_0 cells).
    #[serde(default)]
    pub degree: Option<usize>,
}

/// Data of a rank-one prehomogeneous case (the \S7 cases computed via
/// b-functions). See the bfunction module for the field semantics.
#[derive(Debug, Clone, Deserialize)]
pub struct PrehomData {
    /// Names of the scalar coordinates, in order.
    pub vars: Vec<String>,
    /// Torus weight of each variable as a monomial in t_1..t_n: for each
    /// variable a list like "t1^-2 t3".
    pub weights: Vec<String>,
    /// Relations cutting out Z_{G_0} inside the coordinate torus, e.g.
    /// "t4^2 = t2 t3 t5".
    #[serde(default)]
    pub torus_relations: Vec<String>,
    /// SL2 blocks: realization rule and the variables it acts on.
    #[serde(default)]
    pub blocks: Vec<BlockData>,
    /// Semi-invariants f_0, f_1, ... as polynomial strings.
    pub invariants: Vec<String>,
    /// The printed characters psi_i as monomials in t_j.
    pub psis: Vec<String>,
    /// Multiplicities n_i with f = f_0 prod f_i^{n_i} (n_0 = 1 included).
    pub mults: Vec<usize>,
    /// Dual-side invariant polynomials used to build D = f~(d/dx).
    pub dual_invariants: Vec<String>,
    /// Per-variable pairing scale applied to the partial derivative.
    #[serde(default)]
    pub pair_scale: Vec<String>,
    /// Lattice conditions on s_bullet: each congruence "c1 s1 + c2 s2 in Z"
    /// written as coefficient lists.
    pub lattice_conditions: Vec<String>,
    /// Claimed b(s) roots as affine forms in s_bullet: "1/2 s3 + 1/2" etc.
    pub b_roots: Vec<String>,
    /// Generic point for evaluations.
    pub generic_point: Vec<String>,
    /// Action of each I generator on each variable, as Q/Z exponents.
    #[serde(default)]
    pub i_action: Vec<Vec<String>>,
    /// psi_{s_bullet} values on each I generator: affine forms in s_bullet
    /// giving the Q/Z exponent.
    #[serde(default)]
    pub psi_on_i: Vec<String>,
    /// chi realizations: pairs (s_bullet tuple, chi name).
    #[serde(default)]
    pub chi_points: Vec<ChiPoint>,
    /// Whether the full b-function computation runs by default.
    #[serde(default)]
    pub computable: bool,
    /// Heavy cases run only behind --bfun-heavy.
    #[serde(default)]
    pub heavy: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ChiPoint {
    pub s: Vec<String>,
    pub chi: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BlockData {
    /// "standard" (C^2), "dual" ((C^2)*), "sym2", "mat2" (C^2 x (C^2)*),
    /// "pencil" (the four-factor rule), "bincubic" (V(3w) for G_2).
    pub rule: String,
    /// Indices of SL2 factors acting (1-based).
    pub factors: Vec<usize>,
    /// Variables of the block, in row-major order.
    pub vars: Vec<String>,
}

/// One stable grading case.
#[derive(Debug, Clone, Deserialize)]
pub struct CaseRecord {
    pub label: String,
    pub display: String,
    pub base: String,
    pub vartheta: usize,
    pub m: usize,
    pub rank: usize,
    #[serde(default)]
    pub w: Option<WSpecData>,
    #[serde(default)]
    pub char_poly: Option<String>,
    #[serde(default)]
    pub i_factors: Vec<u64>,
    #[serde(default)]
    pub i_gens: Vec<String>,
    pub little_weyl: LittleWeylData,
    #[serde(default)]
    pub classes: Vec<ClassRow>,
    #[serde(default)]
    pub betas: Vec<String>,
    #[serde(default)]
    pub nus: Vec<String>,
    /// nu subgroup orders when exact words are not printed.
    #[serde(default)]
    pub nu_orders: Vec<u64>,
    /// action[k][i] = t_{i+1}(gamma_{k+1}) as a gamma exponent word.
    #[serde(default)]
    pub action: Vec<Vec<String>>,
    #[serde(rename = "chi", default)]
    pub chis: Vec<ChiRow>,
    #[serde(default)]
    pub bexp_cells: Vec<BexpCell>,
    #[serde(default)]
    pub prehom: Option<PrehomData>,
}

impl CaseRecord {
    pub fn wspec(&self) -> Option<WSpec> {
        let w = self.w.as_ref()?;
        Some(match w.kind.as_str() {
            "minus_one" => WSpec::MinusOne,
            "coxeter" => WSpec::CoxeterPower { power: w.power },
            "neg_coxeter" => WSpec::NegCoxeterPower { power: w.power },
            "word" => {
                let word = if w.e_coords {
                    w.word
                        .iter()
                        .map(|s| {
                            let v: Vec<i64> =
                                s.split(',').map(|d| d.parse().unwrap()).collect();
                            let arr: [i64; 8] = v.try_into().expect("8 doubled e-coords");
                            crate::rootsys::root_string(
                                &crate::rootsys::e8_root_from_doubled_e_coords(&arr),
                            )
                        })
                        .collect()
                } else {
                    w.word.clone()
                };
                WSpec::TwistedWordPower {
                    word,
                    vartheta_order: self.vartheta,
                    power: w.power,
                }
            }
            other => panic!("unknown w kind {other}"),
        })
    }

    /// Parse an i_gens entry "a1:1/3 a4:2/3" into (index, num, den) parts.
    pub fn parse_torus_parts(s: &str) -> Vec<(usize, i64, i64)> {
        s.split_whitespace()
            .map(|tok| {
                let (a, q) = tok.split_once(':').expect("ai:p/q");
                let idx: usize = a[1..].parse().unwrap();
                let (p, d) = match q.split_once('/') {
                    Some((p, d)) => (p.parse().unwrap(), d.parse().unwrap()),
                    None => (q.parse().unwrap(), 1),
                };
                (idx, p, d)
            })
            .collect()
    }

    /// Expected census as sorted (order, count) pairs.
    pub fn census_pairs(&self) -> Vec<(usize, usize)> {
        parse_census(&self.little_weyl.census)
    }
}

pub fn parse_census(s: &str) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = s
        .split_whitespace()
        .map(|tok| {
            let (k, c) = tok.split_once('^').expect("k^count");
            (k.parse().unwrap(), c.parse().unwrap())
        })
        .collect();
    out.sort();
    out
}

pub fn parse_rat(s: &str) -> Rat {
    match s.split_once('/') {
        Some((p, q)) => rat(p.trim().parse().unwrap(), q.trim().parse().unwrap()),
        None => rat(s.trim().parse().unwrap(), 1),
    }
}

/// Parse a gamma exponent word like "1021" over k generators.
pub fn parse_gamma_word(s: &str, factors: &[u64]) -> Vec<u64> {
    let digits: Vec<u64> = s
        .chars()
        .map(|c| c.to_digit(10).expect("gamma word digit") as u64)
        .collect();
    assert_eq!(digits.len(), factors.len(), "gamma word length");
    digits
        .iter()
        .zip(factors)
        .map(|(d, f)| d % f)
        .collect()
}

static CATALOG_TOML: &[(&str, &str)] = &[
    ("g2_d4", include_str!("data/g2_d4.toml")),
    ("f4", include_str!("data/f4.toml")),
    ("e6", include_str!("data/e6.toml")),
    ("e7", include_str!("data/e7.toml")),
    ("e8", include_str!("data/e8.toml")),
];

/// Load and schema-check the full catalog.
pub fn load_catalog() -> Result<Vec<CaseRecord>, CatalogError> {
    let mut cases = Vec::new();
    for (name, text) in CATALOG_TOML {
        let file: CatalogFile = toml::from_str(text)
            .map_err(|e| CatalogError::Parse(format!("{name}: {e}")))?;
        if file.version != "1" {
            return Err(CatalogError::Parse(format!(
                "{name}: unsupported version {}",
                file.version
            )));
        }
        cases.extend(file.cases);
    }
    for c in &cases {
        validate(c)?;
    }
    Ok(cases)
}

pub fn find_case<'a>(cases: &'a [CaseRecord], label: &str) -> Option<&'a CaseRecord> {
    let norm = label.replace([' ', '(', ')'], "").replace("_s", "s");
    cases.iter().find(|c| c.label == norm)
}

fn validate(c: &CaseRecord) -> Result<(), CatalogError> {
    let err = |msg: &str| CatalogError::Schema {
        label: c.label.clone(),
        msg: msg.into(),
    };
    if crate::rootsys::RootType::parse(&c.base).is_none() {
        return Err(err("unknown base type"));
    }
    if c.m == 0 || c.rank == 0 {
        return Err(err("m and rank must be positive"));
    }
    if !c.betas.is_empty() {
        let total: usize = c.classes.iter().map(|r| r.count).sum();
        if c.betas.len() != total {
            return Err(err("betas length must equal the class count"));
        }
    }
    if !c.nus.is_empty() && c.nus.len() != c.betas.len() {
        return Err(err("nus length must equal betas length"));
    }
    for row in &c.action {
        if row.len() != c.betas.len() {
            return Err(err("action rows must match betas length"));
        }
    }
    if c.action.len() > c.i_gens.len() {
        return Err(err("more action rows than generators"));
    }
    for chi in &c.chis {
        // lattice cases state chi on the stored generators; prehom-only
        // cases state it on the abstract invariant factors
        let ngens = if c.i_gens.is_empty() {
            c.i_factors.len()
        } else {
            c.i_gens.len()
        };
        if !chi.value.is_empty() && chi.value.len() != ngens {
            return Err(err("chi value length must match generators"));
        }
    }
    for cell in &c.bexp_cells {
        let f = crate::hecke::parse_cyclo(&cell.expect);
        if f.degree() != cell.roots.len() {
            return Err(err(&format!(
                "bexp cell {} root count {} does not match degree {}",
                cell.chi,
                cell.roots.len(),
                f.degree()
            )));
        }
    }
    Ok(())
}
