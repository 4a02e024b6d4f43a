use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use super::{Int, Rat};

/// Dense univariate polynomial over Q, low degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly(pub Vec<Rat>);

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly(vec![])
    }

    pub fn one() -> Self {
        UniPoly(vec![Rat::one()])
    }

    pub fn from_int_coeffs(c: &[i64]) -> Self {
        UniPoly(c.iter().map(|&x| Rat::from(Int::from(x))).collect()).trimmed()
    }

    pub fn from_coeffs(c: Vec<Rat>) -> Self {
        UniPoly(c).trimmed()
    }

    /// z - r
    pub fn linear(r: &Rat) -> Self {
        UniPoly(vec![-r.clone(), Rat::one()])
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.0.last().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn monic(&self) -> UniPoly {
        match self.0.last() {
            None => UniPoly::zero(),
            Some(lead) => UniPoly(self.0.iter().map(|c| c / lead).collect()),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly(out).trimmed()
    }

    pub fn divmod(&self, other: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!other.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        if rem.0.len() < other.0.len() {
            return (UniPoly::zero(), rem);
        }
        let mut quot = vec![Rat::zero(); rem.0.len() - other.0.len() + 1];
        let lead = other.0.last().unwrap().clone();
        while !rem.is_zero() && rem.0.len() >= other.0.len() {
            let d = rem.0.len() - other.0.len();
            let c = rem.0.last().unwrap() / &lead;
            quot[d] = c.clone();
            for (i, bc) in other.0.iter().enumerate() {
                let sub = bc * &c;
                rem.0[d + i] -= sub;
            }
            rem = rem.trimmed();
        }
        (UniPoly(quot).trimmed(), rem)
    }

    pub fn divides(&self, dividend: &UniPoly) -> bool {
        dividend.divmod(self).1.is_zero()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Substitute z -> z^k.
    pub fn inflate(&self, k: usize) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); (self.0.len() - 1) * k + 1];
        for (i, c) in self.0.iter().enumerate() {
            out[i * k] = c.clone();
        }
        UniPoly(out).trimmed()
    }

    /// Inverse of inflate: find p with p(z^k) = self, when the support allows.
    pub fn deflate(&self, k: usize) -> Option<UniPoly> {
        if self.is_zero() {
            return Some(UniPoly::zero());
        }
        for (i, c) in self.0.iter().enumerate() {
            if i % k != 0 && !c.is_zero() {
                return None;
            }
        }
        Some(UniPoly(self.0.iter().step_by(k).cloned().collect()).trimmed())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            if i == 0 || !a.is_one() {
                write!(f, "{a}")?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            if i == 1 {
                write!(f, "z")?;
            } else if i > 1 {
                write!(f, "z^{i}")?;
            }
            first = false;
        }
        Ok(())
    }
}

static CYCLO_CACHE: Lazy<Mutex<HashMap<u32, Vec<Int>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Integer coefficients of the d-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_poly_coeffs(d: u32) -> Vec<Int> {
    assert!(d >= 1);
    if let Some(c) = CYCLO_CACHE.lock().unwrap().get(&d) {
        return c.clone();
    }
    // Phi_d = (z^d - 1) / prod_{e | d, e < d} Phi_e
    let mut num = vec![Rat::zero(); d as usize + 1];
    num[0] = -Rat::one();
    num[d as usize] = Rat::one();
    let mut p = UniPoly(num);
    for e in 1..d {
        if d % e == 0 {
            let phi_e = UniPoly(
                cyclotomic_poly_coeffs(e)
                    .iter()
                    .map(|c| Rat::from(c.clone()))
                    .collect(),
            );
            let (q, r) = p.divmod(&phi_e);
            assert!(r.is_zero());
            p = q;
        }
    }
    let coeffs: Vec<Int> = p
        .0
        .iter()
        .map(|c| {
            assert!(c.is_integer());
            c.to_integer()
        })
        .collect();
    CYCLO_CACHE.lock().unwrap().insert(d, coeffs.clone());
    coeffs
}

/// The d-th cyclotomic polynomial as a univariate polynomial.
pub fn cyclotomic_poly(d: u32) -> UniPoly {
    UniPoly(
        cyclotomic_poly_coeffs(d)
            .iter()
            .map(|c| Rat::from(c.clone()))
            .collect(),
    )
}

/// Euler totient.
pub fn euler_phi(mut n: u32) -> u32 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// A product prod_d Phi_d^{m_d} of cyclotomic polynomials, stored as the
/// multiset {(d, m_d)}. The currency of Hecke relations and b_exp.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CycloFactorization(pub BTreeMap<u32, u32>);

impl CycloFactorization {
    pub fn one() -> Self {
        CycloFactorization(BTreeMap::new())
    }

    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        let mut map = BTreeMap::new();
        for &(d, m) in pairs {
            if m > 0 {
                *map.entry(d).or_insert(0) += m;
            }
        }
        CycloFactorization(map)
    }

    pub fn push(&mut self, d: u32, m: u32) {
        if m > 0 {
            *self.0.entry(d).or_insert(0) += m;
        }
    }

    pub fn degree(&self) -> usize {
        self.0
            .iter()
            .map(|(&d, &m)| euler_phi(d) as usize * m as usize)
            .sum()
    }

    pub fn mul(&self, other: &CycloFactorization) -> CycloFactorization {
        let mut out = self.clone();
        for (&d, &m) in &other.0 {
            out.push(d, m);
        }
        out
    }

    /// Expand to the actual polynomial.
    pub fn expand(&self) -> UniPoly {
        let mut p = UniPoly::one();
        for (&d, &m) in &self.0 {
            let phi = cyclotomic_poly(d);
            for _ in 0..m {
                p = p.mul(&phi);
            }
        }
        p
    }

    /// Exact refactorization of a monic polynomial into cyclotomics.
    /// Returns None when the polynomial is not a product of cyclotomics.
    pub fn refactor(p: &UniPoly) -> Option<CycloFactorization> {
        if p.is_zero() || !p.is_monic() {
            return None;
        }
        let mut rem = p.clone();
        let mut out = CycloFactorization::one();
        // Any cyclotomic divisor Phi_d of p satisfies phi(d) <= deg p, and
        // d <= some bound; products here only involve small d, so scan a
        // generous window.
        let mut d = 1u32;
        let mut stale = 0u32;
        while rem.degree() > 0 {
            let phi = cyclotomic_poly(d);
            let mut took = false;
            if phi.degree() <= rem.degree() {
                loop {
                    let (q, r) = rem.divmod(&phi);
                    if r.is_zero() {
                        out.push(d, 1);
                        rem = q;
                        took = true;
                        if rem.degree() == 0 {
                            break;
                        }
                    } else {
                        break;
                    }
                }
            }
            if took {
                stale = 0;
            } else {
                stale += 1;
            }
            d += 1;
            if stale > 128 {
                return None;
            }
        }
        if rem == UniPoly::one() {
            Some(out)
        } else {
            None
        }
    }

    /// Substitute z -> z^k and refactor into cyclotomics (always possible:
    /// Phi_d(z^k) is a product of cyclotomics).
    pub fn inflate(&self, k: usize) -> CycloFactorization {
        CycloFactorization::refactor(&self.expand().inflate(k))
            .expect("Phi_d(z^k) factors into cyclotomics")
    }

    /// Find q with q(z^k) = self as polynomials, refactored. None when the
    /// exponent support is incompatible.
    pub fn deflate(&self, k: usize) -> Option<CycloFactorization> {
        let q = self.expand().deflate(k)?;
        CycloFactorization::refactor(&q)
    }

    /// Render in Phi-notation.
    pub fn phi_string(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut s = String::new();
        for (&d, &m) in &self.0 {
            s.push_str(&format!("Φ{d}"));
            if m > 1 {
                s.push_str(&format!("^{m}"));
            }
        }
        s
    }
}

impl fmt::Display for CycloFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phi_string())
    }
}

/// Sparse multivariate polynomial over Q: monomial exponent vector -> coeff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u16>, Rat>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        let mut e = vec![0u16; nvars];
        e[i] = 1;
        p.terms.insert(e, Rat::one());
        p
    }

    pub fn monomial(nvars: usize, exps: &[(usize, u16)], c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            let mut e = vec![0u16; nvars];
            for &(i, k) in exps {
                e[i] += k;
            }
            p.terms.insert(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn insert_term(&mut self, e: Vec<u16>, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, r: &Rat) -> MultiPoly {
        if r.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * r)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u16> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> MultiPoly {
        let mut acc = MultiPoly::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn deriv(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] = k - 1;
            out.insert_term(e2, c * Rat::from(Int::from(k as i64)));
        }
        out
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term *= &point[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitute each variable by the given polynomial (in a possibly
    /// different variable set).
    pub fn substitute(&self, images: &[MultiPoly], out_nvars: usize) -> MultiPoly {
        let mut acc = MultiPoly::zero(out_nvars);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(out_nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&images[i].pow(k as usize));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic_poly(1), UniPoly::from_int_coeffs(&[-1, 1]));
        assert_eq!(cyclotomic_poly(6), UniPoly::from_int_coeffs(&[1, -1, 1]));
        assert_eq!(
            cyclotomic_poly(12),
            UniPoly::from_int_coeffs(&[1, 0, -1, 0, 1])
        );
    }

    #[test]
    fn product_over_divisors() {
        for n in 1..=30u32 {
            let mut p = UniPoly::one();
            for d in 1..=n {
                if n % d == 0 {
                    p = p.mul(&cyclotomic_poly(d));
                }
            }
            let mut zn = vec![Rat::zero(); n as usize + 1];
            zn[0] = -Rat::one();
            zn[n as usize] = Rat::one();
            assert_eq!(p, UniPoly(zn), "prod of Phi_d = z^{n} - 1");
        }
    }

    #[test]
    fn refactor_round_trip() {
        let f = CycloFactorization::from_pairs(&[(1, 5), (2, 3), (3, 1), (4, 1)]);
        let g = CycloFactorization::refactor(&f.expand()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn inflate_z3_minus_1() {
        // (z - 1) under z -> z^3 becomes z^3 - 1 = Phi_1 Phi_3
        let f = CycloFactorization::from_pairs(&[(1, 1)]);
        assert_eq!(
            f.inflate(3),
            CycloFactorization::from_pairs(&[(1, 1), (3, 1)])
        );
    }

    #[test]
    fn deflate_even_support() {
        // (z^2-1)^2 = R(z) with R = Rbar(z^2), Rbar = (y-1)^2
        let f = CycloFactorization::from_pairs(&[(1, 2), (2, 2)]);
        let d = f.deflate(2).unwrap();
        assert_eq!(d, CycloFactorization::from_pairs(&[(1, 2)]));
    }

    #[test]
    fn multipoly_leibniz() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let f = x.mul(&y).add(&x.pow(3));
        let df = f.deriv(0);
        let expect = y.add(&x.pow(2).scale(&rat(3, 1)));
        assert_eq!(df, expect);
    }
}
