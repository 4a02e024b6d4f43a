//! Parsers for the catalog's polynomial and affine-form strings.

use crate::lattice::{rat, MultiPoly, Rat};
use num_traits::One;

/// Parse a polynomial like "x2^2*x3^2 - 27*x1^2*x4^2 + 18*x1*x2*x3*x4"
/// over the given variable names.
pub fn parse_poly(s: &str, vars: &[String]) -> MultiPoly {
    let nvars = vars.len();
    let mut out = MultiPoly::zero(nvars);
    // split into signed terms
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut cur = String::new();
    let mut sign = 1i64;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '+' | '-' if !cur.trim().is_empty() => {
                terms.push((sign, cur.trim().to_string()));
                cur = String::new();
                sign = if ch == '-' { -1 } else { 1 };
            }
            '-' if cur.trim().is_empty() && i == 0 => sign = -1,
            '-' if cur.trim().is_empty() => sign = -sign,
            '+' if cur.trim().is_empty() => {}
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        terms.push((sign, cur.trim().to_string()));
    }
    for (sgn, term) in terms {
        let mut coeff = rat(sgn, 1);
        let mut exps: Vec<(usize, u16)> = Vec::new();
        for factor in term.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                continue;
            }
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim().parse::<u16>().expect("exponent")),
                None => (factor, 1u16),
            };
            if let Some(vi) = vars.iter().position(|v| v == base) {
                exps.push((vi, exp));
            } else {
                // numeric coefficient, possibly rational p/q
                let c = match base.split_once('/') {
                    Some((p, q)) => rat(p.parse().unwrap(), q.parse().unwrap()),
                    None => rat(base.parse().expect("coefficient or variable"), 1),
                };
                let mut cc = Rat::one();
                for _ in 0..exp {
                    cc *= &c;
                }
                coeff *= cc;
            }
        }
        out = out.add(&MultiPoly::monomial(nvars, &exps, coeff));
    }
    out
}

/// An affine-linear form c_0 + sum_k c_k s_k in the parameters s_1..s_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineForm {
    pub constant: Rat,
    pub coeffs: Vec<Rat>,
}

impl AffineForm {
    pub fn eval(&self, s: &[Rat]) -> Rat {
        let mut acc = self.constant.clone();
        for (c, v) in self.coeffs.iter().zip(s) {
            acc += c * v;
        }
        acc
    }

    pub fn involves(&self, k: usize) -> bool {
        !self.coeffs[k].is_zero()
    }
}

use num_traits::Zero;

/// Parse "1/2*s3 + 1/2", "-s1 + s2", "s4", "0", "-1/6" into an affine form
/// over nparams parameters s1..s{nparams}.
pub fn parse_affine_form(s: &str, nparams: usize) -> AffineForm {
    let mut constant = Rat::zero();
    let mut coeffs = vec![Rat::zero(); nparams];
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut cur = String::new();
    let mut sign = 1i64;
    for ch in s.chars() {
        match ch {
            '+' | '-' if !cur.trim().is_empty() => {
                terms.push((sign, cur.trim().to_string()));
                cur = String::new();
                sign = if ch == '-' { -1 } else { 1 };
            }
            '-' if cur.trim().is_empty() => sign = -sign,
            '+' if cur.trim().is_empty() => {}
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        terms.push((sign, cur.trim().to_string()));
    }
    for (sgn, term) in terms {
        let mut coeff = rat(sgn, 1);
        let mut var: Option<usize> = None;
        for factor in term.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                continue;
            }
            if let Some(idx) = factor.strip_prefix('s') {
                if let Ok(k) = idx.parse::<usize>() {
                    var = Some(k - 1);
                    continue;
                }
            }
            let c = match factor.split_once('/') {
                Some((p, q)) => rat(p.parse().unwrap(), q.parse().unwrap()),
                None => rat(factor.parse().expect("rational"), 1),
            };
            coeff *= c;
        }
        match var {
            Some(k) => coeffs[k] += coeff,
            None => constant += coeff,
        }
    }
    AffineForm { constant, coeffs }
}

/// Parse a torus monomial "t1^-2 t3" into an exponent vector of length n.
pub fn parse_torus_monomial(s: &str, n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n];
    for tok in s.split_whitespace() {
        let tok = tok.trim();
        if tok.is_empty() || tok == "1" {
            continue;
        }
        let body = tok.strip_prefix('t').expect("t<i>[^e]");
        let (idx, exp) = match body.split_once('^') {
            Some((i, e)) => (i.parse::<usize>().unwrap(), e.parse::<i64>().unwrap()),
            None => (body.parse::<usize>().unwrap(), 1),
        };
        out[idx - 1] += exp;
    }
    out
}

/// Parse a torus relation "t4^2 = t2 t3 t5" into the exponent vector of
/// lhs - rhs.
pub fn parse_torus_relation(s: &str, n: usize) -> Vec<i64> {
    let (lhs, rhs) = s.split_once('=').expect("lhs = rhs");
    let l = parse_torus_monomial(lhs, n);
    let r = parse_torus_monomial(rhs, n);
    l.iter().zip(&r).map(|(a, b)| a - b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn poly_parse_discriminant_shape() {
        let v = vars(&["x1", "x2", "x3", "x4"]);
        let p = parse_poly("x2^2*x3^2 - 27*x1^2*x4^2 - 4*x1*x3^3", &v);
        assert_eq!(p.num_terms(), 3);
        let q = parse_poly("-4*x2^3*x4 + 18*x1*x2*x3*x4", &v);
        assert_eq!(q.num_terms(), 2);
    }

    #[test]
    fn affine_parse() {
        let f = parse_affine_form("1/2*s3 + 1/2", 3);
        assert_eq!(f.eval(&[rat(0, 1), rat(0, 1), rat(1, 1)]), rat(1, 1));
        let g = parse_affine_form("-s1 + s2", 3);
        assert_eq!(g.eval(&[rat(1, 1), rat(3, 1), rat(0, 1)]), rat(2, 1));
        let h = parse_affine_form("-1/6", 1);
        assert_eq!(h.eval(&[rat(5, 1)]), rat(-1, 6));
    }

    #[test]
    fn torus_parse() {
        let w = parse_torus_monomial("t1^-2 t3", 4);
        assert_eq!(w, vec![-2, 0, 1, 0]);
        let r = parse_torus_relation("t3^2 = t2 t4", 4);
        assert_eq!(r, vec![0, -1, 2, -1]);
    }
}
