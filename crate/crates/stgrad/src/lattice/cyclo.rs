use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use super::poly::cyclotomic_poly_coeffs;
use super::{Int, Rat};

struct CycloCtx {
    phi: usize,
    /// Reductions of z^k mod Phi_n for k = phi .. 2*phi - 2.
    red: Vec<Vec<Rat>>,
}

static CTX: Lazy<Mutex<HashMap<u32, Arc<CycloCtx>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn ctx(n: u32) -> Arc<CycloCtx> {
    let mut map = CTX.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| {
            let phi_coeffs = cyclotomic_poly_coeffs(n);
            let phi = phi_coeffs.len() - 1;
            // z^phi = -(c_0 + c_1 z + ... + c_{phi-1} z^{phi-1}), Phi_n monic.
            let mut red: Vec<Vec<Rat>> = Vec::new();
            let base: Vec<Rat> = phi_coeffs[..phi]
                .iter()
                .map(|c| -Rat::from(c.clone()))
                .collect();
            red.push(base);
            for _ in 1..phi.max(1) {
                let prev = red.last().unwrap().clone();
                // multiply by z and reduce
                let mut next = vec![Rat::zero(); phi];
                let top = prev[phi - 1].clone();
                for i in (1..phi).rev() {
                    next[i] = prev[i - 1].clone();
                }
                if !top.is_zero() {
                    for (i, r) in red[0].iter().enumerate() {
                        next[i] += &top * r;
                    }
                }
                red.push(next);
            }
            Arc::new(CycloCtx { phi, red })
        })
        .clone()
}

/// An element of Q(zeta_N), as a rational coefficient vector of length
/// phi(N) reduced mod Phi_N. Equality and hashing are canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cyc {
    pub conductor: u32,
    pub coeffs: Vec<Rat>,
}

impl Cyc {
    pub fn zero(n: u32) -> Cyc {
        let phi = ctx(n).phi;
        Cyc {
            conductor: n,
            coeffs: vec![Rat::zero(); phi],
        }
    }

    pub fn one(n: u32) -> Cyc {
        Cyc::from_rat(n, Rat::one())
    }

    pub fn from_rat(n: u32, r: Rat) -> Cyc {
        let mut c = Cyc::zero(n);
        c.coeffs[0] = r;
        c
    }

    pub fn from_int(n: u32, k: i64) -> Cyc {
        Cyc::from_rat(n, Rat::from(Int::from(k)))
    }

    /// zeta_N^k.
    pub fn zeta_pow(n: u32, k: i64) -> Cyc {
        let cx = ctx(n);
        let k = k.rem_euclid(n as i64) as usize;
        let mut c = Cyc::zero(n);
        if k < cx.phi {
            c.coeffs[k] = Rat::one();
            return c;
        }
        // reduce z^k by repeated use of the reduction table
        let mut acc = vec![Rat::zero(); cx.phi];
        acc.clone_from(&cx.red[0]);
        let mut cur = cx.phi;
        while cur < k {
            // multiply acc by z
            let top = acc[cx.phi - 1].clone();
            for i in (1..cx.phi).rev() {
                acc[i] = acc[i - 1].clone();
            }
            acc[0] = Rat::zero();
            if !top.is_zero() {
                for (i, r) in cx.red[0].iter().enumerate() {
                    acc[i] += &top * r;
                }
            }
            cur += 1;
        }
        c.coeffs = acc;
        c
    }

    /// zeta_N viewed as e^{2 pi i q} for q = k/n given as a reduced rational.
    pub fn root_of_unity(q: &Rat) -> Cyc {
        use num_traits::ToPrimitive;
        let q = super::mod1(q);
        let n = q.denom().to_u32().expect("conductor fits u32").max(1);
        let k = q.numer().to_i64().unwrap();
        Cyc::zeta_pow(n, k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rat(&self) -> Option<Rat> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Cyc) -> Cyc {
        debug_assert_eq!(self.conductor, other.conductor);
        Cyc {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Cyc) -> Cyc {
        debug_assert_eq!(self.conductor, other.conductor);
        Cyc {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Cyc {
        Cyc {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &Cyc) -> Cyc {
        debug_assert_eq!(self.conductor, other.conductor);
        let cx = ctx(self.conductor);
        let phi = cx.phi;
        let mut conv = vec![Rat::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                conv[i + j] += a * b;
            }
        }
        let mut out = conv[..phi].to_vec();
        for k in phi..2 * phi - 1 {
            if conv[k].is_zero() {
                continue;
            }
            for (i, r) in cx.red[k - phi].iter().enumerate() {
                out[i] += &conv[k] * r;
            }
        }
        Cyc {
            conductor: self.conductor,
            coeffs: out,
        }
    }

    pub fn scale(&self, r: &Rat) -> Cyc {
        Cyc {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|a| a * r).collect(),
        }
    }

    /// Multiplicative inverse via extended Euclid against Phi_N.
    pub fn inv(&self) -> Cyc {
        assert!(!self.is_zero(), "division by zero in Q(zeta)");
        let n = self.conductor;
        let phi_coeffs: Vec<Rat> = cyclotomic_poly_coeffs(n)
            .iter()
            .map(|c| Rat::from(c.clone()))
            .collect();
        // Extended gcd of self (as polynomial) and Phi_n over Q[z].
        let (mut r0, mut r1) = (phi_coeffs, trim(self.coeffs.clone()));
        let (mut s0, mut s1) = (vec![Rat::zero()], vec![Rat::one()]);
        while !r1.is_empty() {
            let (q, rem) = poly_divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 = gcd (a nonzero constant since Phi_n is irreducible over Q)
        assert_eq!(r0.len(), 1, "gcd with Phi_n must be constant");
        let c = r0[0].clone();
        let cx = ctx(n);
        let mut coeffs = vec![Rat::zero(); cx.phi];
        for (i, v) in s0.iter().enumerate() {
            coeffs[i] = v / &c;
        }
        Cyc {
            conductor: n,
            coeffs,
        }
    }

    pub fn pow(&self, k: u64) -> Cyc {
        let mut acc = Cyc::one(self.conductor);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }
}

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    trim(out)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem = trim(a.to_vec());
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    while rem.len() >= b.len() && !rem.is_empty() {
        let d = rem.len() - b.len();
        let c = rem.last().unwrap() / &lead;
        quot[d] = c.clone();
        for (i, bc) in b.iter().enumerate() {
            let sub = bc * &c;
            rem[d + i] -= sub;
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_power_relations() {
        for n in [3u32, 4, 5, 6, 8, 12] {
            let z = Cyc::zeta_pow(n, 1);
            assert!(z.pow(n as u64).is_one(), "zeta_{n}^{n} = 1");
            for k in 1..n as i64 {
                let prod = Cyc::zeta_pow(n, k).mul(&Cyc::zeta_pow(n, n as i64 - k));
                assert!(prod.is_one());
            }
        }
    }

    #[test]
    fn inverse() {
        let x = Cyc::zeta_pow(12, 5).add(&Cyc::from_int(12, 3));
        let y = x.inv();
        assert!(x.mul(&y).is_one());
    }

    #[test]
    fn zeta6_via_zeta3() {
        // zeta_6 = 1 + zeta_3 in Q(zeta_3)? No: zeta_6 = -zeta_3^2.
        let z6_sq = Cyc::zeta_pow(6, 1).pow(2);
        assert_eq!(z6_sq, Cyc::zeta_pow(6, 2));
    }
}
