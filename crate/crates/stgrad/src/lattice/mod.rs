//! Exact arithmetic substrate: big-integer matrices, Smith normal form,
//! finite abelian groups realized inside (Q/Z)^n, cyclotomic numbers and
//! sparse multivariate polynomials over Q.

mod cyclo;
mod finab;
mod matrix;
mod poly;
mod snf;

pub use cyclo::Cyc;
pub use finab::{CharacterOfI, FinAbGroup, GroupElt};
pub use matrix::IntMatrix;
pub use poly::{cyclotomic_poly, euler_phi, CycloFactorization, MultiPoly, UniPoly};
pub use snf::{smith_normal_form, SmithForm};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(n: i64) -> Int {
    BigInt::from(n)
}

/// Reduce a rational to its representative in [0, 1).
pub fn mod1(x: &Rat) -> Rat {
    let f = x.floor();
    x - f
}

/// A vector in (Q/Z)^n, entries canonicalized to [0, 1).
/// Used to realize torus elements prod_i alpha_i^vee(e^{2 pi i q_i}).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QmodZVec(pub Vec<Rat>);

impl QmodZVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        QmodZVec(entries.iter().map(mod1).collect())
    }

    pub fn zero(n: usize) -> Self {
        QmodZVec(vec![Rat::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &QmodZVec) -> QmodZVec {
        QmodZVec::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn neg(&self) -> QmodZVec {
        QmodZVec::new(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> QmodZVec {
        let k = Rat::from(BigInt::from(k));
        QmodZVec::new(self.0.iter().map(|a| a * &k).collect())
    }
}

/// Order of x in Q/Z (denominator of the reduced fraction).
pub fn qmodz_order(x: &Rat) -> u64 {
    use num_traits::ToPrimitive;
    let y = mod1(x);
    y.denom().to_u64().expect("order fits in u64")
}

/// lcm of the orders of all entries.
pub fn qmodz_vec_order(v: &QmodZVec) -> u64 {
    v.0.iter()
        .map(qmodz_order)
        .fold(1u64, num_integer::lcm)
}

/// Exact sign-aware conversion for small literals in tests and catalog data.
pub fn rat_of_int(n: &Int) -> Rat {
    Rat::from(n.clone())
}

pub fn is_unit(n: &Int) -> bool {
    n.abs().is_one()
}
