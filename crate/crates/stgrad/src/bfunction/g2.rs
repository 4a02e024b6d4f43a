//! Nilpotent orbit classifier for the Z/3 grading of G_2: the seven orbits
//! of G_0 on N_{-1} in the coordinates y = (y_0, y_1, y_2, y_3, y_4).

use crate::lattice::Rat;
use num_traits::Zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum G2Orbit {
    Z1,
    Z2,
    Z3,
    Z4,
    Z5,
    Z6,
    Zero,
}

impl G2Orbit {
    pub fn dim(self) -> usize {
        match self {
            G2Orbit::Z1 | G2Orbit::Z2 => 4,
            G2Orbit::Z3 | G2Orbit::Z4 => 3,
            G2Orbit::Z5 => 2,
            G2Orbit::Z6 => 1,
            G2Orbit::Zero => 0,
        }
    }

    pub fn all() -> [G2Orbit; 7] {
        [
            G2Orbit::Z1,
            G2Orbit::Z2,
            G2Orbit::Z3,
            G2Orbit::Z4,
            G2Orbit::Z5,
            G2Orbit::Z6,
            G2Orbit::Zero,
        ]
    }
}

#[derive(Debug, thiserror::Error)]
pub enum G2Error {
    #[error("point is not nilpotent: y_0^2 h(y) != 0")]
    NotNilpotent,
    #[error("condition sets are not a partition at {0:?}")]
    NotPartition(Vec<i64>),
}

/// h(y_1, .., y_4) = (y1 y4 - y2 y3)^2 + 4 (y1 y3 - y2^2)(y3^2 - y2 y4).
pub fn h_quartic(y: &[Rat]) -> Rat {
    let m1 = minor1(y);
    let m2 = minor2(y);
    let m3 = minor3(y);
    &m1 * &m1 + Rat::from(crate::lattice::int(4)) * m2 * m3
}

fn minor1(y: &[Rat]) -> Rat {
    &y[1] * &y[4] - &y[2] * &y[3]
}

fn minor2(y: &[Rat]) -> Rat {
    &y[1] * &y[3] - &y[2] * &y[2]
}

fn minor3(y: &[Rat]) -> Rat {
    &y[3] * &y[3] - &y[2] * &y[4]
}

/// Classify a nilpotent element y = (y_0, y_1, y_2, y_3, y_4) of g_{-1}.
pub fn classify_orbit_g2(y: &[Rat]) -> Result<G2Orbit, G2Error> {
    assert_eq!(y.len(), 5);
    let h = h_quartic(y);
    let y0_zero = y[0].is_zero();
    if !y0_zero && !h.is_zero() {
        return Err(G2Error::NotNilpotent);
    }
    let minors_zero = minor1(y).is_zero() && minor2(y).is_zero() && minor3(y).is_zero();
    let tail_zero = y[1..].iter().all(|x| x.is_zero());
    Ok(match (y0_zero, h.is_zero(), minors_zero, tail_zero) {
        (false, _, _, true) => G2Orbit::Z6,
        (false, _, true, false) => G2Orbit::Z3,
        (false, true, false, _) => G2Orbit::Z2,
        (true, false, _, _) => G2Orbit::Z1,
        (true, true, false, _) => G2Orbit::Z4,
        (true, true, true, false) => G2Orbit::Z5,
        (true, true, true, true) => G2Orbit::Zero,
        _ => unreachable!("cases cover the nilpotent locus"),
    })
}

/// Exhaustive partition check over the grid {-c..c}^5 intersected with the
/// nilpotent cone. Returns the number of nilpotent points classified.
pub fn g2_grid_check(c: i64) -> Result<usize, G2Error> {
    let vals: Vec<i64> = (-c..=c).collect();
    let mut count = 0usize;
    let mut idx = [0usize; 5];
    let n = vals.len();
    loop {
        let y: Vec<Rat> = idx
            .iter()
            .map(|&i| Rat::from(crate::lattice::int(vals[i])))
            .collect();
        let y0_zero = y[0].is_zero();
        let h = h_quartic(&y);
        if y0_zero || h.is_zero() {
            // nilpotent: must classify into exactly one orbit; the match in
            // classify_orbit_g2 is already disjoint by construction, so we
            // re-verify by testing each condition set independently.
            let labels = condition_sets(&y);
            if labels.len() != 1 {
                return Err(G2Error::NotPartition(
                    idx.iter().map(|&i| vals[i]).collect(),
                ));
            }
            let direct = classify_orbit_g2(&y).map_err(|_| {
                G2Error::NotPartition(idx.iter().map(|&i| vals[i]).collect())
            })?;
            if labels[0] != direct {
                return Err(G2Error::NotPartition(
                    idx.iter().map(|&i| vals[i]).collect(),
                ));
            }
            count += 1;
        }
        // advance the odometer
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == 5 {
                return Ok(count);
            }
        }
    }
}

/// Evaluate the seven condition sets independently (used for the
/// disjointness check).
fn condition_sets(y: &[Rat]) -> Vec<G2Orbit> {
    let h = h_quartic(y);
    let m = minor1(y).is_zero() && minor2(y).is_zero() && minor3(y).is_zero();
    let y0 = y[0].is_zero();
    let tail = y[1..].iter().all(|x| x.is_zero());
    let mut out = Vec::new();
    if y0 && !h.is_zero() {
        out.push(G2Orbit::Z1);
    }
    if !y0 && h.is_zero() && !m {
        out.push(G2Orbit::Z2);
    }
    if !y0 && m && !tail {
        out.push(G2Orbit::Z3);
    }
    if y0 && h.is_zero() && !m {
        out.push(G2Orbit::Z4);
    }
    if y0 && m && !tail {
        out.push(G2Orbit::Z5);
    }
    if !y0 && tail {
        out.push(G2Orbit::Z6);
    }
    if y0 && tail {
        out.push(G2Orbit::Zero);
    }
    out
}

/// Point counts of each orbit's condition set over F_7, for the dimension
/// check: counts scale like 7^dim.
pub fn g2_point_counts() -> Vec<(G2Orbit, u64)> {
    const P: i64 = 7;
    let mut counts = std::collections::HashMap::new();
    let mut y = [0i64; 5];
    loop {
        let yr: Vec<Rat> = y.iter().map(|&v| crate::lattice::rat(v, 1)).collect();
        let h = h_quartic(&yr);
        let h0 = modp(&h, P) == 0;
        let y00 = y[0] % P == 0;
        if y00 || h0 {
            let m = modp(&minor1(&yr), P) == 0
                && modp(&minor2(&yr), P) == 0
                && modp(&minor3(&yr), P) == 0;
            let tail = y[1..].iter().all(|&v| v % P == 0);
            let label = match (y00, h0, m, tail) {
                (false, _, _, true) => G2Orbit::Z6,
                (false, _, true, false) => G2Orbit::Z3,
                (false, true, false, _) => G2Orbit::Z2,
                (true, false, _, _) => G2Orbit::Z1,
                (true, true, false, _) => G2Orbit::Z4,
                (true, true, true, false) => G2Orbit::Z5,
                (true, true, true, true) => G2Orbit::Zero,
                _ => unreachable!(),
            };
            *counts.entry(label).or_insert(0u64) += 1;
        }
        let mut k = 0;
        loop {
            y[k] += 1;
            if y[k] < P {
                break;
            }
            y[k] = 0;
            k += 1;
            if k == 5 {
                let mut out: Vec<(G2Orbit, u64)> = counts.into_iter().collect();
                out.sort_by_key(|&(o, _)| o.dim());
                return out;
            }
        }
    }
}

fn modp(x: &Rat, p: i64) -> i64 {
    use num_traits::ToPrimitive;
    // x is an integer here
    let v = x.to_integer();
    let r = num_integer::Integer::mod_floor(&v, &crate::lattice::int(p));
    r.to_i64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn point(v: [i64; 5]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn representatives_classify_to_themselves() {
        // z_i in the coordinates (y_0, y_1, y_2, y_3, y_4)
        assert_eq!(classify_orbit_g2(&point([0, 0, 1, 1, 0])).unwrap(), G2Orbit::Z1);
        assert_eq!(classify_orbit_g2(&point([1, 0, 1, 0, 0])).unwrap(), G2Orbit::Z2);
        assert_eq!(classify_orbit_g2(&point([1, 1, 0, 0, 0])).unwrap(), G2Orbit::Z3);
        assert_eq!(classify_orbit_g2(&point([0, 0, 1, 0, 0])).unwrap(), G2Orbit::Z4);
        assert_eq!(classify_orbit_g2(&point([0, 1, 0, 0, 0])).unwrap(), G2Orbit::Z5);
        assert_eq!(classify_orbit_g2(&point([1, 0, 0, 0, 0])).unwrap(), G2Orbit::Z6);
        assert_eq!(classify_orbit_g2(&point([0, 0, 0, 0, 0])).unwrap(), G2Orbit::Zero);
    }

    #[test]
    fn non_nilpotent_rejected() {
        // y_0 != 0 and h != 0
        assert!(classify_orbit_g2(&point([1, 0, 1, 1, 0])).is_err());
    }

    #[test]
    fn f7_dimension_counts() {
        let counts = g2_point_counts();
        for (orbit, n) in counts {
            let d = orbit.dim() as f64;
            let est = (n as f64).ln() / 7f64.ln();
            assert!(
                (est - d).abs() < 0.5,
                "{orbit:?}: count {n} suggests dim {est:.2}, expected {d}"
            );
        }
    }
}
