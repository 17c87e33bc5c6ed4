//! Irregular Hodge numbers `theta(k)` of hypergeometric connections and the
//! polygons built from them.
//!
//! Normalization: `theta(k) = (n-m) alpha_k + #{j : beta_j < alpha_k} + (n-k)
//! - sum(alpha) + sum(beta)`. These are the jumps of the filtration on the
//! degree `n+m-1` twisted de Rham cohomology of the torus model, so they
//! differ from the convention used for the connection alone by a constant
//! shift.

use crate::error::{Error, Result};
use crate::params::HypParams;
use crate::polygon::Polygon;
use crate::scalar::{sum, Scalar};

/// `theta(k)` for `k = 1..=n`, in index order.
pub fn theta<T: Scalar>(params: &HypParams<T>) -> Vec<T> {
    let n = params.n() as i64;
    let m = params.m() as i64;
    let shift = sum(params.beta()) - sum(params.alpha());
    params
        .alpha()
        .iter()
        .enumerate()
        .map(|(idx, a)| {
            let k = idx as i64 + 1;
            let below = params.beta().iter().filter(|b| *b < a).count() as i64;
            T::from_int(n - m) * a.clone() + T::from_int(below + n - k) + shift.clone()
        })
        .collect()
}

/// The irregular Hodge polygon: slope multiset `{theta(k)}`.
pub fn irregular_hodge_polygon<T: Scalar>(params: &HypParams<T>) -> Polygon<T> {
    Polygon::from_slopes(theta(params))
}

/// Checks `{theta(k)} = {n+m-1 - theta_bar(k)}` as multisets, where
/// `theta_bar` is computed from the conjugate parameters. Holds for
/// non-resonant parameters; a coincidence `alpha_i = beta_j` can break it.
pub fn duality_pairing<T: Scalar>(params: &HypParams<T>) -> bool {
    let top = T::from_int(params.ambient_dim() as i64);
    let mut lhs = theta(params);
    let mut rhs: Vec<T> = theta(&params.conjugate())
        .into_iter()
        .map(|t| top.clone() - t)
        .collect();
    lhs.sort();
    rhs.sort();
    lhs == rhs
}

/// Frobenius-orbit averaged Hodge polygon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitHodgePolygon<T> {
    pub polygon: Polygon<T>,
    /// Sorted `theta` multiset of each orbit member `twist^i(params)`,
    /// `i = 0..s`.
    pub orbit_thetas: Vec<Vec<T>>,
    /// Set when `s > 1`: the identification of weights with `theta` values
    /// is only established orbitwise for `s = 1`.
    pub experimental: bool,
    pub resonant: bool,
}

/// Averages the sorted `theta` multisets along the orbit of
/// `x -> prime * x mod 1`. For `s = 1` this is the irregular Hodge polygon.
pub fn as_hodge_polygon<T: Scalar>(
    params: &HypParams<T>,
    prime: u64,
    s: u32,
) -> Result<OrbitHodgePolygon<T>> {
    if s == 0 {
        return Err(Error::Precondition("s must be positive".into()));
    }
    let modulus = prime
        .checked_pow(s)
        .ok_or_else(|| Error::Resource(format!("{prime}^{s} overflows")))?
        - 1;
    if !params.denominators_divide(modulus) {
        return Err(Error::Precondition(format!(
            "parameter denominators do not divide {prime}^{s} - 1"
        )));
    }
    let mut member = params.clone();
    let mut orbit_thetas = Vec::with_capacity(s as usize);
    for _ in 0..s {
        let mut t = theta(&member);
        t.sort();
        orbit_thetas.push(t);
        member = member.frobenius_twist(prime);
    }
    let count = T::from_int(s as i64);
    let slopes: Vec<T> = (0..params.n())
        .map(|j| {
            orbit_thetas
                .iter()
                .fold(T::zero(), |acc, t| acc + t[j].clone())
                / count.clone()
        })
        .collect();
    Ok(OrbitHodgePolygon {
        polygon: Polygon::from_slopes(slopes),
        orbit_thetas,
        experimental: s > 1,
        resonant: !params.is_nonresonant(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn hp(a: &[Q], b: &[Q]) -> HypParams<Q> {
        HypParams::normalize(a, b).unwrap()
    }

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| Q::from(x)).collect()
    }

    #[test]
    fn duality_needs_nonresonance() {
        // alpha_2 = beta_2 = 1/3: the strict counts no longer pair up
        let p = hp(&[q(0, 1), q(1, 3), q(11, 16)], &[q(1, 22), q(1, 3)]);
        assert!(!duality_pairing(&p));
        let p = hp(&[q(0, 1), q(1, 3), q(11, 16)], &[q(1, 22), q(1, 4)]);
        assert!(duality_pairing(&p));
    }

    #[test]
    fn theta_examples() {
        let p = hp(&[q(0, 1); 4], &[q(1, 5), q(2, 5), q(3, 5), q(4, 5)]);
        assert_eq!(theta(&p), qs(&[5, 4, 3, 2]));
        assert_eq!(irregular_hodge_polygon(&p).slopes(), &qs(&[2, 3, 4, 5])[..]);

        for n in 1..6 {
            let p = hp(&vec![q(0, 1); n], &[]);
            let expect: Vec<Q> = (1..=n as i64).map(|k| Q::from(n as i64 - k)).collect();
            assert_eq!(theta(&p), expect);
        }

        assert_eq!(theta(&hp(&[q(0, 1), q(1, 2)], &[])), vec![q(1, 2), q(1, 2)]);
        assert_eq!(
            irregular_hodge_polygon(&hp(&[q(0, 1), q(1, 3)], &[])).slopes(),
            &[q(1, 3), q(2, 3)]
        );
        assert_eq!(irregular_hodge_polygon(&hp(&[q(0, 1)], &[])).slopes(), &[q(0, 1)]);
    }

    #[test]
    fn duality_examples() {
        assert!(duality_pairing(&hp(&[q(0, 1), q(1, 2)], &[])));
        assert!(duality_pairing(&hp(&[q(0, 1), q(1, 3)], &[])));
        assert!(duality_pairing(&hp(&[q(0, 1), q(1, 3), q(3, 4)], &[q(1, 2), q(5, 6)])));
    }

    #[test]
    fn orbit_polygon_s1_is_irregular() {
        let p = hp(&[q(0, 1), q(1, 2)], &[q(1, 4)]);
        let o = as_hodge_polygon(&p, 5, 1).unwrap();
        assert_eq!(o.polygon, irregular_hodge_polygon(&p));
        assert!(!o.experimental);
        assert!(as_hodge_polygon(&p, 3, 1).is_err());
    }

    #[test]
    fn orbit_polygon_twist_invariant() {
        let p = hp(&[q(0, 1), q(0, 1)], &[]);
        let o = as_hodge_polygon(&p, 7, 2).unwrap();
        assert_eq!(o.polygon.slopes(), &qs(&[0, 1])[..]);
        assert!(o.experimental);
    }

    #[test]
    fn orbit_polygon_averages() {
        // theta(0,1/8) = (5/8, 3/8 + ... ) evaluated independently:
        // n=2,m=0: theta(1) = 1 - a2, theta(2) = a2 (since 2*a2 - a2 = a2)
        let p = hp(&[q(0, 1), q(1, 8)], &[]);
        let o = as_hodge_polygon(&p, 3, 2).unwrap();
        assert_eq!(o.orbit_thetas[0], vec![q(1, 8), q(7, 8)]);
        assert_eq!(o.orbit_thetas[1], vec![q(3, 8), q(5, 8)]);
        assert_eq!(o.polygon.slopes(), &[q(1, 4), q(3, 4)]);
    }
}
