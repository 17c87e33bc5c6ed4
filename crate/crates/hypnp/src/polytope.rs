//! Closed-form Newton polytope of the Laurent polynomial
//! `f_a = sum_{i>=2} x_i^d - sum_j y_j^d + a prod_j y_j^d / prod_{i>=2} x_i^d`
//! on the torus with coordinates `(u_2..u_n, v_1..v_m)`.
//!
//! The facet list depends on the shape: `n > m = 0` (the origin is interior),
//! `n > m > 0`, and `n = m` (a single facet avoids the origin).

use std::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::HypParams;
use crate::scalar::Scalar;
use crate::snf;

/// Name of an upper facet: `h_k` for `k` in `2..=n+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacetId(pub usize);

impl fmt::Display for FacetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}", self.0)
    }
}

impl Serialize for FacetId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A facet `coeffs . Q <= bound` not passing through the origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpperFacet {
    pub id: FacetId,
    pub coeffs: Vec<i64>,
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FacetSystem {
    pub n: usize,
    pub m: usize,
    pub d: i64,
    pub upper: Vec<UpperFacet>,
    /// Functionals `c` with `c . Q >= 0` on the cone over the polytope.
    pub cone: Vec<Vec<i64>>,
}

fn dot(c: &[i64], q: &[i64]) -> i64 {
    c.iter().zip(q).map(|(a, b)| a * b).sum()
}

impl FacetSystem {
    pub fn build(n: usize, m: usize, d: i64) -> Result<Self> {
        if n < m {
            return Err(Error::InvalidShape(format!("need n >= m, got n={n}, m={m}")));
        }
        if n + m < 2 {
            return Err(Error::InvalidShape(format!(
                "ambient dimension n+m-1 must be positive, got n={n}, m={m}"
            )));
        }
        if d < 1 {
            return Err(Error::InvalidShape(format!("d must be positive, got {d}")));
        }
        let nu = n - 1;
        let dim = nu + m;

        let mut cone = Vec::new();
        if m > 0 {
            for i in 0..nu {
                for j in 0..m {
                    let mut c = vec![0; dim];
                    c[i] = 1;
                    c[nu + j] = 1;
                    cone.push(c);
                }
            }
            for j in 0..m {
                let mut c = vec![0; dim];
                c[nu + j] = 1;
                cone.push(c);
            }
        }

        let mut upper = Vec::new();
        if n > m {
            let shift = (n - m) as i64;
            for i0 in 0..nu {
                let mut c = vec![1; dim];
                c[i0] -= shift;
                upper.push(UpperFacet {
                    id: FacetId(i0 + 2),
                    coeffs: c,
                    bound: d,
                });
            }
        }
        upper.push(UpperFacet {
            id: FacetId(n + 1),
            coeffs: vec![1; dim],
            bound: d,
        });

        Ok(Self { n, m, d, upper, cone })
    }

    pub fn dim(&self) -> usize {
        self.n + self.m - 1
    }

    /// Vertices other than the origin: `d e_i` for each coordinate and the
    /// exponent `R` of the `z`-monomial.
    pub fn vertices(&self) -> Vec<Vec<i64>> {
        let dim = self.dim();
        let nu = self.n - 1;
        let mut out = Vec::with_capacity(dim + 1);
        for k in 0..dim {
            let mut v = vec![0; dim];
            v[k] = self.d;
            out.push(v);
        }
        out.push((0..dim).map(|k| if k < nu { -self.d } else { self.d }).collect());
        out
    }

    pub fn in_cone(&self, q: &[i64]) -> bool {
        self.cone.iter().all(|c| dot(c, q) >= 0)
    }

    /// Membership in the dilate `k * Delta`.
    pub fn contains_scaled(&self, q: &[i64], k: i64) -> bool {
        self.in_cone(q) && self.upper.iter().all(|f| dot(&f.coeffs, q) <= f.bound * k)
    }

    /// `max(0, max_k h_k(Q))`: the weight of `Q` times `d`.
    pub fn weight_numerator(&self, q: &[i64]) -> Result<i64> {
        if q.len() != self.dim() {
            return Err(Error::InvalidShape(format!(
                "point has {} coordinates, expected {}",
                q.len(),
                self.dim()
            )));
        }
        if !self.in_cone(q) {
            return Err(Error::NotInCone(q.to_vec()));
        }
        Ok(self
            .upper
            .iter()
            .map(|f| dot(&f.coeffs, q))
            .max()
            .unwrap_or(0)
            .max(0))
    }

    /// Least `w >= 0` with `Q` in `w * Delta`.
    pub fn weight<T: Scalar>(&self, q: &[i64]) -> Result<T> {
        Ok(T::ratio(self.weight_numerator(q)?, self.d))
    }

    /// Facets attaining the weight of `Q`.
    pub fn achieving_facets(&self, q: &[i64]) -> Result<Vec<FacetId>> {
        let top = self.weight_numerator(q)?;
        Ok(self
            .upper
            .iter()
            .filter(|f| dot(&f.coeffs, q) == top)
            .map(|f| f.id)
            .collect())
    }
}

/// One element of the monomial basis, together with the index `k` of the
/// Hodge number it realizes (`s_r + l`, with `n + 1` read as `1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisExponent<T> {
    pub r: usize,
    pub ell: usize,
    pub point: Vec<i64>,
    pub weight: T,
    pub theta_index: usize,
}

/// The `n` basis exponents `g_{r,l}`. Requires `alpha_1 = 0`, non-resonant
/// parameters, and `d` a common denominator.
pub fn basis_exponents<T: Scalar>(params: &HypParams<T>, d: i64) -> Result<Vec<BasisExponent<T>>> {
    let (n, m) = (params.n(), params.m());
    if !params.alpha()[0].is_zero() {
        return Err(Error::Precondition("basis exponents require alpha_1 = 0".into()));
    }
    if !params.is_nonresonant() {
        return Err(Error::Precondition("basis exponents require non-resonant parameters".into()));
    }
    let scale = T::from_int(d);
    let scaled = |xs: &[T]| -> Result<Vec<i64>> {
        xs.iter()
            .map(|x| {
                let v = x.clone() * scale.clone();
                if v.is_integer_val() {
                    Ok(v.numer_i64().unwrap())
                } else {
                    Err(Error::Precondition(format!("{d} is not a common denominator of {x}")))
                }
            })
            .collect()
    };
    let a = scaled(params.alpha())?;
    let b = scaled(params.beta())?;
    let fs = FacetSystem::build(n, m, d)?;

    // s_0 = 1, s_r = #{i : alpha_i < beta_r}, s_{m+1} = n + 1
    let mut s = Vec::with_capacity(m + 2);
    s.push(1usize);
    for beta in params.beta() {
        s.push(params.alpha().iter().filter(|a| *a < beta).count());
    }
    s.push(n + 1);

    let mut out = Vec::with_capacity(n);
    for r in 0..=m {
        for ell in 1..=(s[r + 1] - s[r]) {
            let split = s[r] + ell; // 1-based index of the first shifted x
            let mut point = Vec::with_capacity(n + m - 1);
            for i in 2..=n {
                point.push(if i < split { a[i - 1] } else { a[i - 1] - d });
            }
            for (j, bj) in b.iter().enumerate() {
                point.push(if j < r { d - bj } else { 2 * d - bj });
            }
            let weight = fs.weight(&point)?;
            out.push(BasisExponent {
                r,
                ell,
                point,
                weight,
                theta_index: if split == n + 1 { 1 } else { split },
            });
        }
    }
    Ok(out)
}

/// `d^N n / N!` with `N = n + m - 1`.
pub fn volume(n: usize, m: usize, d: i64) -> Result<Ratio<BigInt>> {
    if n + m < 2 {
        return Err(Error::InvalidShape("ambient dimension must be positive".into()));
    }
    let dim = (n + m - 1) as u32;
    let num = BigInt::from(d).pow(dim) * BigInt::from(n);
    let fact: BigInt = (1..=dim).map(BigInt::from).product();
    Ok(Ratio::new(num, fact))
}

pub const DEFAULT_LATTICE_BUDGET: u64 = 50_000_000;

/// Number of lattice points in `k * Delta`.
pub fn lattice_count(fs: &FacetSystem, k: i64) -> u64 {
    let dim = fs.dim();
    let r = k * fs.d;
    let mut q = vec![-r; dim];
    let mut count = 0;
    loop {
        if fs.contains_scaled(&q, k) {
            count += 1;
        }
        let mut idx = 0;
        loop {
            if idx == dim {
                return count;
            }
            q[idx] += 1;
            if q[idx] <= r {
                break;
            }
            q[idx] = -r;
            idx += 1;
        }
    }
}

/// Ehrhart estimate of the volume: counts lattice points of `k Delta` for
/// `k = 1..=scale_max` and returns the leading coefficient of the degree-`N`
/// interpolant through the last `N + 1` counts.
pub fn lattice_count_volume_check(fs: &FacetSystem, scale_max: i64, budget: u64) -> Result<Ratio<BigInt>> {
    let dim = fs.dim();
    if scale_max < dim as i64 {
        return Err(Error::Precondition(format!(
            "scale_max {scale_max} must be at least the dimension {dim}"
        )));
    }
    let work: u128 = (1..=scale_max)
        .map(|k| ((2 * k * fs.d + 1) as u128).pow(dim as u32))
        .sum();
    if work > budget as u128 {
        return Err(Error::Resource(format!(
            "lattice enumeration needs {work} point tests, budget is {budget}"
        )));
    }
    let counts: Vec<BigInt> = (scale_max - dim as i64..=scale_max)
        .map(|k| BigInt::from(if k == 0 { 1 } else { lattice_count(fs, k) }))
        .collect();
    // N-th forward difference of a degree-N polynomial is N! * leading coeff.
    let mut diffs = counts;
    for _ in 0..dim {
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    let fact: BigInt = (1..=dim as u64).map(BigInt::from).product();
    Ok(Ratio::new(diffs[0].clone(), fact))
}

/// Smith invariant factors of the vertex matrix of each facet avoiding the
/// origin, for the polytope with every vertex scaled by `p - 1`.
pub fn wan_facet_groups(n: usize, m: usize, p: u64) -> Result<Vec<(FacetId, Vec<i64>)>> {
    if n <= m {
        return Err(Error::Precondition(format!("need n > m, got n={n}, m={m}")));
    }
    if p < 2 {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let fs = FacetSystem::build(n, m, p as i64 - 1)?;
    let dim = fs.dim();
    let verts = fs.vertices();
    let mut out = Vec::with_capacity(fs.upper.len());
    for facet in &fs.upper {
        let on: Vec<&Vec<i64>> = verts
            .iter()
            .filter(|v| dot(&facet.coeffs, v) == facet.bound)
            .collect();
        if on.len() != dim {
            return Err(Error::Geometry(format!(
                "facet {} carries {} vertices, expected {dim}",
                facet.id,
                on.len()
            )));
        }
        // vertices as columns
        let matrix: Vec<Vec<i64>> = (0..dim).map(|i| on.iter().map(|v| v[i]).collect()).collect();
        out.push((facet.id, snf::invariant_factors(&matrix)));
    }
    Ok(out)
}

/// `true` when every invariant factor of every facet equals `p - 1`.
pub fn wan_certificate_holds(groups: &[(FacetId, Vec<i64>)], p: u64) -> bool {
    groups
        .iter()
        .all(|(_, f)| f.iter().all(|&x| x == p as i64 - 1))
}

/// Checks the closed-form volume against lattice counting.
pub fn volume_matches_lattice_count(n: usize, m: usize, d: i64, scale_max: i64) -> Result<bool> {
    let fs = FacetSystem::build(n, m, d)?;
    let est = lattice_count_volume_check(&fs, scale_max, DEFAULT_LATTICE_BUDGET)?;
    Ok(est == volume(n, m, d)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Ratio<i64>;

    #[test]
    fn facets_interval() {
        let fs = FacetSystem::build(2, 0, 1).unwrap();
        assert!(fs.cone.is_empty());
        let upper: Vec<_> = fs.upper.iter().map(|f| (f.id.0, f.coeffs.clone(), f.bound)).collect();
        assert_eq!(upper, vec![(2, vec![-1], 1), (3, vec![1], 1)]);
        assert!(fs.contains_scaled(&[1], 1) && fs.contains_scaled(&[-1], 1));
        assert!(!fs.contains_scaled(&[2], 1));
    }

    #[test]
    fn facets_mixed_shape() {
        let fs = FacetSystem::build(2, 1, 2).unwrap();
        assert_eq!(fs.cone, vec![vec![1, 1], vec![0, 1]]);
        let upper: Vec<_> = fs.upper.iter().map(|f| (f.coeffs.clone(), f.bound)).collect();
        // h_2 = u + v - u = v, h_3 = u + v
        assert_eq!(upper, vec![(vec![0, 1], 2), (vec![1, 1], 2)]);
    }

    #[test]
    fn facets_equal_shape() {
        let fs = FacetSystem::build(2, 2, 1).unwrap();
        assert_eq!(
            fs.cone,
            vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 0], vec![0, 0, 1]]
        );
        assert_eq!(fs.upper.len(), 1);
        assert_eq!(fs.upper[0].coeffs, vec![1, 1, 1]);
    }

    #[test]
    fn degenerate_shapes_rejected() {
        assert!(matches!(FacetSystem::build(1, 0, 1), Err(Error::InvalidShape(_))));
        assert!(FacetSystem::build(1, 2, 1).is_err());
        assert!(FacetSystem::build(2, 0, 0).is_err());
    }

    #[test]
    fn weight_examples() {
        let fs = FacetSystem::build(2, 1, 2).unwrap();
        assert_eq!(fs.weight::<Q>(&[1, 1]).unwrap(), Q::from(1));
        assert_eq!(fs.weight::<Q>(&[0, 0]).unwrap(), Q::from(0));
        let fs = FacetSystem::build(2, 0, 2).unwrap();
        assert_eq!(fs.weight::<Q>(&[-1]).unwrap(), Q::new(1, 2));
        let fs = FacetSystem::build(3, 1, 1).unwrap();
        assert!(matches!(fs.weight::<Q>(&[-2, 0, 1]), Err(Error::NotInCone(_))));
    }

    #[test]
    fn vertices_sit_on_facets() {
        for (n, m) in [(2, 0), (3, 0), (2, 1), (3, 1), (3, 2), (2, 2), (1, 1)] {
            let fs = FacetSystem::build(n, m, 3).unwrap();
            for v in fs.vertices() {
                assert!(fs.contains_scaled(&v, 1), "{n},{m}: {v:?}");
                assert_eq!(fs.weight_numerator(&v).unwrap(), fs.d);
            }
        }
    }

    #[test]
    fn origin_is_interior_without_beta() {
        for n in 2..6 {
            let fs = FacetSystem::build(n, 0, 2).unwrap();
            let origin = vec![0; n - 1];
            assert!(fs.upper.iter().all(|f| dot(&f.coeffs, &origin) < f.bound));
        }
    }

    #[test]
    fn basis_examples() {
        let p = HypParams::normalize(&[Q::from(0), Q::new(1, 2)], &[]).unwrap();
        let b = basis_exponents(&p, 2).unwrap();
        let pts: Vec<_> = b.iter().map(|e| (e.point.clone(), e.weight)).collect();
        assert_eq!(pts, vec![(vec![-1], Q::new(1, 2)), (vec![1], Q::new(1, 2))]);

        let p = HypParams::normalize(&[Q::from(0), Q::from(0)], &[]).unwrap();
        let b = basis_exponents(&p, 1).unwrap();
        let pts: Vec<_> = b.iter().map(|e| (e.point.clone(), e.weight)).collect();
        assert_eq!(pts, vec![(vec![-1], Q::from(1)), (vec![0], Q::from(0))]);

        let p = HypParams::normalize(&[Q::from(0), Q::new(1, 3), Q::new(2, 3)], &[Q::new(1, 2)]).unwrap();
        for d in [6, 12] {
            let b = basis_exponents(&p, d).unwrap();
            assert_eq!(b.len(), 3);
            for e in &b {
                assert!(FacetSystem::build(3, 1, d).unwrap().in_cone(&e.point));
            }
        }
    }

    #[test]
    fn basis_preconditions() {
        let p = HypParams::normalize(&[Q::new(1, 2)], &[]).unwrap();
        assert!(basis_exponents(&p, 2).is_err());
        let p = HypParams::normalize(&[Q::from(0), Q::new(1, 3)], &[]).unwrap();
        assert!(basis_exponents(&p, 2).is_err());
        let p = HypParams::normalize(&[Q::from(0), Q::new(1, 3)], &[Q::new(1, 3)]).unwrap();
        assert!(basis_exponents(&p, 3).is_err());
    }

    #[test]
    fn volume_examples() {
        assert_eq!(volume(2, 0, 1).unwrap(), Ratio::from_integer(BigInt::from(2)));
        assert_eq!(volume(2, 1, 1).unwrap(), Ratio::from_integer(BigInt::from(1)));
        assert_eq!(volume(3, 0, 2).unwrap(), Ratio::from_integer(BigInt::from(6)));
        assert_eq!(volume(2, 2, 1).unwrap(), Ratio::new(BigInt::from(1), BigInt::from(3)));
    }

    #[test]
    fn lattice_volume_examples() {
        let big = |a: i64, b: i64| Ratio::new(BigInt::from(a), BigInt::from(b));
        let fs = FacetSystem::build(2, 0, 1).unwrap();
        assert_eq!(lattice_count(&fs, 4), 9);
        assert_eq!(lattice_count_volume_check(&fs, 10, DEFAULT_LATTICE_BUDGET).unwrap(), big(2, 1));
        let fs = FacetSystem::build(2, 1, 1).unwrap();
        assert_eq!(lattice_count_volume_check(&fs, 8, DEFAULT_LATTICE_BUDGET).unwrap(), big(1, 1));
        let fs = FacetSystem::build(2, 2, 1).unwrap();
        assert_eq!(lattice_count_volume_check(&fs, 8, DEFAULT_LATTICE_BUDGET).unwrap(), big(1, 3));
        assert!(matches!(
            lattice_count_volume_check(&fs, 8, 10),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn wan_examples() {
        let g = wan_facet_groups(2, 0, 3).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|(_, f)| f == &vec![2]));
        let g = wan_facet_groups(2, 1, 3).unwrap();
        assert!(g.iter().all(|(_, f)| f == &vec![2, 2]));
        let g = wan_facet_groups(3, 0, 5).unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.iter().all(|(_, f)| f == &vec![4, 4]));
        assert!(wan_certificate_holds(&g, 5));
        assert!(wan_facet_groups(2, 2, 3).is_err());
    }
}
