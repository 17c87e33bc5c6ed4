//! Convex polygons in the plane stored as slope multisets.
//!
//! A polygon with slopes `s_1 <= ... <= s_n` has vertex chain
//! `(k, s_1 + ... + s_k)` starting at the origin. Newton and Hodge polygons
//! are both compared through this representation.

use std::fmt;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polygon<T> {
    slopes: Vec<T>,
}

impl<T: Scalar> Polygon<T> {
    /// Builds a polygon from an unordered multiset of slopes.
    pub fn from_slopes(mut slopes: Vec<T>) -> Self {
        slopes.sort();
        Self { slopes }
    }

    /// Lower convex hull of `points`, which must be sorted by strictly
    /// increasing abscissa and start at abscissa 0. Each hull segment of
    /// horizontal length `l` contributes its slope `l` times.
    pub fn lower_hull(points: &[(i64, T)]) -> Self {
        let mut hull: Vec<&(i64, T)> = Vec::with_capacity(points.len());
        for pt in points {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                // drop b when it lies on or above the chord a -> pt
                let lhs = (b.1.clone() - a.1.clone()) * T::from_int(pt.0 - a.0);
                let rhs = (pt.1.clone() - a.1.clone()) * T::from_int(b.0 - a.0);
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let mut slopes = Vec::new();
        for w in hull.windows(2) {
            let run = w[1].0 - w[0].0;
            let slope = (w[1].1.clone() - w[0].1.clone()) / T::from_int(run);
            slopes.extend(std::iter::repeat_n(slope, run as usize));
        }
        Self { slopes }
    }

    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }

    /// Height of the polygon at every integer abscissa `0..=len`.
    pub fn heights(&self) -> Vec<T> {
        let mut h = Vec::with_capacity(self.slopes.len() + 1);
        let mut acc = T::zero();
        h.push(acc.clone());
        for s in &self.slopes {
            acc = acc + s.clone();
            h.push(acc.clone());
        }
        h
    }

    /// Vertices where the slope changes, plus both endpoints.
    pub fn vertices(&self) -> Vec<(i64, T)> {
        let h = self.heights();
        let mut v = vec![(0, T::zero())];
        for k in 1..=self.slopes.len() {
            let last = k == self.slopes.len();
            if last || self.slopes[k - 1] != self.slopes[k] {
                v.push((k as i64, h[k].clone()));
            }
        }
        v
    }

    pub fn endpoint(&self) -> (i64, T) {
        (self.slopes.len() as i64, self.heights().pop().unwrap())
    }

    /// `true` when `self` is nowhere strictly below `other`. Both polygons
    /// must have the same length; breakpoints sit on integers so comparing
    /// heights there is exact.
    pub fn lies_on_or_above(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .heights()
                .iter()
                .zip(other.heights())
                .all(|(a, b)| *a >= b)
    }

    /// First abscissa where `self` is strictly below `other`.
    pub fn first_dip_below(&self, other: &Self) -> Option<usize> {
        self.heights()
            .iter()
            .zip(other.heights())
            .position(|(a, b)| *a < b)
    }

    pub fn map_scalar<U: Scalar>(&self) -> Polygon<U> {
        Polygon {
            slopes: self
                .slopes
                .iter()
                .map(|s| crate::scalar::convert(s).expect("scalar conversion"))
                .collect(),
        }
    }

    pub fn slope_strings(&self) -> Vec<String> {
        self.slopes.iter().map(|s| s.to_string()).collect()
    }
}

impl<T: Scalar> fmt::Display for Polygon<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.slopes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}
