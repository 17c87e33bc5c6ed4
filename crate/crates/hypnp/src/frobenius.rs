//! Fiberwise Frobenius characteristic polynomials and their Newton polygons.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charsum::{hyp_sum_with_budget, hyp_sums_all_points, SumContext, SumValue, DEFAULT_SUM_BUDGET};
use crate::error::{Error, Result};
use crate::hodge::{as_hodge_polygon, irregular_hodge_polygon};
use crate::padic::PadicElement;
use crate::params::CharParams;
use crate::{Polygon, Rational};

/// Outcome of a Newton/Hodge comparison at one fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Ordinary,
    NewtonAboveHodge,
    /// Only reported where no inequality is claimed: resonant parameters or
    /// character orders not dividing `p - 1`.
    NewtonBelowHodge,
    PrecisionFail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Ordinary => "ordinary",
            Verdict::NewtonAboveHodge => "newton-above-hodge",
            Verdict::NewtonBelowHodge => "newton-below-hodge",
            Verdict::PrecisionFail => "precision-fail",
        })
    }
}

/// `ord_q` of a characteristic polynomial coefficient, or a lower bound when
/// the coefficient vanishes to working precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoeffOrd {
    Exact(Rational),
    AtLeast(Rational),
}

impl CoeffOrd {
    pub fn value(&self) -> &Rational {
        match self {
            CoeffOrd::Exact(v) | CoeffOrd::AtLeast(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CoeffOrd::Exact(_))
    }
}

impl fmt::Display for CoeffOrd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffOrd::Exact(v) => write!(f, "{v}"),
            CoeffOrd::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrobeniusReport {
    pub params: CharParams,
    pub point: u64,
    /// Power sums are `epsilon * N_j`.
    pub epsilon: i64,
    pub traces: Vec<SumValue>,
    /// `e_0..e_n`.
    pub charpoly_ords: Vec<CoeffOrd>,
    pub newton_polygon: Option<Polygon>,
    pub hodge_polygon: Polygon,
    /// The Hodge side is an orbit average with no established comparison.
    pub hodge_experimental: bool,
    pub resonant: bool,
    pub verdict: Verdict,
    pub precision_pi: u64,
    pub note: Option<String>,
}

/// `(-1)^{n+m-1}`.
pub fn epsilon(cp: &CharParams) -> i64 {
    if (cp.n() + cp.m() - 1) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Elementary symmetric functions `e_1..e_n` of the Frobenius eigenvalues
/// from the sums `N_1..N_n` over `F_{q^j}`, with power sums
/// `t_j = epsilon N_j` and `k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} t_i`.
pub fn char_poly_from_traces(sums: &[PadicElement], epsilon: i64) -> Result<Vec<PadicElement>> {
    let Some(first) = sums.first() else {
        return Ok(Vec::new());
    };
    let ring = first.ring().clone();
    let t: Vec<PadicElement> = sums.iter().map(|s| s.scale_int(epsilon)).collect();
    let mut e = vec![ring.one()];
    for k in 1..=t.len() {
        let mut acc = ring.zero();
        for i in 1..=k {
            let term = e[k - i].mul(&t[i - 1])?;
            acc = if i % 2 == 1 { acc.add(&term)? } else { acc.sub(&term)? };
        }
        let ek = acc.div_int(k as u64).map_err(|err| match err {
            Error::Domain(reason) => Error::Precision {
                reason: format!("Newton identity division failed: {reason}"),
                required_pi_digits: 2 * ring.precision_pi(),
            },
            other => other,
        })?;
        e.push(ek);
    }
    e.remove(0);
    Ok(e)
}

/// `e_1..e_n` at the point `a`, traces by direct enumeration.
pub fn char_poly(ctx: &SumContext, a: u64) -> Result<Vec<PadicElement>> {
    let traces = direct_traces(ctx, a, DEFAULT_SUM_BUDGET)?;
    let sums: Vec<PadicElement> = traces.into_iter().map(|t| t.padic).collect();
    char_poly_from_traces(&sums, epsilon(ctx.params()))
}

fn direct_traces(ctx: &SumContext, a: u64, budget: u64) -> Result<Vec<SumValue>> {
    (1..=ctx.params().n() as u32)
        .map(|j| hyp_sum_with_budget(ctx, a, j, budget))
        .collect()
}

/// Lower convex hull of `(k, ord_q e_k)`, `k = 0..n`, all finite.
pub fn newton_polygon(e_ords: &[Rational]) -> Polygon {
    let pts: Vec<(i64, Rational)> = e_ords
        .iter()
        .enumerate()
        .map(|(k, v)| (k as i64, v.clone()))
        .collect();
    Polygon::lower_hull(&pts)
}

/// Newton polygon from coefficients some of which are only bounded below.
/// Fails when `e_0` or `e_n` is inexact or when a bound is not on or above
/// the hull of the exact points, since the true polygon is then unknown.
pub fn newton_polygon_bounded(ords: &[CoeffOrd]) -> Option<Polygon> {
    if !ords.first()?.is_exact() || !ords.last()?.is_exact() {
        return None;
    }
    let pts: Vec<(i64, Rational)> = ords
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_exact())
        .map(|(k, o)| (k as i64, o.value().clone()))
        .collect();
    let hull = Polygon::lower_hull(&pts);
    let heights = hull.heights();
    ords.iter()
        .enumerate()
        .all(|(k, o)| o.is_exact() || *o.value() >= heights[k])
        .then_some(hull)
}

/// Hodge polygon for the characters of `cp`: the irregular Hodge polygon
/// for `s = 1`, the orbit average otherwise.
pub fn hodge_side(cp: &CharParams) -> Result<(Polygon, bool)> {
    let params = cp.hyp_params::<Rational>();
    if cp.s == 1 {
        Ok((irregular_hodge_polygon(&params), false))
    } else {
        let orbit = as_hodge_polygon(&params, cp.p, cp.s)?;
        Ok((orbit.polygon, orbit.experimental && !cp.orders_divide_p_minus_1()))
    }
}

/// Assembles the report at point `a` from the sums over `F_{q^j}`,
/// `j = 1..n`.
pub fn report_from_traces(ctx: &SumContext, a: u64, traces: Vec<SumValue>) -> Result<FrobeniusReport> {
    let cp = ctx.params().clone();
    let eps = epsilon(&cp);
    let sums: Vec<PadicElement> = traces.iter().map(|t| t.padic.clone()).collect();
    let (hodge, experimental) = hodge_side(&cp)?;
    let resonant = !cp.is_nonresonant();
    let precision_pi = ctx.ring().precision_pi();
    let mut report = FrobeniusReport {
        params: cp.clone(),
        point: a,
        epsilon: eps,
        traces,
        charpoly_ords: Vec::new(),
        newton_polygon: None,
        hodge_polygon: hodge.clone(),
        hodge_experimental: experimental,
        resonant,
        verdict: Verdict::PrecisionFail,
        precision_pi,
        note: None,
    };
    let e = match char_poly_from_traces(&sums, eps) {
        Ok(e) => e,
        Err(err @ Error::Precision { .. }) => {
            report.note = Some(err.to_string());
            return Ok(report);
        }
        Err(err) => return Err(err),
    };
    let mut ords = vec![CoeffOrd::Exact(Rational::from_integer(0.into()))];
    for ek in &e {
        ords.push(match ek.ord_q() {
            Ok(v) => CoeffOrd::Exact(v),
            Err(_) => CoeffOrd::AtLeast(ek.ord_q_floor()),
        });
    }
    report.charpoly_ords = ords;
    let Some(newton) = newton_polygon_bounded(&report.charpoly_ords) else {
        report.note = Some(format!(
            "coefficients vanish to precision {precision_pi}; rerun with precision >= {}",
            2 * precision_pi
        ));
        return Ok(report);
    };
    let asserted = !resonant && cp.orders_divide_p_minus_1();
    if asserted && newton.endpoint() != hodge.endpoint() {
        return Err(Error::Convention(format!(
            "ord_q(e_n) = {} but the Hodge endpoint is {} (epsilon = {eps})",
            newton.endpoint().1,
            hodge.endpoint().1
        )));
    }
    report.verdict = if newton.slopes() == hodge.slopes() {
        Verdict::Ordinary
    } else if newton.lies_on_or_above(&hodge) {
        Verdict::NewtonAboveHodge
    } else if asserted {
        return Err(Error::NewtonBelowHodge(format!(
            "{cp:?} at a = {a}: Newton {newton} vs Hodge {hodge}"
        )));
    } else {
        Verdict::NewtonBelowHodge
    };
    report.newton_polygon = Some(newton);
    Ok(report)
}

/// Full comparison at one point, traces by direct enumeration.
pub fn compare(ctx: &SumContext, a: u64) -> Result<FrobeniusReport> {
    compare_with_budget(ctx, a, DEFAULT_SUM_BUDGET)
}

pub fn compare_with_budget(ctx: &SumContext, a: u64, budget: u64) -> Result<FrobeniusReport> {
    let traces = direct_traces(ctx, a, budget)?;
    report_from_traces(ctx, a, traces)
}

/// Comparison at every `a = g^k`, `k = 0..q-2`, with all fibers summed at
/// once per extension degree.
pub fn compare_all_points(ctx: &SumContext) -> Result<Vec<FrobeniusReport>> {
    let n = ctx.params().n() as u32;
    let per_ext: Vec<Vec<SumValue>> = (1..=n)
        .map(|j| hyp_sums_all_points(ctx, j))
        .collect::<Result<_>>()?;
    let order = ctx.field().order() as usize;
    (0..order)
        .into_par_iter()
        .map(|k| {
            let traces = per_ext.iter().map(|v| v[k].clone()).collect();
            report_from_traces(ctx, ctx.field().exp(k as u64), traces)
        })
        .collect()
}

/// Non-resonant exponent tuples over `F_p` (`s = 1`), up to permutation:
/// `a` and `b` nondecreasing and disjoint, `1 <= n <= nmax`, `m < n`,
/// `m <= mmax`. Every character order divides `p - 1`.
pub fn nonresonant_tuples(p: u64, nmax: usize, mmax: usize) -> Result<Vec<CharParams>> {
    let mut out = Vec::new();
    for n in 1..=nmax {
        for m in 0..n.min(mmax + 1) {
            for a in multisets(p - 1, n) {
                for b in multisets(p - 1, m) {
                    if b.iter().any(|x| a.contains(x)) {
                        continue;
                    }
                    out.push(CharParams::new(p, 1, a.clone(), b)?);
                }
            }
        }
    }
    Ok(out)
}

/// Nondecreasing sequences of length `len` over `0..values`.
fn multisets(values: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(values: u64, len: usize, start: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in start..values {
            cur.push(v);
            rec(values, len, v, cur, out);
            cur.pop();
        }
    }
    rec(values, len, 0, &mut cur, &mut out);
    out
}
