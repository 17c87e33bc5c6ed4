//! Serializable views of the computed objects and an SVG plot of polygons.

use std::fmt::Write as _;

use serde::Serialize;

use crate::charsum::{GroupRingSum, SumValue};
use crate::frobenius::{FrobeniusReport, Verdict};
use crate::padic::PadicJson;
use crate::params::{CharParams, RawParams};
use crate::Polygon;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonJson {
    pub slopes: Vec<String>,
    /// `[k, height]` pairs from the origin.
    pub vertices: Vec<(i64, String)>,
}

impl From<&Polygon> for PolygonJson {
    fn from(p: &Polygon) -> Self {
        Self {
            slopes: p.slope_strings(),
            vertices: p.vertices().into_iter().map(|(k, h)| (k, h.to_string())).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HodgeJson {
    pub params: RawParams,
    pub theta: Vec<String>,
    pub polygon: PolygonJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitJson {
    pub p: u64,
    pub s: u32,
    pub polygon: PolygonJson,
    pub orbit_thetas: Vec<Vec<String>>,
    pub experimental: bool,
    pub resonant: bool,
}

/// `[t, e, c]`: coefficient `c` on `zeta_p^t omega(g)^e`.
pub fn group_ring_terms(g: &GroupRingSum) -> Vec<(u64, u64, i64)> {
    g.terms()
}

#[derive(Debug, Clone, Serialize)]
pub struct SumJson {
    pub params: CharParams,
    pub point: u64,
    pub ext: u32,
    pub ord_q: Option<String>,
    pub group_ring: Option<Vec<(u64, u64, i64)>>,
    pub precision: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padic: Option<PadicJson>,
}

impl SumJson {
    pub fn new(params: &CharParams, point: u64, ext: u32, value: &SumValue, debug_padic: bool) -> Self {
        Self {
            params: params.clone(),
            point,
            ext,
            ord_q: value.ord_q().ok().map(|v| v.to_string()),
            group_ring: value.group_ring.as_ref().map(group_ring_terms),
            precision: value.padic.ring().precision_pi(),
            padic: debug_padic.then(|| value.padic.to_json()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceJson {
    pub ext: u32,
    pub ord_q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padic: Option<PadicJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoeffJson {
    pub k: usize,
    pub ord_q: String,
    pub exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub params: CharParams,
    pub point: u64,
    pub epsilon: i64,
    pub traces: Vec<TraceJson>,
    pub charpoly_ords: Vec<CoeffJson>,
    pub newton_polygon: Option<PolygonJson>,
    pub hodge_polygon: PolygonJson,
    pub hodge_experimental: bool,
    pub resonant: bool,
    pub verdict: Verdict,
    pub precision: u64,
    pub note: Option<String>,
}

impl ReportJson {
    pub fn new(r: &FrobeniusReport, debug_padic: bool) -> Self {
        Self {
            params: r.params.clone(),
            point: r.point,
            epsilon: r.epsilon,
            traces: r
                .traces
                .iter()
                .enumerate()
                .map(|(j, t)| TraceJson {
                    ext: j as u32 + 1,
                    ord_q: t.ord_q().ok().map(|v| v.to_string()),
                    padic: debug_padic.then(|| t.padic.to_json()),
                })
                .collect(),
            charpoly_ords: r
                .charpoly_ords
                .iter()
                .enumerate()
                .map(|(k, o)| CoeffJson {
                    k,
                    ord_q: o.value().to_string(),
                    exact: o.is_exact(),
                })
                .collect(),
            newton_polygon: r.newton_polygon.as_ref().map(PolygonJson::from),
            hodge_polygon: PolygonJson::from(&r.hodge_polygon),
            hodge_experimental: r.hodge_experimental,
            resonant: r.resonant,
            verdict: r.verdict,
            precision: r.precision_pi,
            note: r.note.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareJson {
    pub reports: Vec<ReportJson>,
    pub all_ordinary: bool,
}

/// One CSV row: `p,s,n,m,aexps,bexps,point,verdict,np_slopes,hp_slopes`.
/// List-valued fields are space separated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub p: u64,
    pub s: u32,
    pub n: usize,
    pub m: usize,
    pub aexps: String,
    pub bexps: String,
    pub point: u64,
    pub verdict: String,
    pub np_slopes: String,
    pub hp_slopes: String,
}

impl From<&FrobeniusReport> for SweepRow {
    fn from(r: &FrobeniusReport) -> Self {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        Self {
            p: r.params.p,
            s: r.params.s,
            n: r.params.n(),
            m: r.params.m(),
            aexps: join(&r.params.a_exps),
            bexps: join(&r.params.b_exps),
            point: r.point,
            verdict: r.verdict.to_string(),
            np_slopes: r
                .newton_polygon
                .as_ref()
                .map(|p| p.slope_strings().join(" "))
                .unwrap_or_default(),
            hp_slopes: r.hodge_polygon.slope_strings().join(" "),
        }
    }
}

/// Static SVG with the given polygons overlaid, vertices marked and each
/// segment labelled with its slope.
pub fn polygons_svg(title: &str, polygons: &[(&str, &Polygon)]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const PAD: f64 = 48.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let as_f = |x: &crate::Rational| {
        use num_traits::ToPrimitive;
        x.to_f64().unwrap_or(0.0)
    };
    let max_x = polygons.iter().map(|(_, p)| p.len()).max().unwrap_or(1).max(1) as f64;
    let max_y = polygons
        .iter()
        .flat_map(|(_, p)| p.heights())
        .map(|h| as_f(&h))
        .fold(1.0f64, f64::max);
    let sx = |x: f64| PAD + x / max_x * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - y / max_y * (H - 2.0 * PAD);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{PAD}" y="24">{}</text>"#, escape(title));
    let _ = writeln!(
        out,
        r#"<path d="M{:.1},{:.1} L{:.1},{:.1} M{:.1},{:.1} L{:.1},{:.1}" stroke="gray" fill="none"/>"#,
        sx(0.0),
        sy(0.0),
        sx(max_x),
        sy(0.0),
        sx(0.0),
        sy(0.0),
        sx(0.0),
        sy(max_y)
    );
    for k in 0..=max_x as usize {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{k}</text>"#,
            sx(k as f64),
            sy(0.0) + 16.0
        );
    }
    for (i, (name, poly)) in polygons.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let verts = poly.vertices();
        let pts: Vec<String> = verts
            .iter()
            .map(|(k, h)| format!("{:.1},{:.1}", sx(*k as f64), sy(as_f(h))))
            .collect();
        let dash = if i == 0 { "" } else { r#" stroke-dasharray="6 4""# };
        let _ = writeln!(
            out,
            r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"{dash}/>"#,
            pts.join(" ")
        );
        for (k, h) in &verts {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                sx(*k as f64),
                sy(as_f(h))
            );
        }
        for w in verts.windows(2) {
            let slope = (&w[1].1 - &w[0].1) / crate::Rational::from_integer((w[1].0 - w[0].0).into());
            let mx = (w[0].0 + w[1].0) as f64 / 2.0;
            let my = (as_f(&w[0].1) + as_f(&w[1].1)) / 2.0;
            let offset = if i == 0 { -8.0 } else { 16.0 };
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" fill="{color}" text-anchor="middle">{slope}</text>"#,
                sx(mx),
                sy(my) + offset,
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
            W - PAD - 120.0,
            PAD + 16.0 * i as f64,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
