//! Object maps, individual maps and biplots as static SVG.
//!
//! Only the first two dimensions are drawn. For column-doubled analyses each
//! object is drawn as a segment from its `−` point to its `+` point with one
//! tick per scale value and a marker where the origin falls on the segment.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::data::write_atomic;
use crate::error::{Error, Result};
use crate::variants::{estimate_mean_ratings, CoordinateView, PointTag, Role, Variant, VariantResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    Standard,
    Principal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotPoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub tag: PointTag,
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    pub name: String,
    pub role: Role,
    pub scaling: Scaling,
    pub points: Vec<PlotPoint>,
}

/// Segment joining the reversed (`minus`) and original (`plus`) point of one object.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairAxis {
    pub label: String,
    pub minus: [f64; 2],
    pub plus: [f64; 2],
    /// Rating values `1..=q`, from `minus` to `plus`.
    pub ticks: Vec<[f64; 2]>,
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanMarker {
    pub label: String,
    pub position: [f64; 2],
    /// Fraction of the way from `minus` to `plus`.
    pub t: f64,
    /// Rating value read off the tick scale.
    pub rating: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiplotSpec {
    pub title: String,
    pub point_sets: Vec<PointSet>,
    pub axes: Vec<PairAxis>,
    pub mean_markers: Vec<MeanMarker>,
    pub q: u32,
    pub width: f64,
    pub height: f64,
    pub show_origin: bool,
}

impl BiplotSpec {
    pub fn point_count(&self) -> usize {
        self.point_sets.iter().map(|s| s.points.len()).sum()
    }

    fn all_xy(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.point_sets
            .iter()
            .flat_map(|s| s.points.iter().map(|p| [p.x, p.y]))
            .chain(self.axes.iter().flat_map(|a| [a.minus, a.plus]))
            .chain(self.show_origin.then_some([0.0, 0.0]))
    }
}

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 48.0;
const TICK_HALF: f64 = 4.0;
const LABEL_OFFSET: (f64, f64) = (6.0, -6.0);

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf",
];

fn need_two(res: &VariantResult) -> Result<()> {
    if res.config.k < 2 {
        Err(Error::NeedTwoDimensions)
    } else {
        Ok(())
    }
}

fn points_of(view: &CoordinateView, scaling: Scaling, keep: impl Fn(PointTag) -> bool) -> Vec<PlotPoint> {
    let m = match scaling {
        Scaling::Standard => &view.standard,
        Scaling::Principal => &view.principal,
    };
    let doubled = view
        .tags
        .iter()
        .any(|t| matches!(t, PointTag::Plus | PointTag::Minus));
    let half = view.len() / 2;
    (0..view.len())
        .filter(|&i| keep(view.tags[i]))
        .map(|i| PlotPoint {
            label: view.labels[i].clone(),
            x: m[(i, 0)],
            y: m[(i, 1)],
            tag: view.tags[i],
            color: if doubled { i % half } else { i },
        })
        .collect()
}

fn object_sets(res: &VariantResult, scaling: Scaling) -> Vec<PointSet> {
    let view = &res.objects_view;
    let mut sets = vec![PointSet {
        name: "objects".into(),
        role: Role::Objects,
        scaling,
        points: points_of(view, scaling, |t| t != PointTag::Boundary),
    }];
    if view.tags.contains(&PointTag::Boundary) {
        sets.push(PointSet {
            name: "boundaries".into(),
            role: Role::Objects,
            scaling,
            points: points_of(view, scaling, |t| t == PointTag::Boundary),
        });
    }
    sets
}

fn individual_set(res: &VariantResult, scaling: Scaling) -> PointSet {
    PointSet {
        name: "individuals".into(),
        role: Role::Individuals,
        scaling,
        points: points_of(&res.individuals_view, scaling, |_| true),
    }
}

/// Doubled-pair axes and origin markers for a column-doubled result.
fn pair_axes(res: &VariantResult, scaling: Scaling) -> Result<(Vec<PairAxis>, Vec<MeanMarker>)> {
    if res.config.variant != Variant::Car {
        return Ok((Vec::new(), Vec::new()));
    }
    let view = &res.objects_view;
    let m = match scaling {
        Scaling::Standard => &view.standard,
        Scaling::Principal => &view.principal,
    };
    let p = res.ratings.p();
    let q = res.ratings.q();
    let means = estimate_mean_ratings(res)?;
    let mut axes = Vec::with_capacity(p);
    let mut markers = Vec::with_capacity(p);
    for (j, mean) in means.into_iter().enumerate() {
        let plus = [m[(j, 0)], m[(j, 1)]];
        let minus = [m[(j + p, 0)], m[(j + p, 1)]];
        let along = |t: f64| {
            [
                minus[0] + t * (plus[0] - minus[0]),
                minus[1] + t * (plus[1] - minus[1]),
            ]
        };
        let ticks = (1..=q)
            .map(|v| along(f64::from(v - 1) / f64::from(q - 1)))
            .collect();
        markers.push(MeanMarker {
            label: mean.label.clone(),
            position: along(mean.t),
            t: mean.t,
            rating: 1.0 + f64::from(q - 1) * mean.t,
        });
        axes.push(PairAxis {
            label: mean.label,
            minus,
            plus,
            ticks,
            color: j,
        });
    }
    Ok((axes, markers))
}

fn spec(
    res: &VariantResult,
    title: String,
    point_sets: Vec<PointSet>,
    axes: (Vec<PairAxis>, Vec<MeanMarker>),
) -> BiplotSpec {
    BiplotSpec {
        title,
        point_sets,
        axes: axes.0,
        mean_markers: axes.1,
        q: res.ratings.q(),
        width: CANVAS,
        height: CANVAS,
        show_origin: true,
    }
}

pub fn build_object_map(res: &VariantResult, scaling: Scaling) -> Result<BiplotSpec> {
    need_two(res)?;
    let axes = pair_axes(res, scaling)?;
    let title = format!("{} objects ({})", res.config.variant, scaling_name(scaling));
    Ok(spec(res, title, object_sets(res, scaling), axes))
}

pub fn build_individual_map(res: &VariantResult, scaling: Scaling) -> Result<BiplotSpec> {
    need_two(res)?;
    let title = format!("{} individuals ({})", res.config.variant, scaling_name(scaling));
    Ok(spec(
        res,
        title,
        vec![individual_set(res, scaling)],
        (Vec::new(), Vec::new()),
    ))
}

/// Objects in standard and individuals in principal coordinates.
pub fn build_biplot(res: &VariantResult) -> Result<BiplotSpec> {
    need_two(res)?;
    let mut sets = object_sets(res, Scaling::Standard);
    sets.push(individual_set(res, Scaling::Principal));
    let axes = pair_axes(res, Scaling::Standard)?;
    Ok(spec(res, format!("{} biplot", res.config.variant), sets, axes))
}

fn scaling_name(s: Scaling) -> &'static str {
    match s {
        Scaling::Standard => "standard",
        Scaling::Principal => "principal",
    }
}

/// Maps data coordinates to SVG pixels with one scale factor for both axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub scale: f64,
    center: [f64; 2],
    pixel_center: [f64; 2],
}

impl Viewport {
    pub fn fit(spec: &BiplotSpec) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for xy in spec.all_xy() {
            for d in 0..2 {
                lo[d] = lo[d].min(xy[d]);
                hi[d] = hi[d].max(xy[d]);
            }
        }
        if !lo[0].is_finite() {
            lo = [-1.0, -1.0];
            hi = [1.0, 1.0];
        }
        let span = |d: usize| {
            let s = hi[d] - lo[d];
            if s > 0.0 {
                s * 1.1
            } else {
                1.0
            }
        };
        let scale = ((spec.width - 2.0 * MARGIN) / span(0)).min((spec.height - 2.0 * MARGIN) / span(1));
        Viewport {
            scale,
            center: [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0],
            pixel_center: [spec.width / 2.0, spec.height / 2.0],
        }
    }

    pub fn to_pixel(&self, xy: [f64; 2]) -> [f64; 2] {
        [
            self.pixel_center[0] + (xy[0] - self.center[0]) * self.scale,
            self.pixel_center[1] - (xy[1] - self.center[1]) * self.scale,
        ]
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the plot as an SVG 1.1 document.
pub fn render_svg(spec: &BiplotSpec) -> String {
    let vp = Viewport::fit(spec);
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(spec.width),
        num(spec.height),
        num(spec.width),
        num(spec.height)
    );
    let _ = writeln!(w, "<title>{}</title>", escape(&spec.title));
    let _ = writeln!(
        w,
        r##"<rect class="background" x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##,
        num(spec.width),
        num(spec.height)
    );

    if spec.show_origin {
        let o = vp.to_pixel([0.0, 0.0]);
        let _ = writeln!(
            w,
            r##"<line class="origin" x1="0.000000" y1="{y}" x2="{}" y2="{y}" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##,
            num(spec.width),
            y = num(o[1])
        );
        let _ = writeln!(
            w,
            r##"<line class="origin" x1="{x}" y1="0.000000" x2="{x}" y2="{}" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##,
            num(spec.height),
            x = num(o[0])
        );
    }

    for axis in &spec.axes {
        let a = vp.to_pixel(axis.minus);
        let b = vp.to_pixel(axis.plus);
        let _ = writeln!(
            w,
            r#"<polyline class="axis" points="{},{} {},{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            num(a[0]),
            num(a[1]),
            num(b[0]),
            num(b[1]),
            PALETTE[axis.color % PALETTE.len()]
        );
    }

    for axis in &spec.axes {
        let a = vp.to_pixel(axis.minus);
        let b = vp.to_pixel(axis.plus);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = (dx * dx + dy * dy).sqrt();
        let (nx, ny) = if len > 0.0 {
            (-dy / len, dx / len)
        } else {
            (0.0, 1.0)
        };
        for (v, tick) in axis.ticks.iter().enumerate() {
            let t = vp.to_pixel(*tick);
            let _ = writeln!(
                w,
                r#"<line class="tick" data-rating="{}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}"/>"#,
                v + 1,
                num(t[0] - nx * TICK_HALF),
                num(t[1] - ny * TICK_HALF),
                num(t[0] + nx * TICK_HALF),
                num(t[1] + ny * TICK_HALF),
                PALETTE[axis.color % PALETTE.len()]
            );
        }
    }

    for marker in &spec.mean_markers {
        let c = vp.to_pixel(marker.position);
        let r = 4.0;
        let _ = writeln!(
            w,
            r##"<polygon class="mean" data-rating="{}" points="{},{} {},{} {},{} {},{}" fill="#000000"/>"##,
            num(marker.rating),
            num(c[0]),
            num(c[1] - r),
            num(c[0] + r),
            num(c[1]),
            num(c[0]),
            num(c[1] + r),
            num(c[0] - r),
            num(c[1])
        );
    }

    for set in &spec.point_sets {
        for p in &set.points {
            let c = vp.to_pixel([p.x, p.y]);
            let color = match (set.role, p.tag) {
                (Role::Individuals, _) => "#444444",
                (_, PointTag::Boundary) => "#999999",
                _ => PALETTE[p.color % PALETTE.len()],
            };
            let fill = if p.tag == PointTag::Minus { "none" } else { color };
            let _ = writeln!(
                w,
                r#"<circle class="{}" cx="{}" cy="{}" r="{}" fill="{}" stroke="{}"/>"#,
                set.name,
                num(c[0]),
                num(c[1]),
                if set.role == Role::Individuals { "3" } else { "4" },
                fill,
                color
            );
        }
    }

    for set in &spec.point_sets {
        for p in &set.points {
            let c = vp.to_pixel([p.x, p.y]);
            let _ = writeln!(
                w,
                r##"<text class="{}" x="{}" y="{}" font-family="sans-serif" font-size="11" fill="#222222">{}</text>"##,
                set.name,
                num(c[0] + LABEL_OFFSET.0),
                num(c[1] + LABEL_OFFSET.1),
                escape(&p.label)
            );
        }
    }

    let _ = writeln!(w, "</svg>");
    out
}

pub fn emit_svg(spec: &BiplotSpec, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, render_svg(spec).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::builtin;
    use crate::variants::{run, VariantConfig};

    fn toy_car() -> VariantResult {
        run(&builtin("toy").unwrap(), &VariantConfig::new(Variant::Car)).unwrap()
    }

    #[test]
    fn one_dimension_is_rejected() {
        let res = run(
            &builtin("toy").unwrap(),
            &VariantConfig::new(Variant::Car).with_dims(1),
        )
        .unwrap();
        assert!(matches!(
            build_object_map(&res, Scaling::Standard),
            Err(Error::NeedTwoDimensions)
        ));
        assert!(matches!(build_biplot(&res), Err(Error::NeedTwoDimensions)));
    }

    #[test]
    fn ticks_are_equally_spaced() {
        let spec = build_object_map(&toy_car(), Scaling::Principal).unwrap();
        assert_eq!(spec.axes.len(), 3);
        for axis in &spec.axes {
            assert_eq!(axis.ticks.len(), 5);
            assert_eq!(axis.ticks[0], axis.minus);
            for d in 0..2 {
                assert!((axis.ticks[4][d] - axis.plus[d]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn viewport_has_equal_aspect() {
        let spec = build_biplot(&toy_car()).unwrap();
        let vp = Viewport::fit(&spec);
        let a = vp.to_pixel([0.0, 0.0]);
        let b = vp.to_pixel([1.0, 1.0]);
        assert!(((b[0] - a[0]) - (a[1] - b[1])).abs() < 1e-9);
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
        assert_eq!(num(-0.0000001), "0.000000");
    }
}
