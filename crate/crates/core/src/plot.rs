//! Sampled activation curves and their CSV / SVG renderings.
//!
//! The CSV layout is fixed: a `x,alpha,value,dx,dalpha` header, LF line
//! endings and every number in its shortest round-trip decimal form, so that
//! parsing a row and re-evaluating it reproduces the printed values exactly.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::activation::{self, Activation, ActivationEval, ShapeParam};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "x,alpha,value,dx,dalpha";

pub const DEFAULT_ALPHAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const DEFAULT_X_RANGE: (f64, f64) = (-4.0, 4.0);
/// Odd, so that `x = 0` lies on the default grid.
pub const DEFAULT_SAMPLES: usize = 1001;

pub const SVG_WIDTH: u32 = 800;
pub const SVG_HEIGHT: u32 = 600;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// One `(alpha, x)` sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub x: f64,
    pub alpha: f64,
    pub value: f64,
    pub dx: f64,
    pub dalpha: f64,
}

/// Value and derivatives of a plotted curve. ELU carries its `d/dalpha`,
/// `exp(x) - 1` on the negative side.
pub fn evaluate(activation: Activation, x: f64, alpha: ShapeParam) -> Result<ActivationEval> {
    match activation {
        Activation::Elu => Ok(activation::elu_eval(x, alpha)),
        Activation::Celu => Ok(activation::celu_eval(x, alpha)),
        other => Err(Error::InvalidConfig(format!(
            "curves are only defined for elu and celu, not {other}"
        ))),
    }
}

/// `samples` equally spaced points on `[xmin, xmax]`, both endpoints included.
pub fn linspace(xmin: f64, xmax: f64, samples: usize) -> Result<Vec<f64>> {
    if !(xmin.is_finite() && xmax.is_finite()) || xmin >= xmax {
        return Err(Error::InvalidConfig(format!(
            "need finite xmin < xmax, got [{xmin}, {xmax}]"
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidConfig("need at least 2 samples".into()));
    }
    let last = (samples - 1) as f64;
    let span = xmax - xmin;
    let mut xs: Vec<f64> = (0..samples)
        .map(|i| xmin + span * (i as f64 / last))
        .collect();
    xs[samples - 1] = xmax;
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "grid spacing is below floating-point resolution".into(),
        ));
    }
    Ok(xs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveGrid {
    activation: Activation,
    xs: Vec<f64>,
    alphas: Vec<ShapeParam>,
    /// Grouped by alpha, in `alphas` order; `xs` ascending within a group.
    rows: Vec<CurveRow>,
}

impl CurveGrid {
    pub fn new(
        activation: Activation,
        alphas: &[ShapeParam],
        xmin: f64,
        xmax: f64,
        samples: usize,
    ) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidConfig("need at least one alpha".into()));
        }
        // rejects activations without a curve before doing any work
        evaluate(activation, 0.0, alphas[0])?;
        let xs = linspace(xmin, xmax, samples)?;
        let mut rows = Vec::with_capacity(alphas.len() * xs.len());
        for &alpha in alphas {
            for &x in &xs {
                let ev = evaluate(activation, x, alpha)?;
                rows.push(CurveRow {
                    x,
                    alpha: alpha.get(),
                    value: ev.value,
                    dx: ev.dx,
                    dalpha: ev.dalpha,
                });
            }
        }
        Ok(CurveGrid {
            activation,
            xs,
            alphas: alphas.to_vec(),
            rows,
        })
    }

    /// The default figure: alphas `{0.25, 0.5, 1, 2, 4}` over `[-4, 4]`.
    pub fn figure_default(activation: Activation) -> Result<Self> {
        let alphas = DEFAULT_ALPHAS
            .iter()
            .map(|&a| ShapeParam::new(a))
            .collect::<Result<Vec<_>>>()?;
        let (lo, hi) = DEFAULT_X_RANGE;
        CurveGrid::new(activation, &alphas, lo, hi, DEFAULT_SAMPLES)
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn alphas(&self) -> &[ShapeParam] {
        &self.alphas
    }

    pub fn rows(&self) -> &[CurveRow] {
        &self.rows
    }

    /// Rows of the `index`-th alpha.
    pub fn curve(&self, index: usize) -> &[CurveRow] {
        let n = self.xs.len();
        &self.rows[index * n..(index + 1) * n]
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        let mut line = String::new();
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            line.clear();
            // f64 Display is the shortest string that parses back to the same bits
            let _ = writeln!(line, "{},{},{},{},{}", r.x, r.alpha, r.value, r.dx, r.dalpha);
            w.write_all(line.as_bytes())?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn write_svg(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(self.to_svg_string().as_bytes())?;
        w.flush()
    }

    /// Two stacked panels: the activation on top, its `d/dx` below.
    pub fn to_svg_string(&self) -> String {
        let name = self.activation.name().to_ascii_uppercase();
        let (width, height) = (SVG_WIDTH as f64, SVG_HEIGHT as f64);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">
<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#
        );

        let panels: [(&str, fn(&CurveRow) -> f64, f64); 2] = [
            (&format!("{name}(x, alpha)"), |r| r.value, 0.0),
            (&format!("d/dx {name}(x, alpha)"), |r| r.dx, height / 2.0),
        ];
        for (title, field, top) in panels {
            let area = PlotArea {
                left: 70.0,
                right: width - 130.0,
                top: top + 35.0,
                bottom: top + height / 2.0 - 30.0,
                x_range: (self.xs[0], self.xs[self.xs.len() - 1]),
                y_range: padded_range(self.rows.iter().map(field)),
            };
            area.axes(&mut s, title);
            for (i, alpha) in self.alphas.iter().enumerate() {
                let color = PALETTE[i % PALETTE.len()];
                let points: Vec<String> = self
                    .curve(i)
                    .iter()
                    .filter(|r| field(r).is_finite())
                    .map(|r| {
                        let (px, py) = area.map(r.x, field(r));
                        format!("{px:.2},{py:.2}")
                    })
                    .collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    points.join(" ")
                );
                let ly = area.top + 14.0 + 16.0 * i as f64;
                let _ = writeln!(
                    s,
                    r#"<line x1="{lx1}" y1="{ly}" x2="{lx2}" y2="{ly}" stroke="{color}" stroke-width="2"/>
<text x="{tx}" y="{ty}" font-family="sans-serif" font-size="12">alpha = {alpha}</text>"#,
                    lx1 = area.right + 12.0,
                    lx2 = area.right + 32.0,
                    tx = area.right + 38.0,
                    ty = ly + 4.0,
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    (lo - pad, hi + pad)
}

struct PlotArea {
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl PlotArea {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        let px = self.left + (x - x0) / (x1 - x0) * (self.right - self.left);
        let py = self.bottom - (y - y0) / (y1 - y0) * (self.bottom - self.top);
        (px, py)
    }

    fn axes(&self, s: &mut String, title: &str) {
        let _ = writeln!(
            s,
            r##"<rect x="{l}" y="{t}" width="{w}" height="{h}" fill="none" stroke="#333"/>
<text x="{cx}" y="{ty}" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"##,
            l = self.left,
            t = self.top,
            w = self.right - self.left,
            h = self.bottom - self.top,
            cx = 0.5 * (self.left + self.right),
            ty = self.top - 10.0,
        );
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        if x0 <= 0.0 && 0.0 <= x1 {
            let (px, _) = self.map(0.0, y0);
            let _ = writeln!(
                s,
                r##"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="#bbb" stroke-dasharray="4 3"/>"##,
                self.top, self.bottom
            );
        }
        if y0 <= 0.0 && 0.0 <= y1 {
            let (_, py) = self.map(x0, 0.0);
            let _ = writeln!(
                s,
                r##"<line x1="{}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#bbb" stroke-dasharray="4 3"/>"##,
                self.left, self.right
            );
        }
        for (value, anchor_x, anchor_y, anchor) in [
            (x0, self.left, self.bottom + 16.0, "start"),
            (x1, self.right, self.bottom + 16.0, "end"),
        ] {
            let _ = writeln!(
                s,
                r#"<text x="{anchor_x}" y="{anchor_y}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{value}</text>"#
            );
        }
        for (value, y) in [(y0, self.bottom), (y1, self.top + 10.0)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="end">{value:.3}</text>"#,
                self.left - 6.0
            );
        }
    }
}

/// Parses a curve CSV written by [`CurveGrid::write_csv`].
pub fn read_csv(r: impl Read) -> Result<Vec<CurveRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::MalformedCsv(format!(
            "expected header {CSV_HEADER:?}, got {:?}",
            header.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::MalformedCsv(format!("bad field {i} in data row {}", line + 1)))
        };
        rows.push(CurveRow {
            x: field(0)?,
            alpha: field(1)?,
            value: field(2)?,
            dx: field(3)?,
            dalpha: field(4)?,
        });
    }
    Ok(rows)
}

/// Number of rows whose re-evaluation from `(x, alpha)` differs in any bit
/// from the parsed `value`, `dx` or `dalpha`.
pub fn roundtrip_mismatches(activation: Activation, rows: &[CurveRow]) -> Result<usize> {
    let mut bad = 0;
    for r in rows {
        let ev = evaluate(activation, r.x, ShapeParam::new(r.alpha)?)?;
        let same = ev.value.to_bits() == r.value.to_bits()
            && ev.dx.to_bits() == r.dx.to_bits()
            && ev.dalpha.to_bits() == r.dalpha.to_bits();
        if !same {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Jump of the ELU derivative across `x = 0` read off a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpMeasurement {
    pub alpha: f64,
    /// `x` of the last sample left of zero.
    pub left_x: f64,
    pub measured: f64,
    /// `|alpha - 1|`.
    pub expected: f64,
    /// `alpha * |left_x|`: how far `alpha * exp(left_x)` may sit from `alpha`.
    pub allowance: f64,
}

impl JumpMeasurement {
    pub fn ok(&self) -> bool {
        (self.measured - self.expected).abs() <= self.allowance + 1e-12
    }
}

/// Outcome of the qualitative checks on a pair of default-figure CSVs.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureReport {
    pub elu_jumps: Vec<JumpMeasurement>,
    /// CELU rows with `x < 0` violating `|dx - 1| <= |x| / alpha`.
    pub celu_near_one_violations: usize,
    /// CELU rows with `dx` outside `(0, 1]`.
    pub celu_dx_out_of_range: usize,
}

impl FigureReport {
    pub fn passed(&self) -> bool {
        !self.elu_jumps.is_empty()
            && self.elu_jumps.iter().all(JumpMeasurement::ok)
            && self.celu_near_one_violations == 0
            && self.celu_dx_out_of_range == 0
    }
}

fn group_by_alpha(rows: &[CurveRow]) -> Vec<(f64, Vec<CurveRow>)> {
    let mut groups: Vec<(f64, Vec<CurveRow>)> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|(a, _)| a.to_bits() == r.alpha.to_bits()) {
            Some((_, g)) => g.push(*r),
            None => groups.push((r.alpha, vec![*r])),
        }
    }
    groups
}

/// Measures the derivative jump at zero for `alpha` from ELU curve rows.
pub fn measure_elu_jump(rows: &[CurveRow], alpha: f64) -> Result<JumpMeasurement> {
    let curve: Vec<&CurveRow> = rows
        .iter()
        .filter(|r| r.alpha.to_bits() == alpha.to_bits())
        .collect();
    let left = curve
        .iter()
        .filter(|r| r.x < 0.0)
        .max_by(|a, b| a.x.total_cmp(&b.x))
        .ok_or_else(|| Error::MalformedCsv(format!("no x < 0 samples for alpha {alpha}")))?;
    let right = curve
        .iter()
        .filter(|r| r.x >= 0.0)
        .min_by(|a, b| a.x.total_cmp(&b.x))
        .ok_or_else(|| Error::MalformedCsv(format!("no x >= 0 samples for alpha {alpha}")))?;
    Ok(JumpMeasurement {
        alpha,
        left_x: left.x,
        measured: (left.dx - right.dx).abs(),
        expected: (alpha - 1.0).abs(),
        allowance: alpha * left.x.abs(),
    })
}

/// Checks the qualitative content of the figure from ELU and CELU curve rows:
/// the ELU derivative jumps by `|alpha - 1|` at zero for `jump_alphas`, the
/// CELU derivative approaches one continuously, and stays in `(0, 1]`.
pub fn verify_figure(
    elu_rows: &[CurveRow],
    celu_rows: &[CurveRow],
    jump_alphas: &[f64],
) -> Result<FigureReport> {
    let elu_jumps = jump_alphas
        .iter()
        .map(|&a| measure_elu_jump(elu_rows, a))
        .collect::<Result<Vec<_>>>()?;

    let mut near_one = 0;
    let mut out_of_range = 0;
    for (alpha, curve) in group_by_alpha(celu_rows) {
        for r in curve {
            if r.x < 0.0 && (r.dx - 1.0).abs() > r.x.abs() / alpha {
                near_one += 1;
            }
            if !(r.dx > 0.0 && r.dx <= 1.0) {
                out_of_range += 1;
            }
        }
    }
    Ok(FigureReport {
        elu_jumps,
        celu_near_one_violations: near_one,
        celu_dx_out_of_range: out_of_range,
    })
}
