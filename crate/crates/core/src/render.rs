//! JSON, CSV and SVG forms of an exported covering. CSV needs the `cli`
//! feature.
//!
//! JSON and CSV carry exact decimal strings for the dyadic centers and read
//! back to the same record. SVG maps the viewport rectangle onto a
//! 1024x1024 canvas with the y axis pointing up, one square per ball.

use std::fmt::Write as _;

use crate::dyadic::Dyadic;
use crate::tbound::CoveringRecord;

pub const CANVAS: u32 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}` (json, csv, svg)")),
        }
    }
}

/// `[x0, x1] x [y0, y1]` with `x0 < x1` and `y0 < y1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Viewport {
    pub x0: Dyadic,
    pub y0: Dyadic,
    pub x1: Dyadic,
    pub y1: Dyadic,
}

impl Default for Viewport {
    fn default() -> Self {
        let a = Dyadic::new(5, -2);
        Viewport {
            x0: -&a,
            y0: -&a,
            x1: a.clone(),
            y1: a,
        }
    }
}

impl std::str::FromStr for Viewport {
    type Err = String;

    /// `x0,y0,x1,y1` as dyadic literals.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(format!("viewport needs four numbers x0,y0,x1,y1, got `{s}`"));
        }
        let v = parts
            .iter()
            .map(|p| p.parse::<Dyadic>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let [x0, y0, x1, y1]: [Dyadic; 4] = v.try_into().expect("four parts");
        if x0 >= x1 || y0 >= y1 {
            return Err(format!("viewport `{s}` is empty"));
        }
        Ok(Viewport { x0, y0, x1, y1 })
    }
}

pub fn to_json(rec: &CoveringRecord) -> String {
    let mut s = serde_json::to_string_pretty(rec).expect("plain data");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<CoveringRecord, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

/// One row per ball: `level,radius_exponent,c_1,...,c_m`.
#[cfg(feature = "cli")]
pub fn to_csv(rec: &CoveringRecord) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for c in &rec.centers {
        let mut row = vec![rec.level.to_string(), rec.radius_exponent.to_string()];
        row.extend(c.iter().map(Dyadic::to_decimal_string));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

/// Reads rows back. An empty file gives an empty record of dimension 0,
/// since the rows are the only place the dimension shows up.
#[cfg(feature = "cli")]
pub fn from_csv(text: &str) -> Result<CoveringRecord, String> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(text.as_bytes());
    let mut rec = CoveringRecord {
        level: 0,
        radius_exponent: 0,
        centers: Vec::new(),
        dimension: 0,
    };
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        if row.len() < 3 {
            return Err(format!("row {i}: expected level, radius exponent and coordinates"));
        }
        let level: u32 = row[0].parse().map_err(|_| format!("row {i}: bad level `{}`", &row[0]))?;
        let rexp: i64 = row[1].parse().map_err(|_| format!("row {i}: bad radius exponent `{}`", &row[1]))?;
        let center = row
            .iter()
            .skip(2)
            .map(|c| c.parse::<Dyadic>().map_err(|e| format!("row {i}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if i == 0 {
            rec.level = level;
            rec.radius_exponent = rexp;
            rec.dimension = center.len();
        } else if level != rec.level || rexp != rec.radius_exponent {
            return Err(format!("row {i}: level differs from the first row"));
        }
        rec.centers.push(center);
    }
    Ok(rec)
}

fn px(v: f64) -> String {
    // fixed decimals keep the text identical across runs and platforms
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// A square of side `2^(1-level)` per center. Requires dimension 2.
pub fn to_svg(rec: &CoveringRecord, view: &Viewport) -> String {
    let side = CANVAS as f64;
    let sx = side / (&view.x1 - &view.x0).to_f64();
    let sy = side / (&view.y1 - &view.y0).to_f64();
    let r = Dyadic::pow2(rec.radius_exponent);
    let w = (&r + &r).to_f64();
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}" style="background:#fff">"#
    )
    .unwrap();
    writeln!(
        out,
        "<desc>level {} radius 2^{} balls {} viewport {},{},{},{}</desc>",
        rec.level,
        rec.radius_exponent,
        rec.centers.len(),
        view.x0.to_decimal_string(),
        view.y0.to_decimal_string(),
        view.x1.to_decimal_string(),
        view.y1.to_decimal_string()
    )
    .unwrap();
    writeln!(out, r##"<g fill="#4a6fa5" fill-opacity="0.35" stroke="#1d3557" stroke-width="0.5">"##).unwrap();
    for c in &rec.centers {
        let left = &(&c[0] - &r) - &view.x0;
        let top = &view.y1 - &(&c[1] + &r);
        writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
            px(left.to_f64() * sx),
            px(top.to_f64() * sy),
            px(w * sx),
            px(w * sy)
        )
        .unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}
