//! Lattice atlas: every point of a window with its flags, multiplicity and
//! kernel families, as CSV and as a self-contained SVG.

use std::fmt::Write as _;
use std::io::{Read, Write};

use htype_sbo::kernel_families::classify_sbo_space;
use htype_sbo::pair_config::{lattice_flags, multiplicity, PairConfig};
use serde::{Deserialize, Serialize};

use crate::request::{show_q, Window};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasCell {
    pub lambda: String,
    pub nu: String,
    pub in_slash: bool,
    pub in_backslash: bool,
    pub in_x: bool,
    pub in_l: bool,
    pub in_s1: bool,
    pub in_s2: bool,
    pub in_s3: bool,
    pub k: Option<i64>,
    pub l: Option<i64>,
    pub multiplicity: u32,
    /// `+`-joined family labels, e.g. `C+Harmonic(2)`.
    pub families: String,
    pub class: String,
}

/// Coarse colouring class.  "sporadic" means the multiplicity exceeds the
/// generic value (2 on `L`, 1 elsewhere).
fn class_of(c: &AtlasCell) -> &'static str {
    let generic = if c.in_l { 2 } else { 1 };
    if c.multiplicity > generic {
        "sporadic"
    } else if c.in_l {
        "L"
    } else if c.in_x {
        "X"
    } else if c.in_slash {
        "slash"
    } else if c.in_backslash {
        "backslash"
    } else {
        "generic"
    }
}

pub fn build(cfg: &PairConfig, win: &Window) -> Result<Vec<AtlasCell>, CliError> {
    win.points()
        .into_iter()
        .map(|pt| {
            let f = lattice_flags(cfg, &pt);
            let desc = classify_sbo_space(cfg, &pt)?;
            let mut c = AtlasCell {
                lambda: show_q(&pt.lambda),
                nu: show_q(&pt.nu),
                in_slash: f.in_slash_set,
                in_backslash: f.in_backslash_set,
                in_x: f.in_x,
                in_l: f.in_l,
                in_s1: f.in_s1,
                in_s2: f.in_s2,
                in_s3: f.in_s3,
                k: f.k,
                l: f.l,
                multiplicity: multiplicity(cfg, &pt)?,
                families: desc.labels().join("+"),
                class: String::new(),
            };
            c.class = class_of(&c).into();
            Ok(c)
        })
        .collect()
}

/// Header is written even for an empty window.
pub fn write_csv<W: Write>(cells: &[AtlasCell], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let io = |e: csv::Error| CliError::usage(format!("csv: {e}"));
    w.write_record([
        "lambda", "nu", "in_slash", "in_backslash", "in_x", "in_l", "in_s1", "in_s2", "in_s3", "k", "l",
        "multiplicity", "families", "class",
    ])
    .map_err(io)?;
    for c in cells {
        w.serialize(c).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::usage(format!("csv: {e}")))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<AtlasCell>, CliError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::usage(format!("csv: {e}")))
}

const CELL: usize = 28;
const MARGIN: usize = 48;
const LEGEND_H: usize = 24;

const CLASSES: [(&str, &str); 6] = [
    ("generic", "#f4f4f4"),
    ("slash", "#9ecae1"),
    ("backslash", "#fdd0a2"),
    ("X", "#a1d99b"),
    ("L", "#bcbddc"),
    ("sporadic", "#fb6a4a"),
];

fn colour(class: &str) -> &'static str {
    CLASSES.iter().find(|(c, _)| *c == class).map_or("#ffffff", |(_, col)| col)
}

fn escape(s: &str) -> String {
    let mut o = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => o.push_str("&amp;"),
            '<' => o.push_str("&lt;"),
            '>' => o.push_str("&gt;"),
            '"' => o.push_str("&quot;"),
            '\'' => o.push_str("&apos;"),
            c => o.push(c),
        }
    }
    o
}

/// λ runs left to right, ν bottom to top.  Output depends only on the cells,
/// so equal inputs give byte-identical files.
pub fn svg(cfg: &PairConfig, win: &Window, cells: &[AtlasCell]) -> String {
    let ls = win.lambdas();
    let ns = win.nus();
    let (cols, rows) = (ls.len(), ns.len());
    let width = (2 * MARGIN + cols * CELL).max(16 + CLASSES.len() * 80);
    let height = 2 * MARGIN + rows * CELL + LEGEND_H;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(&format!("lattice atlas {}", cfg.label())));
    for (idx, c) in cells.iter().enumerate() {
        let (col, row) = (idx % cols.max(1), idx / cols.max(1));
        let x = MARGIN + col * CELL;
        let y = MARGIN + (rows - 1 - row) * CELL;
        let payload = serde_json::to_string(c).unwrap_or_default();
        let _ = writeln!(
            s,
            r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#888" stroke-width="0.5"><title>{}</title></rect>"##,
            colour(&c.class),
            escape(&payload)
        );
        if c.multiplicity >= 3 {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                x + CELL / 2,
                y + CELL / 2 + 4,
                c.multiplicity
            );
        }
    }
    // axis ticks at the ends
    if cols > 0 && rows > 0 {
        let by = MARGIN + rows * CELL + 12;
        let _ = writeln!(s, r#"<text x="{}" y="{by}" text-anchor="middle">{}</text>"#, MARGIN + CELL / 2, escape(&show_q(&ls[0])));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{by}" text-anchor="middle">{}</text>"#,
            MARGIN + (cols - 1) * CELL + CELL / 2,
            escape(&show_q(&ls[cols - 1]))
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 4, MARGIN + rows * CELL - CELL / 2 + 4, escape(&show_q(&ns[0])));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 4, MARGIN + CELL / 2 + 4, escape(&show_q(&ns[rows - 1])));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">λ</text>"#, MARGIN + cols * CELL / 2, by);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">ν</text>"#, MARGIN / 3, MARGIN + rows * CELL / 2);
    }
    let ly = height - LEGEND_H;
    for (i, (class, col)) in CLASSES.iter().enumerate() {
        let x = 8 + i * 80;
        let _ = writeln!(s, r##"<rect x="{x}" y="{ly}" width="12" height="12" fill="{col}" stroke="#888" stroke-width="0.5"/>"##);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x + 16, ly + 10, escape(class));
    }
    s.push_str("</svg>\n");
    s
}
