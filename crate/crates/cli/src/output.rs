use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nnls_core::Complex64;
use serde_json::{json, Map, Value};

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    C(Complex64),
    I(i64),
    S(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}
impl From<Complex64> for Cell {
    fn from(v: Complex64) -> Self {
        Cell::C(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::S(v.to_string())
    }
}

/// Column kinds are fixed per table so complex columns always expand to the
/// same pair in CSV, even on rows where the value is missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Real,
    Complex,
    Text,
}

/// How to plot a table.
#[derive(Debug, Clone)]
pub enum Plot {
    /// Lines of the given CSV columns against `x`.
    Lines { x: String, ys: Vec<String>, title: String },
    /// Sector rays `x = 4 xi t` from `lo`/`hi` columns.
    Sectors { title: String },
}

#[derive(Debug, Clone)]
pub struct Table {
    pub stem: String,
    pub columns: Vec<(String, Kind)>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Map<String, Value>,
    pub plot: Option<Plot>,
}

fn num(v: f64) -> String {
    // shortest round-trip form, switching to exponent notation for tiny or huge values
    format!("{v:?}")
}

fn json_num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

pub fn json_c(z: Complex64) -> Value {
    json!([json_num(z.re), json_num(z.im)])
}

impl Table {
    pub fn new(stem: &str, columns: &[(&str, Kind)]) -> Self {
        Table {
            stem: stem.to_string(),
            columns: columns.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
            rows: Vec::new(),
            meta: Map::new(),
            plot: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch in {}", self.stem);
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, v: Value) {
        self.meta.insert(key.to_string(), v);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = Vec::new();
        for (name, kind) in &self.columns {
            match kind {
                Kind::Complex => {
                    header.push(format!("re_{name}"));
                    header.push(format!("im_{name}"));
                }
                _ => header.push(name.clone()),
            }
        }
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let mut rec = Vec::with_capacity(header.len());
            for ((_, kind), cell) in self.columns.iter().zip(row) {
                match (kind, cell) {
                    (Kind::Complex, Cell::C(z)) => {
                        rec.push(num(z.re));
                        rec.push(num(z.im));
                    }
                    (Kind::Complex, _) => {
                        rec.push(String::new());
                        rec.push(String::new());
                    }
                    (_, Cell::F(v)) => rec.push(num(*v)),
                    (_, Cell::I(v)) => rec.push(v.to_string()),
                    (_, Cell::S(s)) => rec.push(s.clone()),
                    (_, Cell::C(z)) => rec.push(format!("{}{:+}i", num(z.re), z.im)),
                    (_, Cell::Empty) => rec.push(String::new()),
                }
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn header_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), json!(1));
        m.insert("table".into(), json!(self.stem));
        m.insert("rows".into(), json!(self.rows.len()));
        for (k, v) in &self.meta {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for ((name, _), cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::F(v) => json_num(*v),
                        Cell::C(z) => json_c(*z),
                        Cell::I(i) => json!(i),
                        Cell::S(s) => json!(s),
                        Cell::Empty => Value::Null,
                    };
                    m.insert(name.clone(), v);
                }
                Value::Object(m)
            })
            .collect();
        let mut h = self.header_json();
        h.as_object_mut().expect("object").insert("data".into(), Value::Array(rows));
        h
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

/// Writes every table in the requested format; returns the paths written.
pub fn emit(tables: &[Table], out: &Path, format: Format) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    for t in tables {
        match format {
            Format::Json => {
                let p = out.join(format!("{}.json", t.stem));
                write_atomic(&p, &pretty(&t.to_json()))?;
                written.push(p);
            }
            Format::Csv | Format::Svg => {
                let csv_text = t.to_csv();
                let p = out.join(format!("{}.csv", t.stem));
                write_atomic(&p, csv_text.as_bytes())?;
                written.push(p);
                let h = out.join(format!("{}.header.json", t.stem));
                write_atomic(&h, &pretty(&t.header_json()))?;
                written.push(h);
                if format == Format::Svg {
                    if let Some(plot) = &t.plot {
                        let p = out.join(format!("{}.svg", t.stem));
                        write_atomic(&p, svg_from_csv(&csv_text, plot).as_bytes())?;
                        written.push(p);
                    }
                }
            }
        }
    }
    Ok(written)
}

fn read_columns(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = r.headers().map(|h| h.iter().map(str::to_string).collect()).unwrap_or_default();
    let rows = r.records().filter_map(|rec| rec.ok()).map(|rec| rec.iter().map(str::to_string).collect()).collect();
    (headers, rows)
}

/// Column value; a name `abs_foo` with no such column means `|re_foo + i im_foo|`.
fn column(headers: &[String], rows: &[Vec<String>], name: &str) -> Vec<Option<f64>> {
    let idx = |n: &str| headers.iter().position(|h| h == n);
    let parse = |row: &Vec<String>, i: usize| row.get(i).and_then(|s| s.parse::<f64>().ok());
    if let Some(i) = idx(name) {
        return rows.iter().map(|r| parse(r, i)).collect();
    }
    if let Some(base) = name.strip_prefix("abs_") {
        if let (Some(i), Some(j)) = (idx(&format!("re_{base}")), idx(&format!("im_{base}"))) {
            return rows.iter().map(|r| Some(parse(r, i)?.hypot(parse(r, j)?))).collect();
        }
    }
    vec![None; rows.len()]
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Static plot built only from the CSV text.
pub fn svg_from_csv(csv_text: &str, plot: &Plot) -> String {
    let (headers, rows) = read_columns(csv_text);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    match plot {
        Plot::Lines { x, ys, title } => {
            let xs = column(&headers, &rows, x);
            let series: Vec<Vec<Option<f64>>> = ys.iter().map(|y| column(&headers, &rows, y)).collect();
            let fin = |v: &Option<f64>| v.filter(|f| f.is_finite());
            let xr = range(xs.iter().filter_map(fin));
            let yr = range(series.iter().flatten().filter_map(fin));
            let _ = writeln!(s, r#"<text x="{PAD}" y="24" font-family="sans-serif" font-size="14">{}</text>"#, escape(title));
            axes(&mut s, xr, yr, x);
            for (k, (name, ys)) in ys.iter().zip(&series).enumerate() {
                let color = COLORS[k % COLORS.len()];
                let mut path = String::new();
                let mut pen = false;
                for (xv, yv) in xs.iter().zip(ys) {
                    match (fin(xv), fin(yv)) {
                        (Some(a), Some(b)) => {
                            let (px, py) = (sx(a, xr), sy(b, yr));
                            let _ = write!(path, "{}{px:.2},{py:.2} ", if pen { "L" } else { "M" });
                            pen = true;
                        }
                        _ => pen = false,
                    }
                }
                let _ = writeln!(s, r#"<path d="{path}" fill="none" stroke="{color}" stroke-width="1.2"/>"#);
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
                    W - PAD - 90.0,
                    PAD + 14.0 * k as f64,
                    escape(name)
                );
            }
        }
        Plot::Sectors { title } => {
            // rays x = 4 xi t in the (x, t) half-plane, t in [0, 1]
            let lo = column(&headers, &rows, "lo");
            let hi = column(&headers, &rows, "hi");
            let ki = headers.iter().position(|h| h == "kind");
            let mut rays: Vec<f64> = lo.iter().chain(&hi).filter_map(|v| v.filter(|f| f.is_finite())).collect();
            rays.sort_by(f64::total_cmp);
            rays.dedup();
            let span = rays.iter().fold(0.5f64, |m, r| m.max(r.abs())) * 4.0 * 1.3;
            let xr = (-span, span);
            let yr = (0.0, 1.0);
            let _ = writeln!(s, r#"<text x="{PAD}" y="24" font-family="sans-serif" font-size="14">{}</text>"#, escape(title));
            axes(&mut s, xr, yr, "x (t = 1)");
            for (i, row) in rows.iter().enumerate() {
                let (a, b) = (lo[i].unwrap_or(f64::NEG_INFINITY), hi[i].unwrap_or(f64::INFINITY));
                let a = if a.is_finite() { 4.0 * a } else { xr.0 };
                let b = if b.is_finite() { 4.0 * b } else { xr.1 };
                let kind = ki.and_then(|k| row.get(k)).map(String::as_str).unwrap_or("");
                let fill = if kind == "decay" { "#eeeeee" } else { "#cfe2f3" };
                let (ox, oy) = (sx(0.0, xr), sy(0.0, yr));
                let _ = writeln!(
                    s,
                    r##"<polygon points="{ox:.2},{oy:.2} {:.2},{:.2} {:.2},{:.2}" fill="{fill}" stroke="#555" stroke-width="0.6"/>"##,
                    sx(a.max(xr.0), xr),
                    sy(1.0, yr),
                    sx(b.min(xr.1), xr),
                    sy(1.0, yr)
                );
                let mid = 0.5 * (a.max(xr.0) + b.min(xr.1));
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="9" text-anchor="middle">{}</text>"#,
                    sx(mid, xr),
                    sy(0.9, yr) + 12.0 * (i % 2) as f64,
                    escape(kind)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

fn range(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in it {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn sx(v: f64, r: (f64, f64)) -> f64 {
    PAD + (v - r.0) / (r.1 - r.0) * (W - 2.0 * PAD)
}

fn sy(v: f64, r: (f64, f64)) -> f64 {
    H - PAD - (v - r.0) / (r.1 - r.0) * (H - 2.0 * PAD)
}

fn axes(s: &mut String, xr: (f64, f64), yr: (f64, f64), xlabel: &str) {
    let (x0, x1, y0, y1) = (PAD, W - PAD, H - PAD, PAD);
    let _ = writeln!(s, r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#);
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{v:.4}</text>"#);
    };
    label(s, x0, y0 + 14.0, "start", xr.0);
    label(s, x1, y0 + 14.0, "end", xr.1);
    label(s, x0 - 4.0, y0, "end", yr.0);
    label(s, x0 - 4.0, y1 + 4.0, "end", yr.1);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
        0.5 * (x0 + x1),
        y0 + 30.0,
        escape(xlabel)
    );
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
