//! Command-line front end and SVG rendering.
//!
//! Exit codes: 0 on success, 1 on a domain failure (unsatisfied assignment,
//! failed verification, empty search, formula without a comb layout), 2 on
//! bad input or usage.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::caterpillar::{EmbeddedCaterpillar, NodeId};
use crate::formula::{compute_comb_layout, parse_cnf, parse_side_hint, CombLayout, LayoutError};
use crate::oracle::{search, SearchConstraints};
use crate::reduction::{compile, realize, RealizeError, ReductionError, ReductionOutput};
use crate::verifier::{verify, verify_real, Mode, Placement, RealPlacement, DEFAULT_EPS};

/// Roles the reduction assigns to nodes, in rendering order of the legend.
pub const ROLES: [&str; 6] = ["lead_in", "variable", "switch", "connector", "clause", "rigid"];

#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    /// Disk radius in SVG units.
    pub radius: f64,
    pub stroke_width: f64,
    /// Color per role; nodes without a role use `default_color`.
    pub colors: BTreeMap<String, String>,
    pub default_color: String,
    /// Space around the drawing, in SVG units.
    pub margin: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        let palette = ["#6b6b6b", "#2b6cb0", "#d69e2e", "#38a169", "#c53030", "#805ad5"];
        RenderStyle {
            radius: 10.0,
            stroke_width: 1.5,
            colors: ROLES
                .iter()
                .zip(palette)
                .map(|(r, c)| (r.to_string(), c.to_string()))
                .collect(),
            default_color: "#333333".into(),
            margin: 20.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("placement fails verification ({0} violations); use --force to render anyway")]
    UnverifiedPlacement(usize),
    #[error("node {0} has no position")]
    MissingNode(NodeId),
    #[error("invalid style: {0}")]
    Style(String),
}

/// SVG drawing of a verified placement. See [`render_unchecked`].
pub fn render(
    c: &EmbeddedCaterpillar,
    p: &Placement,
    style: &RenderStyle,
    roles: &BTreeMap<NodeId, String>,
) -> Result<String, RenderError> {
    let report = verify(c, p, Mode::Exact);
    if !report.passed() {
        return Err(RenderError::UnverifiedPlacement(report.violations.len()));
    }
    render_unchecked(c, p, style, roles)
}

/// SVG drawing: backbone edges as segments, then one circle per node in
/// node id order. Backbone disks are filled with their role color, leaves
/// are outlined.
pub fn render_unchecked(
    c: &EmbeddedCaterpillar,
    p: &Placement,
    style: &RenderStyle,
    roles: &BTreeMap<NodeId, String>,
) -> Result<String, RenderError> {
    if !(style.radius > 0.0 && style.radius.is_finite()) {
        return Err(RenderError::Style("radius must be positive".into()));
    }
    let mut ids: Vec<&NodeId> = c.node_ids();
    ids.sort();
    let mut pts = BTreeMap::new();
    for id in &ids {
        let q = p.get(id).ok_or_else(|| RenderError::MissingNode((*id).clone()))?;
        let r = q.to_cartesian();
        // Lattice unit = one disk radius; SVG y grows downwards.
        pts.insert(*id, (r.x * style.radius + 0.0, -r.y * style.radius + 0.0));
    }
    let pad = style.radius + style.margin;
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if let Some(&(x, y)) = pts.values().next() {
        (x0, y0, x1, y1) = (x, y, x, y);
    }
    for &(x, y) in pts.values() {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let (vx, vy, w, h) = (x0 - pad, y0 - pad, x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let color = |id: &str| -> &str {
        roles
            .get(id)
            .and_then(|r| style.colors.get(r))
            .unwrap_or(&style.default_color)
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx:.3} {vy:.3} {w:.3} {h:.3}" width="{w:.0}" height="{h:.0}">"#
    );
    let _ = writeln!(out, r#"<rect x="{vx:.3}" y="{vy:.3}" width="{w:.3}" height="{h:.3}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<g stroke="#000000" stroke-width="{:.3}">"##,
        style.stroke_width
    );
    for pair in c.backbone.windows(2) {
        let (a, b) = (pts[&pair[0]], pts[&pair[1]]);
        let _ = writeln!(out, r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#, a.0, a.1, b.0, b.1);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g stroke-width="{:.3}">"#, style.stroke_width);
    for id in &ids {
        let (x, y) = pts[id];
        let col = color(id);
        let fill = if c.is_backbone(id) { col } else { "white" };
        let _ = writeln!(
            out,
            r#"<circle id="{}" cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="{fill}" stroke="{col}"/>"#,
            xml_escape(id),
            style.radius
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Parses `x1=1,x2=0,...`. Every variable from `x1` to `x{num_vars}` must
/// appear exactly once.
pub fn parse_assignment(text: &str, num_vars: usize) -> Result<Vec<bool>, String> {
    let mut values: Vec<Option<bool>> = vec![None; num_vars];
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected name=0|1, got {part:?}"))?;
        let index: usize = name
            .trim()
            .strip_prefix('x')
            .and_then(|d| d.parse().ok())
            .filter(|&i| (1..=num_vars).contains(&i))
            .ok_or_else(|| format!("unknown variable {name:?}"))?;
        let v = match value.trim() {
            "1" => true,
            "0" => false,
            other => return Err(format!("value of {name} must be 0 or 1, got {other:?}")),
        };
        if values[index - 1].replace(v).is_some() {
            return Err(format!("variable {name} assigned twice"));
        }
    }
    let missing: Vec<String> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_none())
        .map(|(i, _)| format!("x{}", i + 1))
        .collect();
    if !missing.is_empty() {
        return Err(format!("missing variables: {}", missing.join(", ")));
    }
    Ok(values.into_iter().map(|v| v.unwrap()).collect())
}

#[derive(Parser, Debug)]
#[command(name = "udcr", version, about = "Planar 3-SAT to weak unit disk contact representations of caterpillars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Tolerant,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the caterpillar of a DIMACS formula.
    Compile {
        cnf: PathBuf,
        /// Side hint `{"sides": {"c1": "above", ...}}` or a full comb layout; computed when absent.
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Output directory.
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Place the caterpillar of a compiled formula for an assignment.
    Realize {
        /// reduction.json, or the directory compile wrote.
        reduction: PathBuf,
        #[arg(long)]
        assign: String,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Check a placement against a caterpillar.
    Verify {
        cat: PathBuf,
        placement: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Write the report here instead of standard output.
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Enumerate lattice placements under constraints.
    Search {
        cat: PathBuf,
        spec: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Draw a placement as SVG.
    Render {
        cat: PathBuf,
        placement: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
        /// Render even if the placement fails verification.
        #[arg(long)]
        force: bool,
    },
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn input(msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: msg.to_string(),
    }
}

fn domain(msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        message: msg.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_reduction(path: &Path) -> Result<ReductionOutput, Failure> {
    let path = if path.is_dir() {
        path.join("reduction.json")
    } else {
        path.to_path_buf()
    };
    ReductionOutput::from_json(&read(&path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// A caterpillar file, or a reduction file (which also supplies roles).
fn load_caterpillar(path: &Path) -> Result<(EmbeddedCaterpillar, BTreeMap<NodeId, String>), Failure> {
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    if value.get("program").is_some() {
        let r = ReductionOutput::from_json(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
        return Ok((r.caterpillar(), r.program.roles()));
    }
    let c = EmbeddedCaterpillar::from_json(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    Ok((c, BTreeMap::new()))
}

enum AnyPlacement {
    Lattice(Placement),
    Real(RealPlacement),
}

fn load_placement(path: &Path) -> Result<AnyPlacement, Failure> {
    let text = read(path)?;
    if let Ok(p) = serde_json::from_str::<Placement>(&text) {
        return Ok(AnyPlacement::Lattice(p));
    }
    serde_json::from_str::<RealPlacement>(&text)
        .map(AnyPlacement::Real)
        .map_err(|e| input(format!("{}: {e}", path.display())))
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run_command(cmd: Command) -> Result<String, Failure> {
    match cmd {
        Command::Compile { cnf, layout, out } => {
            let f = parse_cnf(&read(&cnf)?).map_err(|e| input(format!("{}: {e}", cnf.display())))?;
            let layout = match layout {
                Some(p) => {
                    let text = read(&p)?;
                    match CombLayout::from_json(&text) {
                        Ok(l) => l,
                        Err(full) => {
                            let hint = parse_side_hint(&text, f.num_clauses()).map_err(|e| {
                                input(format!("{}: not a layout ({full}) nor a side hint ({e})", p.display()))
                            })?;
                            compute_comb_layout(&f, Some(&hint)).map_err(|e| match e {
                                LayoutError::NotLayoutable(_) => domain(&e),
                                _ => input(&e),
                            })?
                        }
                    }
                }
                None => compute_comb_layout(&f, None).map_err(domain)?,
            };
            let r = compile(&f, &layout).map_err(|e| match e {
                ReductionError::LayoutMismatch(LayoutError::NotLayoutable(_)) => domain(&e),
                ReductionError::LayoutMismatch(_) => input(&e),
                _ => domain(&e),
            })?;
            std::fs::create_dir_all(&out).map_err(|e| input(format!("{}: {e}", out.display())))?;
            write(&out.join("reduction.json"), &(r.to_json() + "\n"))?;
            write(&out.join("caterpillar.json"), &(r.caterpillar().to_json() + "\n"))?;
            write(&out.join("plan.json"), &json(&r.plan))?;
            write(&out.join("layout.json"), &(r.layout.to_json() + "\n"))?;
            write(&out.join("stats.json"), &json(&r.stats))?;
            Ok(format!(
                "compiled {} variables, {} clauses: {} nodes, backbone {}\n",
                f.num_vars,
                f.num_clauses(),
                r.stats.node_count,
                r.stats.backbone_length
            ))
        }
        Command::Realize { reduction, assign, out } => {
            let r = load_reduction(&reduction)?;
            let a = parse_assignment(&assign, r.formula.num_vars).map_err(input)?;
            let p = realize(&r, &a).map_err(|e| match e {
                RealizeError::Assignment { .. } => input(&e),
                _ => domain(&e),
            })?;
            write(&out, &json(&p))?;
            Ok(format!("placed {} disks\n", p.len()))
        }
        Command::Verify {
            cat,
            placement,
            mode,
            eps,
            out,
        } => {
            let (c, _) = load_caterpillar(&cat)?;
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(input("--eps must be a finite non-negative number"));
            }
            let report = match (load_placement(&placement)?, mode) {
                (AnyPlacement::Lattice(p), ModeArg::Exact) => verify(&c, &p, Mode::Exact),
                (AnyPlacement::Lattice(p), ModeArg::Tolerant) => verify(&c, &p, Mode::Tolerant(eps)),
                (AnyPlacement::Real(p), ModeArg::Tolerant) => verify_real(&c, &p, eps),
                (AnyPlacement::Real(_), ModeArg::Exact) => {
                    return Err(input("exact mode needs integer lattice coordinates"))
                }
            };
            let text = json(&report);
            let summary = format!(
                "{}: {} violations, {} weak contacts\n",
                if report.passed() { "pass" } else { "fail" },
                report.violations.len(),
                report.weak_contacts.len()
            );
            match out {
                Some(o) => write(&o, &text)?,
                None => print!("{text}"),
            }
            if report.passed() {
                Ok(summary)
            } else {
                Err(domain(summary.trim_end()))
            }
        }
        Command::Search { cat, spec, limit, out } => {
            let (c, _) = load_caterpillar(&cat)?;
            let mut s: SearchConstraints =
                serde_json::from_str(&read(&spec)?).map_err(|e| input(format!("{}: {e}", spec.display())))?;
            if let Some(l) = limit {
                s.limit = l;
            }
            let result = search(&s.into_spec(c)).map_err(input)?;
            let text = json(&serde_json::json!({
                "count": result.count(),
                "truncated": result.truncated,
                "placements": result.placements,
            }));
            match out {
                Some(o) => write(&o, &text)?,
                None => print!("{text}"),
            }
            let summary = format!(
                "{} placements{}\n",
                result.count(),
                if result.truncated { " (truncated at limit)" } else { "" }
            );
            if result.count() == 0 {
                Err(domain(summary.trim_end()))
            } else {
                Ok(summary)
            }
        }
        Command::Render {
            cat,
            placement,
            out,
            force,
        } => {
            let (c, roles) = load_caterpillar(&cat)?;
            let p = match load_placement(&placement)? {
                AnyPlacement::Lattice(p) => p,
                AnyPlacement::Real(_) => return Err(input("render needs integer lattice coordinates")),
            };
            let style = RenderStyle::default();
            let svg = if force {
                render_unchecked(&c, &p, &style, &roles)
            } else {
                render(&c, &p, &style, &roles)
            };
            let svg = svg.map_err(|e| match e {
                RenderError::UnverifiedPlacement(_) => domain(&e),
                _ => input(&e),
            })?;
            write(&out, &svg)?;
            Ok(format!("wrote {}\n", out.display()))
        }
    }
}

/// Runs the command line and returns the process exit code. Reports go to
/// standard output, summaries and errors to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_command(cli.command) {
        Ok(summary) => {
            eprint!("{summary}");
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
