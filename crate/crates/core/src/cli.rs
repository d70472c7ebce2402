//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::arrangement::{
    chern_numbers, cporbi_certify, incidence, kummer_report, local_group_order, multiplicity_profile,
    named_arrangement, orbifold_admissible, Arrangement, ArrangementFile, KummerVerdict, MiyaokaYau,
    OrbifoldStructure,
};
use crate::certificate::{Certificate, Verdict, Witness};
use crate::deformation::{
    angle_monotonicity_report, family_bilipschitz, family_isoperimetric, ComparisonFamily, DEFAULT_SAMPLING,
};
use crate::error::{Error, Result};
use crate::model::{ModelKappa, ModelPoint, Vec3};
use crate::pk_cone::{
    cone_cat0_verdict, embedded_projection_obstruction, fiber_length, hemisphere_test, holonomy, lift_length,
    loop_lift_lower_bound, noncat_certificate, projection_curvature, DiskRegion, QuotientSphere,
};
use crate::report::{fmt_f64, to_json};
use crate::surface::{
    covering_radius, double_triangle, find_closed_geodesics, global_cat_verdict, grompi4_certify, round_sphere,
    trace_geodesic, triangle_group_cover, triangle_group_tiling, ConeSurface, GeodesicKind, SearchGrid,
    SurfaceDescription, TraceState,
};
use crate::svg;
use crate::trig::{circle_length, comparison_triangle, is_large, solve_angles, TriangleShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "conecat", version, about = "CAT(κ) certificates for cone surfaces, PK cones and line arrangements")]
struct Cli {
    /// Output format; svg is available for `surface cover` and `surface geodesics`.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Model-space triangles.
    #[command(subcommand)]
    Trig(TrigCmd),
    /// Cone surfaces glued from model triangles.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// PK cones through their quotient spheres.
    #[command(subcommand)]
    Cone(ConeCmd),
    /// Line arrangements in the projective plane.
    #[command(subcommand)]
    Arrangement(ArrangementCmd),
    /// Comparison families of a curvature-4 surface.
    #[command(subcommand)]
    Family(FamilyCmd),
}

/// Accepts plain numbers and multiples of pi such as `pi/2`, `2pi/3`, `3*pi/4`.
fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().map_err(|_| format!("bad denominator in `{s}`"))?),
        None => (t.clone(), 1.0),
    };
    let Some(coef) = num.strip_suffix("pi") else {
        return Err(format!("`{s}` is not a number"));
    };
    let coef = coef.trim_end_matches('*');
    let k = match coef {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| format!("bad coefficient in `{s}`"))?,
    };
    Ok(k * std::f64::consts::PI / den)
}

fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let v = s.split(',').map(parse_real).collect::<std::result::Result<Vec<_>, _>>()?;
    v.try_into().map_err(|_| format!("`{s}` is not three comma-separated values"))
}

fn parse_mult(s: &str) -> std::result::Result<[u32; 3], String> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| format!("`{x}` is not a positive integer")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    v.try_into().map_err(|_| format!("`{s}` is not three comma-separated integers"))
}

#[derive(Debug, Args)]
struct TriangleArgs {
    #[arg(long, default_value = "4", value_parser = parse_real)]
    kappa: f64,
    /// Side lengths a,b,c (side i opposite vertex i).
    #[arg(long, value_parser = parse_triple, conflicts_with = "angles", allow_hyphen_values = true)]
    sides: Option<[f64; 3]>,
    /// Angles A,B,C.
    #[arg(long, value_parser = parse_triple)]
    angles: Option<[f64; 3]>,
}

impl TriangleArgs {
    fn shape(&self) -> Result<TriangleShape> {
        let kappa = ModelKappa::new(self.kappa)?;
        match (&self.sides, &self.angles) {
            (Some(s), _) => TriangleShape::new(kappa, *s),
            (None, Some(a)) => TriangleShape::from_angles(kappa, *a),
            (None, None) => Err(Error::InvalidInput("give --sides or --angles".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
enum TrigCmd {
    /// Angles, area and (for κ = 4) largeness of a triangle.
    Solve(TriangleArgs),
    /// The comparison triangle with the same sides in M²_κ₂.
    Compare {
        #[command(flatten)]
        triangle: TriangleArgs,
        #[arg(long, value_parser = parse_real)]
        kappa2: f64,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["file", "sphere", "double_angles", "double_sides"])))]
struct SurfaceSource {
    /// Surface description (JSON).
    #[arg(long)]
    file: Option<PathBuf>,
    /// The round sphere of curvature 4.
    #[arg(long)]
    sphere: bool,
    /// Double of the triangle with these angles.
    #[arg(long, value_parser = parse_triple)]
    double_angles: Option<[f64; 3]>,
    /// Double of the triangle with these sides.
    #[arg(long, value_parser = parse_triple)]
    double_sides: Option<[f64; 3]>,
    /// Curvature for --double-angles / --double-sides.
    #[arg(long, default_value = "4", value_parser = parse_real)]
    kappa: f64,
}

impl SurfaceSource {
    fn load(&self) -> Result<ConeSurface> {
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)?;
            return ConeSurface::from_description(&SurfaceDescription::from_json(&text)?);
        }
        if self.sphere {
            return Ok(round_sphere());
        }
        let kappa = ModelKappa::new(self.kappa)?;
        let t = match (&self.double_angles, &self.double_sides) {
            (Some(a), _) => TriangleShape::from_angles(kappa, *a)?,
            (None, Some(s)) => TriangleShape::new(kappa, *s)?,
            _ => return Err(Error::InvalidInput("no surface given".into())),
        };
        Ok(double_triangle(&t))
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Start positions per edge in the closed-geodesic search.
    #[arg(long, default_value_t = SearchGrid::default().edge_positions)]
    edge_positions: usize,
    /// Start angles per position.
    #[arg(long, default_value_t = SearchGrid::default().edge_angles)]
    edge_angles: usize,
    /// Directions per cone point.
    #[arg(long, default_value_t = SearchGrid::default().vertex_directions)]
    vertex_directions: usize,
}

impl GridArgs {
    fn grid(&self) -> Result<SearchGrid> {
        let g = SearchGrid {
            edge_positions: self.edge_positions,
            edge_angles: self.edge_angles,
            vertex_directions: self.vertex_directions,
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Subcommand)]
enum SurfaceCmd {
    /// Vertices, cone angles and Gauss–Bonnet check of a surface.
    Build {
        #[command(flatten)]
        source: SurfaceSource,
        /// Write the surface description here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also estimate the covering radius by cone points at this sample density (max 256).
        #[arg(long)]
        covering: Option<usize>,
    },
    /// Closed geodesics up to a length bound.
    Geodesics {
        #[command(flatten)]
        source: SurfaceSource,
        /// Defaults to 2π/√κ.
        #[arg(long, value_parser = parse_real)]
        bound: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Global CAT(κ) verdict.
    Certify {
        #[command(flatten)]
        source: SurfaceSource,
        #[arg(long, value_parser = parse_real)]
        bound: Option<f64>,
        /// Only run the combinatorial large-triangle certificate.
        #[arg(long)]
        grompi4: bool,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Cover of a triangle double induced by a spherical triangle group.
    Cover {
        #[command(flatten)]
        triangle: TriangleArgs,
        /// Multiplicities p,q,r at the three vertices.
        #[arg(long, value_parser = parse_mult, required = true)]
        mult: [u32; 3],
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ConeCmd {
    /// Fiber length of the quotient sphere, and lift bounds for an angle θ.
    Fiber {
        #[command(flatten)]
        source: SurfaceSource,
        /// Degree of a cover of the quotient.
        #[arg(long, default_value_t = 1)]
        degree: u64,
        /// Angle between a geodesic and the fibers.
        #[arg(long, value_parser = parse_real)]
        theta: Option<f64>,
    },
    /// Holonomy along the boundary of a disk, or the embedded-projection obstruction.
    Holonomy {
        #[command(flatten)]
        source: SurfaceSource,
        /// Area of the disk Ω; without it the obstruction certificate is reported.
        #[arg(long, value_parser = parse_real)]
        area: Option<f64>,
        /// Cone angles of cone points inside Ω.
        #[arg(long, value_delimiter = ',', value_parser = parse_real)]
        interior: Vec<f64>,
        /// Boundary cone points as inside:outside sector angles.
        #[arg(long, value_delimiter = ',')]
        boundary: Vec<String>,
    },
    /// CAT(0) verdict for the cone over the quotient.
    Verdict {
        #[command(flatten)]
        source: SurfaceSource,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Non-CAT test for the n-fold cover.
    Noncat {
        #[arg(long, value_parser = parse_real)]
        alpha_min: f64,
        #[arg(long)]
        n: u64,
    },
    /// Whether points of the curvature-4 sphere lie in no open hemisphere.
    Hemisphere {
        /// Direction x,y,z of a point; repeat for each point.
        #[arg(long = "point", value_parser = parse_triple, required = true, allow_hyphen_values = true)]
        points: Vec<[f64; 3]>,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("arr").required(true).args(["name", "file"])))]
struct ArrangementSource {
    /// One of A1_6, A1_7, A3_0_3.
    #[arg(long)]
    name: Option<String>,
    /// Arrangement file (JSON).
    #[arg(long)]
    file: Option<PathBuf>,
}

impl ArrangementSource {
    fn load(&self) -> Result<(Arrangement, Option<Vec<u32>>)> {
        if let Some(n) = &self.name {
            return Ok((named_arrangement(n)?, None));
        }
        let path = self.file.as_ref().ok_or_else(|| Error::InvalidInput("no arrangement given".into()))?;
        let f = ArrangementFile::from_json(&std::fs::read_to_string(path)?)?;
        Ok((f.arrangement()?, f.b))
    }

    fn orbifold(&self, b: &[u32]) -> Result<OrbifoldStructure> {
        let (a, from_file) = self.load()?;
        let b = match (b, from_file) {
            ([], Some(fb)) => fb,
            ([], None) => return Err(Error::InvalidInput("give --b".into())),
            ([x], _) => vec![*x; a.len()],
            (list, _) => list.to_vec(),
        };
        OrbifoldStructure::new(a, b)
    }
}

#[derive(Debug, Subcommand)]
enum ArrangementCmd {
    /// Multiple points by exact intersection.
    Incidence {
        #[command(flatten)]
        source: ArrangementSource,
    },
    /// Orbifold Chern numbers and the Miyaoka–Yau verdict.
    Chern {
        #[command(flatten)]
        source: ArrangementSource,
        /// Multiplicities: one value for all lines, or one per line.
        #[arg(long, value_delimiter = ',')]
        b: Vec<u32>,
    },
    /// CAT(0) certificate of the orbifold structure.
    Certify {
        #[command(flatten)]
        source: ArrangementSource,
        #[arg(long, value_delimiter = ',')]
        b: Vec<u32>,
    },
    /// Thresholds for the Kummer cover of order n.
    Kummer {
        #[command(flatten)]
        source: ArrangementSource,
        #[arg(long)]
        n: u64,
        /// Isoperimetric constant; defaults to the one of the octant double's flat member.
        #[arg(long, value_parser = parse_real)]
        c: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
enum FamilyCmd {
    /// The member at curvature κ₂, optionally with cone angles along a grid of curvatures.
    Member {
        #[command(flatten)]
        source: SurfaceSource,
        #[arg(long, value_parser = parse_real)]
        kappa2: f64,
        /// Vertex for the cone-angle table.
        #[arg(long)]
        vertex: Option<usize>,
        /// Curvatures for the cone-angle table.
        #[arg(long, value_delimiter = ',', value_parser = parse_real)]
        grid: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bi-Lipschitz constant of the incenter-radial maps to the member at κ₂.
    Lipschitz {
        #[command(flatten)]
        source: SurfaceSource,
        #[arg(long, default_value = "0", value_parser = parse_real)]
        kappa2: f64,
        #[arg(long, default_value_t = DEFAULT_SAMPLING)]
        sampling: usize,
    },
    /// Isoperimetric constant from the flat member.
    Isoperimetric {
        #[command(flatten)]
        source: SurfaceSource,
        #[arg(long, default_value_t = DEFAULT_SAMPLING)]
        sampling: usize,
    },
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub format: Format,
    pub grid: SearchGrid,
    pub sampling: usize,
}

impl RunConfig {
    pub const MAX_SAMPLING: usize = 1024;

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.sampling == 0 || self.sampling > Self::MAX_SAMPLING {
            return Err(Error::InvalidInput(format!(
                "sampling must be in 1..={}, got {}",
                Self::MAX_SAMPLING,
                self.sampling
            )));
        }
        Ok(())
    }
}

struct Outcome {
    body: String,
    code: i32,
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::NotCat => 1,
        _ => 0,
    }
}

fn render_certificate(c: &Certificate, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let _ = writeln!(out, "{pad}{}: {}", c.verdict, c.criterion);
    if let Some(s) = &c.subject {
        let _ = writeln!(out, "{pad}  subject: {s}");
    }
    for (k, v) in &c.margins {
        let _ = writeln!(out, "{pad}  {k} = {}", fmt_f64(*v));
    }
    for w in &c.witnesses {
        let text = match w {
            Witness::SmallConeAngle { vertex, angle } => format!("cone angle {} at vertex {vertex}", fmt_f64(*angle)),
            Witness::ClosedGeodesic { length, description } => {
                format!("closed geodesic of length {} ({description})", fmt_f64(*length))
            }
            Witness::FailedCondition { condition, detail } => format!("{condition} fails: {detail}"),
            Witness::NonLargeTriangle { triangle, min_altitude } => {
                format!("triangle {triangle} has altitude {}", fmt_f64(*min_altitude))
            }
            Witness::Topology { detail } | Witness::Note { detail } => detail.clone(),
            Witness::NonCatCover { alpha_min, n } => format!("alpha_min {} with n = {n}", fmt_f64(*alpha_min)),
        };
        let _ = writeln!(out, "{pad}  witness: {text}");
    }
    for n in &c.notes {
        let _ = writeln!(out, "{pad}  note: {n}");
    }
    for child in &c.children {
        render_certificate(child, depth + 1, out);
    }
}

/// `key = value` lines from any serialisable report.
fn render_value(prefix: &str, v: &serde_json::Value, out: &mut String) {
    use serde_json::Value;
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_value(&p, x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            let _ = writeln!(out, "{prefix} = [{}]", items.join(", "));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                render_value(&format!("{prefix}[{i}]"), x, out);
            }
        }
        x => {
            let _ = writeln!(out, "{prefix} = {}", scalar(x));
        }
    }
}

fn scalar(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Number(n) => n.as_f64().map(fmt_f64).unwrap_or_else(|| n.to_string()),
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn emit<T: Serialize>(format: Format, value: &T, code: i32) -> Result<Outcome> {
    let body = match format {
        Format::Json => to_json(value)? + "\n",
        Format::Text => {
            let v: serde_json::Value = serde_json::from_str(&to_json(value)?)?;
            let mut s = String::new();
            render_value("", &v, &mut s);
            s
        }
        Format::Svg => return Err(Error::InvalidInput("svg output is not available for this command".into())),
    };
    Ok(Outcome { body, code })
}

fn emit_certificate(format: Format, c: &Certificate) -> Result<Outcome> {
    let code = verdict_code(c.verdict);
    match format {
        Format::Text => {
            let mut s = String::new();
            render_certificate(c, 0, &mut s);
            Ok(Outcome { body: s, code })
        }
        _ => emit(format, c, code),
    }
}

fn write_description(path: &Option<PathBuf>, s: &ConeSurface) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, to_json(&s.description())? + "\n")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct VertexRow {
    vertex: usize,
    valence: usize,
    angle: f64,
}

#[derive(Serialize)]
struct SurfaceSummary {
    fingerprint: String,
    kappa: f64,
    triangles: usize,
    vertices: Vec<VertexRow>,
    cone_points: usize,
    euler_characteristic: i64,
    area: f64,
    gauss_bonnet_defect: f64,
    local_cat: Verdict,
}

fn summary(s: &ConeSurface) -> SurfaceSummary {
    SurfaceSummary {
        fingerprint: s.fingerprint(),
        kappa: s.kappa().value(),
        triangles: s.triangles().len(),
        vertices: s
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| VertexRow {
                vertex: i,
                valence: v.valence(),
                angle: v.angle,
            })
            .collect(),
        cone_points: s.cone_points().len(),
        euler_characteristic: s.euler_characteristic(),
        area: s.area(),
        gauss_bonnet_defect: s.gauss_bonnet_defect(),
        local_cat: crate::surface::local_cat_check(s).verdict,
    }
}

fn trig(cmd: &TrigCmd, format: Format) -> Result<Outcome> {
    match cmd {
        TrigCmd::Solve(args) => {
            let t = args.shape()?;
            let large = if t.kappa() == ModelKappa::FOUR { Some(is_large(&t)?) } else { None };
            let report = json!({
                "kappa": t.kappa().value(),
                "sides": t.sides(),
                "angles": solve_angles(&t),
                "area": t.area(),
                "perimeter": t.perimeter(),
                "largeness": large,
            });
            emit(format, &report, 0)
        }
        TrigCmd::Compare { triangle, kappa2 } => {
            let t = triangle.shape()?;
            let c = comparison_triangle(&t, ModelKappa::new(*kappa2)?)?;
            let (a, b) = (t.angles(), c.angles());
            let report = json!({
                "kappa": t.kappa().value(),
                "kappa2": kappa2,
                "sides": t.sides(),
                "angles": a,
                "comparison_angles": b,
                "angle_differences": ([0, 1, 2].map(|i| a[i] - b[i])),
            });
            emit(format, &report, 0)
        }
    }
}

fn surface(cmd: &SurfaceCmd, format: Format) -> Result<Outcome> {
    match cmd {
        SurfaceCmd::Build { source, out, covering } => {
            let s = source.load()?;
            write_description(out, &s)?;
            let cov = covering.map(|d| covering_radius(&s, d)).transpose()?;
            emit(format, &json!({ "surface": summary(&s), "covering_radius": cov }), 0)
        }
        SurfaceCmd::Geodesics { source, bound, grid } => {
            let s = source.load()?;
            let bound = bound.unwrap_or_else(|| s.kappa().great_circle());
            if !bound.is_finite() || bound <= 0.0 {
                return Err(Error::InvalidInput("flat surfaces need an explicit positive --bound".into()));
            }
            let search = find_closed_geodesics(&s, bound, &grid.grid()?);
            if format == Format::Svg {
                let best = search
                    .geodesics
                    .iter()
                    .filter(|g| g.kind == GeodesicKind::Smooth)
                    .find_map(|g| g.start_edge.map(|e| (g, e)));
                let body = match best {
                    Some((g, e)) => {
                        let start = TraceState::on_edge(&s, e, g.start_param, g.start_angle);
                        svg::path_svg(&s, &trace_geodesic(&s, start, g.length))
                    }
                    None => {
                        return Err(Error::NotApplicable("no smooth closed geodesic to draw".into()));
                    }
                };
                return Ok(Outcome { body, code: 0 });
            }
            emit(format, &search, 0)
        }
        SurfaceCmd::Certify { source, bound, grompi4, grid } => {
            let s = source.load()?;
            let c = if *grompi4 {
                grompi4_certify(&s)
            } else {
                global_cat_verdict(&s, *bound, &grid.grid()?)
            };
            emit_certificate(format, &c)
        }
        SurfaceCmd::Cover { triangle, mult, out } => {
            let m = *mult;
            if format == Format::Svg {
                return Ok(Outcome {
                    body: svg::tiling_svg(&triangle_group_tiling(m)?),
                    code: 0,
                });
            }
            let t = triangle.shape()?;
            let s = triangle_group_cover(&t, m)?;
            write_description(out, &s)?;
            emit(format, &json!({ "multiplicities": m, "surface": summary(&s) }), 0)
        }
    }
}

fn quotient(source: &SurfaceSource) -> Result<QuotientSphere> {
    QuotientSphere::new(source.load()?)
}

fn parse_sector_pair(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidInput(format!("boundary point `{s}` is not inside:outside")))?;
    let p = |x: &str| parse_real(x).map_err(Error::InvalidInput);
    Ok((p(a)?, p(b)?))
}

fn cone(cmd: &ConeCmd, format: Format) -> Result<Outcome> {
    match cmd {
        ConeCmd::Fiber { source, degree, theta } => {
            let q = quotient(source)?;
            if *degree == 0 {
                return Err(Error::InvalidInput("degree must be positive".into()));
            }
            let l = fiber_length(&q);
            let lift = theta
                .map(|th| -> Result<_> {
                    let k = projection_curvature(th)?;
                    Ok(json!({
                        "theta": th,
                        "projection_curvature": k,
                        "circle_length": circle_length(ModelKappa::FOUR, k),
                        "loop_lift_lower_bound": loop_lift_lower_bound(th)?,
                        "lift_of_unit_projection": lift_length(1.0, th)?,
                    }))
                })
                .transpose()?;
            let report = json!({
                "area": q.area(),
                "fiber_length": l,
                "degree": degree,
                "covered_fiber_length": *degree as f64 * l,
                "lift": lift,
            });
            emit(format, &report, 0)
        }
        ConeCmd::Holonomy { source, area, interior, boundary } => {
            let q = quotient(source)?;
            match area {
                None => emit_certificate(format, &embedded_projection_obstruction(&q)?),
                Some(a) => {
                    let region = DiskRegion {
                        area: *a,
                        interior_cone_points: interior.clone(),
                        boundary_cone_points: boundary.iter().map(|s| parse_sector_pair(s)).collect::<Result<_>>()?,
                    };
                    emit(format, &json!({ "region": region, "holonomy": holonomy(&q, &region)? }), 0)
                }
            }
        }
        ConeCmd::Verdict { source, grid } => {
            let q = quotient(source)?;
            let cat4 = global_cat_verdict(q.surface(), None, &grid.grid()?);
            emit_certificate(format, &cone_cat0_verdict(&q, &cat4))
        }
        ConeCmd::Noncat { alpha_min, n } => {
            if !(alpha_min.is_finite() && *alpha_min > 0.0) || *n < 1 {
                return Err(Error::InvalidInput("need alpha_min > 0 and n ≥ 1".into()));
            }
            emit_certificate(format, &noncat_certificate(*alpha_min, *n))
        }
        ConeCmd::Hemisphere { points } => {
            let pts = points
                .iter()
                .map(|c| {
                    let v = Vec3::new(c[0], c[1], c[2]);
                    if v.norm() < 1e-12 {
                        return Err(Error::InvalidInput("zero direction".into()));
                    }
                    ModelPoint::on_sphere(ModelKappa::FOUR, v.normalize() * 0.5)
                })
                .collect::<Result<Vec<_>>>()?;
            let outside = hemisphere_test(&pts)?;
            emit(format, &json!({ "points": pts.len(), "in_no_open_hemisphere": outside }), 0)
        }
    }
}

fn default_isoperimetric() -> Result<f64> {
    let t = TriangleShape::from_angles(ModelKappa::FOUR, [std::f64::consts::FRAC_PI_2; 3])?;
    Ok(family_isoperimetric(&ComparisonFamily::new(double_triangle(&t))?, DEFAULT_SAMPLING)?.constant)
}

fn arrangement(cmd: &ArrangementCmd, format: Format) -> Result<Outcome> {
    match cmd {
        ArrangementCmd::Incidence { source } => {
            let (a, _) = source.load()?;
            let pts = incidence(&a)?;
            let profile = multiplicity_profile(&pts);
            let rows: Vec<_> = pts
                .iter()
                .map(|p| {
                    json!({
                        "multiplicity": p.multiplicity(),
                        "lines": p.lines,
                        "coords": p.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let per_line: Vec<usize> = (0..a.len())
                .map(|i| pts.iter().filter(|p| p.lines.contains(&i)).count())
                .collect();
            let report = json!({
                "name": a.name(),
                "lines": a.len(),
                "profile": profile.iter().map(|(m, n)| (m.to_string(), *n)).collect::<std::collections::BTreeMap<_, _>>(),
                "points_per_line": per_line,
                "points": rows,
            });
            emit(format, &report, 0)
        }
        ArrangementCmd::Chern { source, b } => {
            let o = source.orbifold(b)?;
            let r = chern_numbers(&o)?;
            let code = if r.verdict == MiyaokaYau::Violation { 1 } else { 0 };
            if format == Format::Text {
                let body = format!("c1²={}, 3e={}, e={}, {}\n", r.c1_sq, r.three_e, r.euler_e, r.verdict);
                return Ok(Outcome { body, code });
            }
            let orders: Vec<_> = incidence(o.arrangement())?
                .iter()
                .filter(|p| p.multiplicity() == 3)
                .map(|p| {
                    let [i, j, k] = [p.lines[0], p.lines[1], p.lines[2]];
                    local_group_order(o.b()[i], o.b()[j], o.b()[k]).map(|g| json!({ "lines": p.lines, "group": g }))
                })
                .collect::<Result<_>>()?;
            let orders: Vec<serde_json::Value> = orders;
            emit(format, &json!({ "chern": r, "admissible": orbifold_admissible(&o)?.verdict, "triple_points": orders }), code)
        }
        ArrangementCmd::Certify { source, b } => {
            let o = source.orbifold(b)?;
            emit_certificate(format, &cporbi_certify(&o)?)
        }
        ArrangementCmd::Kummer { source, n, c } => {
            let (a, _) = source.load()?;
            let c = match c {
                Some(c) => *c,
                None => default_isoperimetric()?,
            };
            let r = kummer_report(&a, *n, c)?;
            let code = if r.verdict == KummerVerdict::NotCat { 1 } else { 0 };
            emit(format, &r, code)
        }
    }
}

fn family(cmd: &FamilyCmd, format: Format) -> Result<Outcome> {
    match cmd {
        FamilyCmd::Member { source, kappa2, vertex, grid, out } => {
            let f = ComparisonFamily::new(source.load()?)?;
            let m = f.member(*kappa2)?;
            write_description(out, &m)?;
            let table = match vertex {
                Some(v) => {
                    let g = if grid.is_empty() { vec![0.0, 1.0, 2.0, 3.0, 4.0] } else { grid.clone() };
                    Some(angle_monotonicity_report(&f, *v, &g)?)
                }
                None => None,
            };
            emit(format, &json!({ "kappa2": kappa2, "surface": summary(&m), "cone_angle_table": table }), 0)
        }
        FamilyCmd::Lipschitz { source, kappa2, sampling } => {
            check_sampling(*sampling)?;
            let f = ComparisonFamily::new(source.load()?)?;
            emit(format, &family_bilipschitz(&f, ModelKappa::new(*kappa2)?, *sampling)?, 0)
        }
        FamilyCmd::Isoperimetric { source, sampling } => {
            check_sampling(*sampling)?;
            let f = ComparisonFamily::new(source.load()?)?;
            emit(format, &family_isoperimetric(&f, *sampling)?, 0)
        }
    }
}

fn check_sampling(sampling: usize) -> Result<()> {
    RunConfig {
        format: Format::Text,
        grid: SearchGrid::default(),
        sampling,
    }
    .validate()
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Trig(c) => trig(c, cli.format),
        Command::Surface(c) => surface(c, cli.format),
        Command::Cone(c) => cone(c, cli.format),
        Command::Arrangement(c) => arrangement(c, cli.format),
        Command::Family(c) => family(c, cli.format),
    }
}

/// Runs the command line `argv` (including the program name), writing reports
/// to `out` and diagnostics to `err`. Returns the exit code: 0 when a verdict
/// or report is produced, 1 for NOT_CAT or a Miyaoka–Yau violation, 2 for
/// input errors.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let _ = out.write_all(o.body.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["conecat"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parses_multiples_of_pi() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_real("pi").unwrap(), pi);
        assert_eq!(parse_real("pi/2").unwrap(), pi / 2.0);
        assert_eq!(parse_real("2pi/3").unwrap(), 2.0 * pi / 3.0);
        assert_eq!(parse_real("3*pi/4").unwrap(), 3.0 * pi / 4.0);
        assert_eq!(parse_real("0.5").unwrap(), 0.5);
        assert!(parse_real("x").is_err());
    }

    #[test]
    fn chern_text_line() {
        let (code, out, _) = run_capture(&["arrangement", "chern", "--name", "A3_0_3", "--b", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "c1²=9/4, 3e=9/4, e=3/4, BALL_QUOTIENT_EQUALITY\n");
    }

    #[test]
    fn noncat_exit_code() {
        let (code, out, _) = run_capture(&["cone", "noncat", "--alpha-min", "3.14159265", "--n", "2"]);
        assert_eq!(code, 1);
        assert!(out.starts_with("NOT_CAT"));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["surface", "certify"]).0, 2);
        assert_eq!(run_capture(&["arrangement", "chern", "--name", "A9", "--b", "2"]).0, 2);
        assert_eq!(run_capture(&["trig", "solve", "--sides", "1,2,5", "--kappa", "0"]).0, 2);
        assert_eq!(run_capture(&["--format", "svg", "trig", "solve", "--angles", "pi/2,pi/2,pi/2"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }
}
