use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde::Serialize;
use sphere12::config::{
    config_from_json, config_to_json, contact_graph, named, Configuration, NamedConfig, CONTACT_TOL,
};
use sphere12::criticality::is_balanced_with_tol;
use sphere12::geom::{angle_from_radius, radius_from_angle};
use sphere12::moves::{
    m5_path, m6_path, modified_m5_path, verify_path, DeformationPath, M6Variant, PathReport,
};
use sphere12::perm::{induced_permutation, Permutation};
use sphere12::tammes;
use thiserror::Error;

use crate::render::{render_svg, Projection, RenderError, RenderSpec, WeightedEdge};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sphere12::Error),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad argument: {0}")]
    Usage(String),
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "sphere12",
    version,
    about = "Configurations of equal spheres touching a unit sphere"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best separation of N points on the sphere over random restarts.
    Tammes(TammesArgs),
    /// Balance certificate of a configuration file at a contact angle.
    CheckCritical(CheckArgs),
    /// Build and verify a deformation path.
    Deform(DeformArgs),
    /// Draw a configuration and its contact graph as SVG.
    Render(RenderArgs),
    /// Write one of the reference configurations.
    Named(NamedArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NamedArg {
    Dod,
    Fcc,
    Hcp,
    Tet,
    Oct,
    Ring,
    M5Halfway,
}

#[derive(Debug, Args)]
pub struct NamedArgs {
    #[arg(value_enum)]
    pub name: NamedArg,
    /// Number of points for the ring.
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    /// Radius recorded in the file.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TammesArgs {
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the result JSON here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub config: PathBuf,
    /// Contact angle in radians; defaults to the smallest separation.
    #[arg(long, conflicts_with = "theta_deg")]
    pub theta: Option<f64>,
    #[arg(long)]
    pub theta_deg: Option<f64>,
    #[arg(long, default_value_t = CONTACT_TOL)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MoveKind {
    M6,
    M5,
    M5mod,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Fcc,
    Hcp,
}

#[derive(Debug, Args)]
pub struct DeformArgs {
    #[arg(value_enum)]
    pub kind: MoveKind,
    #[arg(long, value_enum, default_value_t = VariantArg::Fcc)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    pub pole: usize,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub direction: i32,
    #[arg(long = "r")]
    pub r: f64,
    /// Interior margin for the six-ball move.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Samples per segment for verification.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Directory for report.json and frames.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Keyframes per segment written to the output directory.
    #[arg(long, default_value_t = 0)]
    pub frames: usize,
    /// Also draw every keyframe as SVG.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ProjectionArg {
    Orthographic,
    Stereographic,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub config: PathBuf,
    #[arg(long, value_enum, default_value_t = ProjectionArg::Orthographic)]
    pub projection: ProjectionArg,
    /// View axis (orthographic) or pole (stereographic) as x,y,z.
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,1", allow_hyphen_values = true)]
    pub axis: Vector3<f64>,
    #[arg(long, default_value_t = 512)]
    pub size: u32,
    #[arg(long)]
    pub no_labels: bool,
    /// Annotate edges with balance weights.
    #[arg(long)]
    pub weights: bool,
    /// Contact angle in radians; defaults to the smallest separation.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = CONTACT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_vec3(s: &str) -> Result<Vector3<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, z] => Ok(Vector3::new(x, y, z)),
        _ => Err(format!("expected three comma-separated numbers, got {s:?}")),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Reads a configuration file, or the `config` field of a `tammes` result.
fn load_config(path: &Path) -> CliResult<Configuration> {
    let text = read(path)?;
    if let Ok(serde_json::Value::Object(mut top)) = serde_json::from_str::<serde_json::Value>(&text) {
        if !top.contains_key("points") {
            if let Some(inner) = top.remove("config") {
                return Ok(config_from_json(&inner.to_string())?.0);
            }
        }
    }
    Ok(config_from_json(&text)?.0)
}

/// Runs one command and returns its exit code; errors are reported on stderr.
pub fn run(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Tammes(a) => cmd_tammes(&a),
        Command::CheckCritical(a) => cmd_check_critical(&a),
        Command::Deform(a) => cmd_deform(&a),
        Command::Render(a) => cmd_render(&a),
        Command::Named(a) => cmd_named(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn cmd_tammes(a: &TammesArgs) -> CliResult<u8> {
    let res = tammes::solve(a.n, a.restarts, a.seed)?;
    println!("n = {}", res.n);
    println!("theta_deg = {:.6}", res.theta.to_degrees());
    println!("r = {:.6}", res.radius);
    println!("balanced = {}", res.certificate.balanced);
    let json = res.to_json();
    match &a.out {
        Some(p) => write(p, &json)?,
        None => println!("{json}"),
    }
    Ok(EXIT_OK)
}

pub fn cmd_check_critical(a: &CheckArgs) -> CliResult<u8> {
    let u = load_config(&a.config)?;
    let theta = match (a.theta, a.theta_deg) {
        (Some(t), _) => t,
        (None, Some(d)) => d.to_radians(),
        (None, None) => u.min_separation(),
    };
    let cert = is_balanced_with_tol(&u, theta, a.tol)?;
    println!("{}", cert.to_json());
    eprintln!(
        "theta_deg = {:.6} residual = {:.6e}",
        theta.to_degrees(),
        cert.residual
    );
    Ok(if cert.balanced {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

#[derive(Serialize)]
struct DeformOutput<'a> {
    kind: &'a str,
    radius: f64,
    report: &'a PathReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    permutation: Option<&'a Permutation>,
}

fn build_path(a: &DeformArgs) -> CliResult<DeformationPath> {
    Ok(match a.kind {
        MoveKind::M6 => {
            let variant = match a.variant {
                VariantArg::Fcc => M6Variant::Fcc,
                VariantArg::Hcp => M6Variant::Hcp,
            };
            m6_path(variant, a.r, a.eps)?
        }
        MoveKind::M5 => m5_path(a.pole, a.direction, a.r)?,
        MoveKind::M5mod => modified_m5_path(a.pole, a.direction, a.r)?,
    })
}

pub fn cmd_deform(a: &DeformArgs) -> CliResult<u8> {
    if a.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let path = build_path(a)?;
    let report = verify_path(&path, a.samples)?;
    let limit = angle_from_radius(a.r)?;
    let permutation = match a.kind {
        MoveKind::M6 => None,
        MoveKind::M5 | MoveKind::M5mod => {
            Some(induced_permutation(&path, &named(&NamedConfig::Dod)?)?)
        }
    };

    println!("segments = {}", path.segments().len());
    println!("samples = {}", report.samples);
    println!("contact_deg = {:.6}", limit.to_degrees());
    println!(
        "min_separation_deg = {:.6}",
        report.min_separation.to_degrees()
    );
    println!("violations = {}", report.violation_times.len());
    if let Some(rms) = report.endpoint_match_rms {
        println!("endpoint_rms = {rms:.6}");
    }
    if let Some(p) = &permutation {
        println!("permutation = {p}");
        println!("images = {:?}", p.images());
        println!("parity = {:?}", p.parity());
    }

    if let Some(dir) = &a.out {
        create_dir(dir)?;
        let kind = match a.kind {
            MoveKind::M6 => "m6",
            MoveKind::M5 => "m5",
            MoveKind::M5mod => "m5mod",
        };
        let out = DeformOutput {
            kind,
            radius: a.r,
            report: &report,
            permutation: permutation.as_ref(),
        };
        write(
            &dir.join("report.json"),
            &serde_json::to_string_pretty(&out).expect("serializable"),
        )?;
        if a.frames > 0 {
            let frames = path.keyframes(a.frames)?;
            let lines: Vec<String> = path
                .frames_json(a.frames)?
                .iter()
                .map(|f| f.replace('\n', ""))
                .collect();
            write(&dir.join("frames.jsonl"), &(lines.join("\n") + "\n"))?;
            if a.svg {
                let fdir = dir.join("frames");
                create_dir(&fdir)?;
                for (k, u) in frames.iter().enumerate() {
                    let edges = edges_at(u, limit, 1e-6)?;
                    let svg = render_svg(u, &edges, &RenderSpec::default())?;
                    write(&fdir.join(format!("frame_{k:04}.svg")), &svg)?;
                }
            }
        }
    }
    Ok(if report.is_valid() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

/// Pairs at most `tol` beyond `theta`; closer pairs are included rather than rejected.
fn edges_at(u: &Configuration, theta: f64, tol: f64) -> CliResult<Vec<WeightedEdge>> {
    let mut out = Vec::new();
    for i in 0..u.n() {
        for j in i + 1..u.n() {
            let d = sphere12::geom::angular_distance(&u.point(i), &u.point(j));
            if d <= theta + tol {
                out.push((i, j, None));
            }
        }
    }
    Ok(out)
}

pub fn cmd_render(a: &RenderArgs) -> CliResult<u8> {
    let u = load_config(&a.config)?;
    let theta = a.theta.unwrap_or_else(|| u.min_separation());
    let graph = contact_graph(&u, theta, a.tol)?;
    let weights = if a.weights {
        Some(is_balanced_with_tol(&u, theta, a.tol)?.weight_triples())
    } else {
        None
    };
    let edges: Vec<WeightedEdge> = graph
        .edges
        .iter()
        .map(|&(i, j)| {
            let w = weights
                .as_ref()
                .and_then(|ws| ws.iter().find(|t| t.0 == i && t.1 == j).map(|t| t.2));
            (i, j, w)
        })
        .collect();
    let spec = RenderSpec {
        projection: match a.projection {
            ProjectionArg::Orthographic => Projection::Orthographic(a.axis),
            ProjectionArg::Stereographic => Projection::Stereographic(a.axis),
        },
        size: a.size,
        show_labels: !a.no_labels,
        show_weights: a.weights,
    };
    let svg = render_svg(&u, &edges, &spec)?;
    write(&a.out, &svg)?;
    println!("points = {}", u.n());
    println!("arcs = {}", edges.len());
    println!("theta_deg = {:.6}", theta.to_degrees());
    println!("r = {:.6}", radius_from_angle(theta).unwrap_or(f64::NAN));
    Ok(EXIT_OK)
}

pub fn cmd_named(a: &NamedArgs) -> CliResult<u8> {
    let name = match a.name {
        NamedArg::Dod => NamedConfig::Dod,
        NamedArg::Fcc => NamedConfig::Fcc,
        NamedArg::Hcp => NamedConfig::Hcp,
        NamedArg::Tet => NamedConfig::Tet,
        NamedArg::Oct => NamedConfig::Oct,
        NamedArg::Ring => NamedConfig::Ring(a.n),
        NamedArg::M5Halfway => NamedConfig::M5Halfway,
    };
    let json = config_to_json(&named(&name)?, a.r);
    match &a.out {
        Some(p) => write(p, &json)?,
        None => println!("{json}"),
    }
    Ok(EXIT_OK)
}
