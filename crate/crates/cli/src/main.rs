//! `cornerwave`: batch runs of the corner predictor, the collocation oracle
//! and the scattering demo on TOML scenarios.
//!
//! Exit codes: 0 success (or agreement for `check`), 1 disagreement, 2 bad
//! scenario or arguments, 3 inconclusive check, 4 runtime failure.

mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use cornerwave::geometry::{classify_angle, classify_vertex, RationalityClass, VertexClass, DEFAULT_DENOMINATOR_BOUND};
use cornerwave::oracle::{collocation_nullspace, cross_check, Agreement, Corner, OracleReport, Outcome};
use cornerwave::scatter::{
    solve_forward, sound_soft_ball_far_field, series_terms, uniqueness_demo, FarField, IncidentWave, MfsConfig,
    SphereGrid,
};
use cornerwave::vanish::{predict_edge, predict_vertex, theorem_trace, VanishingVerdict};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use scenario::{Loaded, Problem, ScatterProblem};

#[derive(Parser)]
#[command(name = "cornerwave", version, about = "Vanishing orders at edge and vertex corners")]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; defaults to the scenario's `out`, then `.`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomised sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Guaranteed vanishing order; writes verdict.json.
    Predict,
    /// Collocation nullspace; writes oracle.json and spectrum.csv.
    Oracle,
    /// Compares prediction and oracle; exit 0 agree, 1 disagree, 3 inconclusive.
    Check {
        /// Use this verdict file instead of running the predictor.
        #[arg(long)]
        verdict: Option<PathBuf>,
    },
    /// Forward solves and the two-wave corner test; writes farfield.csv and demo.json.
    Scatter,
}

enum Failure {
    Schema(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<cornerwave::Error> for Failure {
    fn from(e: cornerwave::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

#[derive(Serialize, Deserialize)]
struct VerdictFile {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rationality: Option<RationalityClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertex_class: Option<VertexClass>,
    verdict: VanishingVerdict,
    trace: String,
}

#[derive(Serialize)]
struct OracleFile<'a> {
    #[serde(flatten)]
    report: &'a OracleReport,
    agreement: &'a Agreement,
}

#[derive(Serialize)]
struct ForwardReport {
    k: f64,
    directions: [[f64; 3]; 2],
    residuals: [f64; 2],
    /// Largest relative far-field change when the source count is halved.
    tolerance: f64,
    /// Relative `L²(S²)` far-field error against the series solution, when
    /// the obstacle is a sound-soft sphere.
    #[serde(skip_serializing_if = "Option::is_none")]
    series_error: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .init();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Schema(msg)) => {
            eprintln!("error: invalid scenario: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(4)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let config = cli.config.as_ref().ok_or_else(|| Failure::Schema("--config <path> is required".into()))?;
    let loaded = scenario::load(config).map_err(Failure::Schema)?;
    let out = cli.out.clone().or_else(|| loaded.scenario.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    log::info!("scenario {} → {}", config.display(), out.display());
    match &cli.command {
        Command::Predict => {
            let v = predict(&loaded)?;
            write_json(&out, "verdict.json", &v)?;
            print!("{}", v.trace);
            Ok(0)
        }
        Command::Oracle => {
            let v = predict(&loaded)?;
            let (report, agreement) = oracle(&loaded, &v.verdict)?;
            write_oracle(&out, &report, &agreement)?;
            println!("leading degree {:?}; {}", report.leading_degree, agreement.note);
            Ok(0)
        }
        Command::Check { verdict } => {
            let v = match verdict {
                Some(path) => read_verdict(path)?,
                None => {
                    let v = predict(&loaded)?;
                    write_json(&out, "verdict.json", &v)?;
                    v
                }
            };
            let (report, agreement) = oracle(&loaded, &v.verdict)?;
            write_oracle(&out, &report, &agreement)?;
            println!("{:?}: {}", agreement.outcome, agreement.note);
            Ok(match agreement.outcome {
                Outcome::Agree => 0,
                Outcome::Disagree => 1,
                Outcome::Inconclusive => 3,
            })
        }
        Command::Scatter => {
            let Problem::Scatter(p) = &loaded.problem else {
                return Err(Failure::Schema("scatter needs kind = \"scatter\"".into()));
            };
            scatter(p, cli.seed, &out)?;
            Ok(0)
        }
    }
}

fn predict(l: &Loaded) -> Result<VerdictFile, Failure> {
    let n = l.scenario.n_request;
    let file = match &l.problem {
        Problem::Edge(c) => {
            let verdict = predict_edge(c, n)?;
            VerdictFile {
                kind: "edge".into(),
                rationality: Some(classify_angle(c.alpha, DEFAULT_DENOMINATOR_BOUND)?),
                vertex_class: None,
                trace: theorem_trace(&verdict),
                verdict,
            }
        }
        Problem::Vertex(v) => {
            let verdict = predict_vertex(v, n)?;
            VerdictFile {
                kind: "vertex".into(),
                rationality: None,
                vertex_class: Some(classify_vertex(v, DEFAULT_DENOMINATOR_BOUND)?),
                trace: theorem_trace(&verdict),
                verdict,
            }
        }
        Problem::Scatter(_) => return Err(Failure::Schema("predict needs kind = \"edge\" or \"vertex\"".into())),
    };
    log::info!("verdict: order {}", file.verdict.order);
    Ok(file)
}

fn oracle(l: &Loaded, verdict: &VanishingVerdict) -> Result<(OracleReport, Agreement), Failure> {
    let corner = match &l.problem {
        Problem::Edge(c) => Corner::Edge(c),
        Problem::Vertex(v) => Corner::Vertex(v),
        Problem::Scatter(_) => return Err(Failure::Schema("the oracle needs kind = \"edge\" or \"vertex\"".into())),
    };
    let report = collocation_nullspace(corner, &l.oracle)?;
    let agreement = cross_check(verdict, &report);
    Ok((report, agreement))
}

fn read_verdict(path: &Path) -> Result<VerdictFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Schema(format!("cannot read verdict {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Schema(format!("verdict {}: {e}", path.display())))
}

fn write_oracle(out: &Path, report: &OracleReport, agreement: &Agreement) -> Result<(), Failure> {
    write_json(out, "oracle.json", &OracleFile { report, agreement })?;
    let mut csv = String::from("index,sigma\n");
    for (i, s) in report.singular_values.iter().enumerate() {
        csv.push_str(&format!("{i},{s:.17e}\n"));
    }
    write_text(out, "spectrum.csv", &csv)
}

fn scatter(p: &ScatterProblem, seed: u64, out: &Path) -> Result<(), Failure> {
    let cfg = cornerwave::scatter::DemoConfig { seed, ..p.demo };
    let Some(b) = &p.b else {
        return forward(p, &cfg.mfs, &SphereGrid::new(cfg.grid_theta, cfg.grid_phi), out);
    };
    let report = uniqueness_demo(&p.a, b, p.k, p.d1, p.d2, &cfg)?;
    log::info!("far-field distances {:?}, tolerance {:.3e}", report.far_field_distance, report.tolerance);
    let labels = [("A", 1), ("A", 2), ("B", 1), ("B", 2)];
    write_text(out, "farfield.csv", &far_field_csv(labels.iter().copied().zip(&report.far_fields)))?;
    write_json(out, "demo.json", &report)?;
    println!("{}", report.conclusion);
    Ok(())
}

fn forward(p: &ScatterProblem, mfs: &MfsConfig, grid: &SphereGrid, out: &Path) -> Result<(), Failure> {
    let coarse = MfsConfig { sources: mfs.sources / 2, ..*mfs };
    let mut fields = Vec::new();
    let mut residuals = [0.0; 2];
    let mut tolerance: f64 = 0.0;
    let mut series_error: Option<f64> = None;
    for (i, d) in [p.d1, p.d2].into_iter().enumerate() {
        let inc = IncidentWave::new(p.k, d)?;
        let fine = solve_forward(&p.a, &inc, mfs)?;
        let rough = solve_forward(&p.a, &inc, &coarse)?;
        let ff = fine.far_field(&grid.directions);
        tolerance = tolerance.max(grid.relative_distance(&ff.values, &rough.far_field(&grid.directions).values));
        residuals[i] = fine.residual;
        if let Some((c, r)) = p.ball {
            // Translating the ball by c multiplies its far field by e^{ik(d - x̂)·c}.
            let exact = grid
                .directions
                .iter()
                .map(|x| {
                    let phase = Complex64::new(0.0, p.k * (d - x).dot(&c)).exp();
                    Ok(phase * sound_soft_ball_far_field(p.k, r, &d, x, series_terms(p.k * r))?)
                })
                .collect::<cornerwave::Result<Vec<_>>>()?;
            let e = grid.relative_distance(&exact, &ff.values);
            series_error = Some(series_error.map_or(e, |s| s.max(e)));
        }
        fields.push(ff);
    }
    let labels = [("A", 1), ("A", 2)];
    write_text(out, "farfield.csv", &far_field_csv(labels.iter().copied().zip(&fields)))?;
    let report = ForwardReport {
        k: p.k,
        directions: [p.d1.into(), p.d2.into()],
        residuals,
        tolerance,
        series_error,
    };
    write_json(out, "demo.json", &report)?;
    match series_error {
        Some(e) => println!("far-field error against the series solution: {e:.3e}"),
        None => println!("far-field self-convergence: {tolerance:.3e}"),
    }
    Ok(())
}

fn far_field_csv<'a>(fields: impl Iterator<Item = ((&'static str, usize), &'a FarField)>) -> String {
    let mut s = String::from("obstacle,incident,theta,phi,re,im\n");
    for ((name, inc), ff) in fields {
        for line in ff.to_csv().lines().skip(1) {
            s.push_str(&format!("{name},{inc},{line}\n"));
        }
    }
    s
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).context("serialising report")?;
    text.push('\n');
    write_text(out, name, &text)
}

fn write_text(out: &Path, name: &str, text: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}
