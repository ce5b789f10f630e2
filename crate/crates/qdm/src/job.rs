//! One invocation: load the input, run the requested stages and render.

use std::path::PathBuf;

use qdm_core::arith::Laurent;
use qdm_core::dmodule::{birkhoff_factorize, canonical_connection, connection_from_s, ConnectionSet};
use qdm_core::floer::FloerModel;
use qdm_core::mirror::check_nef;
use qdm_core::pipeline::{Pipeline, Status};
use qdm_core::render::{render_laurent, render_scalar};
use qdm_core::ring::{CohoClass, CohomologyRing};
use qdm_core::series::{Cutoff, MatrixSeries, ScalarSeries};
use qdm_core::toric::{validate_fan, validate_gale, LambdaMode, ReportEntry, ToricSuperspace};

use crate::error::{CliError, Result};
use crate::input::{parse_cutoff, InputFile};
use crate::output::{Document, Format};
use crate::parallel::s_inverse_parallel;

/// Box used when neither the command line nor the input file sets one.
pub const DEFAULT_ORDER: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Check the fan, the Gale presentation and the bundle weights.
    Validate,
    /// Cohomology basis, relations, cup products and pairing.
    Ring,
    /// `S⁻¹(1)`, the J-function without its exponential prefactor.
    Jfun,
    /// Picard–Fuchs relations for the unit curve classes.
    Pf,
    /// Connection matrices of the Floer frame.
    Connection,
    /// Birkhoff factors and the gauge-fixed connection.
    Canonical,
    /// Mirror transformation and the connection in flat coordinates.
    Mirror,
    /// Full pipeline ending in quantum multiplication tables.
    Qh,
    /// Poincaré pairing of the superspace and the Floer pairing.
    Pairing,
    /// Run the invariant suite.
    Check,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobConfig {
    pub input: PathBuf,
    pub command: Command,
    /// Overrides the cutoff of the input file, as `3,4` or `a=3,b=4`.
    pub cutoff: Option<String>,
    /// Overrides the lambda mode of the input file.
    pub lambda: Option<LambdaMode>,
    pub format: Format,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(config: &JobConfig) -> Outcome {
    let mut doc = Document::default();
    let result = execute(config, &mut doc);
    let stdout = doc.render(config.format);
    match result {
        Ok(code) => Outcome { code, stdout, stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout, stderr: format!("error: {e}\n") },
    }
}

struct Job {
    input: InputFile,
    cutoff: Cutoff,
    mode: LambdaMode,
    threads: usize,
}

impl Job {
    fn new(config: &JobConfig) -> Result<Self> {
        let input = InputFile::load(&config.input)?;
        let cutoff = match (&config.cutoff, &input.cutoff) {
            (Some(text), _) => parse_cutoff(text, input.rank())?,
            (None, Some(c)) => c.clone(),
            (None, None) => Cutoff::uniform(input.rank(), DEFAULT_ORDER),
        };
        let mode = config.lambda.or(input.lambda_mode).unwrap_or_default();
        Ok(Self { input, cutoff, mode, threads: config.threads })
    }

    fn space(&self) -> Result<ToricSuperspace> {
        let space = self.input.space()?;
        if self.cutoff.rank() != space.rank() {
            return Err(CliError::Parse(format!("cutoff needs {} entries", space.rank())));
        }
        Ok(space)
    }

    fn s_inverse(&self, space: &ToricSuperspace, ring: &CohomologyRing) -> Result<MatrixSeries> {
        let fm = FloerModel::new(space, ring, self.mode);
        Ok(s_inverse_parallel(&fm, &self.cutoff, self.threads)?)
    }

    fn pipeline(&self) -> Result<Pipeline> {
        let space = self.space()?;
        let ring = CohomologyRing::build(&space)?;
        let s_inv = self.s_inverse(&space, &ring)?;
        Ok(Pipeline::from_s_inverse(space, ring, self.cutoff.clone(), self.mode, s_inv)?)
    }
}

fn execute(config: &JobConfig, doc: &mut Document) -> Result<i32> {
    let job = Job::new(config)?;
    if config.command == Command::Validate {
        return Ok(validate(&job.input, doc));
    }
    let cutoff: Vec<String> = job.cutoff.orders().iter().map(u32::to_string).collect();
    doc.value("cutoff", "cutoff", cutoff.join(","));
    doc.value("lambda_mode", "lambda mode", if job.mode == LambdaMode::Zero { "zero" } else { "symbolic" });
    match config.command {
        Command::Validate => unreachable!(),
        Command::Ring => ring(&job, doc),
        Command::Jfun => jfun(&job, doc),
        Command::Pf => pf(&job, doc),
        Command::Connection => connection(&job, doc),
        Command::Canonical => canonical(&job, doc),
        Command::Mirror => mirror(&job, doc, false),
        Command::Qh => mirror(&job, doc, true),
        Command::Pairing => pairing(&job, doc),
        Command::Check => check(&job, doc),
    }
}

fn labels(ring: &CohomologyRing) -> Vec<String> {
    (0..ring.dim()).map(|i| ring.basis_name(i)).collect()
}

fn outcome_text(entry: &ReportEntry) -> String {
    match &entry.outcome {
        Ok(()) => "pass".into(),
        Err(e) => format!("fail: {e}"),
    }
}

fn validate(input: &InputFile, doc: &mut Document) -> i32 {
    let mut report = validate_fan(&input.rays, &input.max_cones);
    if report.is_pass() {
        report.extend(validate_gale(&input.rays, &input.max_cones, &input.m));
    }
    for entry in &report.entries {
        doc.value(format!("check[{}]", entry.name), entry.name, outcome_text(entry));
    }
    if let Some(e) = report.first_error() {
        return CliError::Core(e.clone()).exit_code();
    }
    match input.space() {
        Err(e) => {
            doc.value("check[bundles]", "bundles", format!("fail: {e}"));
            e.exit_code()
        }
        Ok(space) => {
            doc.value("check[bundles]", "bundles", "pass");
            doc.value("dimension", "dimension", space.dim().to_string());
            doc.value("rank", "rank", space.rank().to_string());
            let deg: Vec<String> = space.degree_vector().iter().map(i64::to_string).collect();
            doc.value("degree_q", "degrees of q", deg.join(","));
            0
        }
    }
}

fn render_class(class: &CohoClass, names: &[String]) -> String {
    let coeffs: Vec<String> = class.iter().map(|c| render_laurent(&Laurent::from_lambda_poly(c.clone()))).collect();
    combination(&coeffs, names)
}

/// `Σ c_k T_k` with each coefficient already rendered.
fn combination(coeffs: &[String], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if c == "0" {
            continue;
        }
        let compound = c[1..].contains(" + ") || c[1..].contains(" - ");
        let (neg, body) = match c.strip_prefix('-') {
            Some(rest) if !compound => (true, rest.to_string()),
            _ if compound => (false, format!("({c})")),
            _ => (false, c.clone()),
        };
        let term = match (body.as_str(), name.as_str()) {
            (b, "1") => b.to_string(),
            ("1", n) => n.to_string(),
            (b, n) => format!("{b}*{n}"),
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn ring(job: &Job, doc: &mut Document) -> Result<i32> {
    let space = job.space()?;
    let ring = CohomologyRing::build(&space)?;
    let names = labels(&ring);
    let degrees = ring.basis_degrees();
    doc.grid(
        "basis",
        "basis",
        (1..=ring.dim()).map(|i| format!("T{i}")).collect(),
        vec!["class".into(), "degree".into()],
        names.iter().zip(&degrees).map(|(n, d)| vec![n.clone(), d.to_string()]).collect(),
    );
    let p: Vec<String> = (1..=space.rank()).map(|a| format!("p{a}")).collect();
    for (i, row) in space.gale().iter().enumerate() {
        let coeffs: Vec<String> = row.iter().map(i64::to_string).collect();
        doc.value(format!("linear[{}]", i + 1), format!("u{}", i + 1), combination(&coeffs, &p));
    }
    for (k, face) in space.minimal_nonfaces().iter().enumerate() {
        let prod: Vec<String> = face.iter().map(|i| format!("u{}", i + 1)).collect();
        doc.value(format!("nonface[{}]", k + 1), format!("relation {}", k + 1), format!("{} = 0", prod.join("*")));
    }
    for a in 0..space.rank() {
        let m = MatrixSeries::constant(job.cutoff.clone(), ring.cup_matrix(a));
        doc.matrix(format!("cup.{}", a + 1), format!("cup product by p{}", a + 1), &m, &names);
    }
    doc.value("euler", "Euler class of the bundle", render_class(&ring.euler_class(job.mode), &names));
    let g = MatrixSeries::constant(job.cutoff.clone(), ring.pairing_matrix(job.mode));
    doc.matrix("pairing", "twisted Poincare pairing", &g, &names);
    Ok(0)
}

fn jfun(job: &Job, doc: &mut Document) -> Result<i32> {
    let space = job.space()?;
    let ring = CohomologyRing::build(&space)?;
    let s_inv = job.s_inverse(&space, &ring)?;
    let j = s_inv.column(0);
    for (i, name) in labels(&ring).iter().enumerate() {
        doc.value(format!("jfun[{}]", i + 1), format!("S^-1(1) along {name}"), render_scalar(&j.component(i)));
    }
    Ok(0)
}

fn pf(job: &Job, doc: &mut Document) -> Result<i32> {
    let space = job.space()?;
    let ring = CohomologyRing::build(&space)?;
    let fm = FloerModel::new(&space, &ring, job.mode);
    let r = space.rank();
    let mut names: Vec<String> = (1..=r).map(|a| format!("P{a}")).collect();
    names.extend(["h".to_string(), "lambda".to_string()]);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut code = 0;
    for a in 0..r {
        let mut d = vec![0i64; r];
        d[a] = 1;
        let rel = fm.picard_fuchs_relation(&d);
        let text =
            format!("({}) Q{}^*Delta = ({}) Delta", rel.left.poly.render(&refs), a + 1, rel.right.poly.render(&refs));
        doc.value(format!("pf[{}]", a + 1), format!("relation for q{}", a + 1), text);
        let check = fm.verify_pf(&rel, &job.cutoff)?;
        let status = match &check.first_mismatch {
            None => "pass".to_string(),
            Some(e) => format!("fail at q^{e}"),
        };
        if !check.holds {
            code = 3;
        }
        doc.value(format!("pf[{}].verified", a + 1), format!("relation {} under localization", a + 1), status);
    }
    Ok(code)
}

fn connection_matrices(doc: &mut Document, prefix: &str, title: &str, conn: &ConnectionSet, names: &[String]) {
    for (a, om) in conn.omegas.iter().enumerate() {
        doc.matrix(format!("{prefix}.{}", a + 1), format!("{title} {}", a + 1), om, names);
    }
}

fn connection(job: &Job, doc: &mut Document) -> Result<i32> {
    let space = job.space()?;
    let ring = CohomologyRing::build(&space)?;
    let s_inv = job.s_inverse(&space, &ring)?;
    let (conn, _) = connection_from_s(&s_inv, &ring)?;
    connection_matrices(doc, "omega", "connection matrix", &conn, &labels(&ring));
    Ok(0)
}

fn canonical(job: &Job, doc: &mut Document) -> Result<i32> {
    let space = job.space()?;
    let ring = CohomologyRing::build(&space)?;
    let names = labels(&ring);
    let s_inv = job.s_inverse(&space, &ring)?;
    let (conn, s) = connection_from_s(&s_inv, &ring)?;
    let pair = birkhoff_factorize(&s, ring.dim())?;
    doc.matrix("plus", "positive Birkhoff factor S+", &pair.plus, &names);
    doc.matrix("minus", "negative Birkhoff factor S-", &pair.minus, &names);
    let hat = canonical_connection(&conn, &pair, ring.dim())?;
    connection_matrices(doc, "canonical", "canonical connection matrix", &hat, &names);
    Ok(0)
}

fn mirror(job: &Job, doc: &mut Document, tables: bool) -> Result<i32> {
    let space = job.space()?;
    check_nef(&space.degree_vector(), &CohomologyRing::build(&space)?)?;
    let p = job.pipeline()?;
    let names = labels(&p.ring);
    if tables {
        connection_matrices(doc, "omega", "connection matrix", &p.connection, &names);
        connection_matrices(doc, "canonical", "canonical connection matrix", &p.canonical, &names);
    }
    let stage = p.mirror.clone()?;
    let data = &stage.data;
    let series =
        |doc: &mut Document, key: String, title: String, s: &ScalarSeries| doc.value(key, title, render_scalar(s));
    if !tables {
        for (a, s) in data.forward_ratio()?.iter().enumerate() {
            series(doc, format!("forward_ratio.{}", a + 1), format!("q{0}/q{0}^ in flat coordinates", a + 1), s);
        }
        for (a, s) in data.inverse_ratio()?.iter().enumerate() {
            series(doc, format!("inverse_ratio.{}", a + 1), format!("q{0}^/q{0}", a + 1), s);
        }
        for (a, s) in data.delta.iter().enumerate() {
            series(doc, format!("delta.{}", a + 1), format!("log q{0} - log q{0}^", a + 1), s);
        }
        series(doc, "potential".into(), "F".into(), &data.potential);
        series(doc, "potential_flat".into(), "F in flat coordinates".into(), &data.potential_flat);
        series(doc, "gauge_factor".into(), "f".into(), &data.gauge_factor);
        series(doc, "gauge_factor_flat".into(), "f in flat coordinates".into(), &data.gauge_factor_flat);
    }
    connection_matrices(doc, "flat", "connection in flat coordinates", &stage.flat, &names);
    if tables {
        for (a, rows) in stage.table.products.iter().enumerate() {
            for (j, row) in rows.iter().enumerate() {
                let coeffs: Vec<String> = row.iter().map(render_scalar).collect();
                let key = if names[j].contains('*') {
                    format!("p{}*({})", a + 1, names[j])
                } else {
                    format!("p{}*{}", a + 1, names[j])
                };
                doc.value(format!("product[{key}]"), key, combination(&coeffs, &names));
            }
        }
        for (a, t) in stage.table.three_point.iter().enumerate() {
            let cells = t.iter().map(|row| row.iter().map(render_scalar).collect()).collect();
            doc.grid(
                format!("three_point.{}", a + 1),
                format!("<p{} o T_j, T_k>", a + 1),
                names.clone(),
                names.clone(),
                cells,
            );
        }
    } else {
        for (i, name) in names.iter().enumerate() {
            let c = stage.canonical_j.component(i);
            doc.value(format!("canonical_j[{}]", i + 1), format!("canonical J along {name}"), render_scalar(&c));
        }
    }
    Ok(0)
}

fn pairing(job: &Job, doc: &mut Document) -> Result<i32> {
    let space = job.space()?;
    let ring = CohomologyRing::build(&space)?;
    let names = labels(&ring);
    let g = ring.pairing_matrix(job.mode);
    doc.matrix("pairing", "twisted Poincare pairing", &MatrixSeries::constant(job.cutoff.clone(), g.clone()), &names);
    let fm = FloerModel::new(&space, &ring, job.mode);
    let n = ring.dim();
    let mut cells = vec![vec![String::new(); n]; n];
    let mut code = 0;
    for (i, row) in cells.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let p = fm.floer_pairing(&fm.basis_cycle(i), &fm.basis_cycle(j), &job.cutoff)?;
            if p.constant_term().cloned().unwrap_or_default() != *g.get(i, j) {
                code = 3;
            }
            *cell = render_scalar(&p);
        }
    }
    doc.grid("floer_pairing", "Floer pairing (T_i Delta, T_j Delta)", names.clone(), names, cells);
    Ok(code)
}

fn check(job: &Job, doc: &mut Document) -> Result<i32> {
    let report = job.pipeline()?.verify();
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        };
        let value = if c.detail.is_empty() { status.to_string() } else { format!("{status} ({})", c.detail) };
        doc.value(format!("check[{}]", c.name), c.name.clone(), value);
    }
    Ok(if report.all_pass() { 0 } else { 3 })
}
