//! The `toric` command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 unsupported input (incomplete
//! fan), 3 internal assertion failure, 4 verification mismatch.
//!
//! Fan files are JSON objects
//! `{"dim": 2, "rays": [[1,0],[0,1],[-1,-2]], "max_cones": [[0,1],[1,2],[2,0]], "name": "P(1,1,2)"}`
//! where `name` is optional and the ray order fixes the index `tau` used by
//! divisors, charges and cone labels. Divisor files are `{"coeffs": [0,0,1]}`,
//! one coefficient per ray. All numbers are printed exactly, as integers or `p/q`.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::chow::{ChowClass, ChowError, Coefficient};
use crate::fan::{ConeKey, Fan, FanError};
use crate::io::{DivisorFile, FanFile, FileError};
use crate::linalg::Rational;
use crate::polytope::{self, PolytopeError};
use crate::riemann_roch::{self, Divisor, RrError, ToddReport};
use crate::stabilizers::support_set;

#[derive(Debug, Parser)]
#[command(name = "toric", version, about = "Exact Todd classes of simplicial toric varieties")]
pub struct Cli {
    /// Skip the pairwise cone intersection check.
    #[arg(long, global = true)]
    pub trust_fan: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a fan file and list every violation.
    Validate { fan: String },
    /// Multiplicities, smoothness, completeness and the stabilizer elements.
    Info { fan: String },
    /// The Todd class in the cone basis, degree by degree.
    Todd {
        fan: String,
        #[arg(long)]
        json: bool,
        /// Also print each group element's contribution.
        #[arg(long)]
        verbose: bool,
    },
    /// Euler characteristic of O(nD).
    Chi {
        fan: String,
        #[command(flatten)]
        divisor: DivisorArgs,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        scale: i64,
        #[arg(long)]
        json: bool,
    },
    /// Table of chi(nD) for n = 0..=K.
    Ehrhart {
        fan: String,
        #[command(flatten)]
        divisor: DivisorArgs,
        #[arg(long = "max-n")]
        max_n: u32,
        /// Compare every row with a lattice point count.
        #[arg(long)]
        compare_count: bool,
        #[arg(long)]
        json: bool,
    },
    /// Lattice points of the dilated divisor polytope.
    Count {
        fan: String,
        #[command(flatten)]
        divisor: DivisorArgs,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        scale: i64,
        /// Count interior points only.
        #[arg(long)]
        interior: bool,
    },
}

#[derive(Debug, Args)]
pub struct DivisorArgs {
    /// Divisor file aligned with the fan's rays.
    #[arg(long)]
    pub divisor: String,
}

/// What a command printed and how it ended.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure::new(EXIT_INVALID, e.to_string())
    }
}

impl From<FanError> for Failure {
    fn from(e: FanError) -> Self {
        Failure::new(EXIT_INVALID, e.to_string())
    }
}

impl From<ChowError> for Failure {
    fn from(e: ChowError) -> Self {
        let code = match e {
            ChowError::NotComplete => EXIT_UNSUPPORTED,
            ChowError::Fan(_) => EXIT_INVALID,
            ChowError::MixedDegree => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<RrError> for Failure {
    fn from(e: RrError) -> Self {
        match e {
            RrError::Chow(c) => c.into(),
            RrError::Fan(f) => f.into(),
            RrError::DivisorLength { .. } => Failure::new(EXIT_INVALID, e.to_string()),
            RrError::NotSmooth => Failure::new(EXIT_UNSUPPORTED, e.to_string()),
            RrError::Cyclo(_) | RrError::NotRational(_) => Failure::new(EXIT_INTERNAL, e.to_string()),
        }
    }
}

impl From<PolytopeError> for Failure {
    fn from(e: PolytopeError) -> Self {
        let code = match e {
            PolytopeError::NotComplete | PolytopeError::Overflow => EXIT_UNSUPPORTED,
            PolytopeError::DivisorLength { .. } => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

/// Runs one command without touching the process state.
pub fn run(cli: &Cli) -> Outcome {
    let mut out = Outcome::default();
    let result = match &cli.command {
        Command::Validate { fan } => validate(fan, cli.trust_fan, &mut out),
        Command::Info { fan } => load_fan(fan, cli.trust_fan).map(|f| info(&f, &mut out)),
        Command::Todd { fan, json, verbose } => load_fan(fan, cli.trust_fan)
            .and_then(|f| todd(&f, *json, *verbose, &mut out)),
        Command::Chi { fan, divisor, scale, json } => load_pair(fan, &divisor.divisor, cli.trust_fan)
            .and_then(|(f, d)| chi(&f, &d, *scale, *json, &mut out)),
        Command::Ehrhart { fan, divisor, max_n, compare_count, json } => {
            load_pair(fan, &divisor.divisor, cli.trust_fan)
                .and_then(|(f, d)| ehrhart(&f, &d, *max_n, *compare_count, *json, &mut out))
        }
        Command::Count { fan, divisor, scale, interior } => load_pair(fan, &divisor.divisor, cli.trust_fan)
            .and_then(|(f, d)| count(&f, &d, *scale, *interior, &mut out)),
    };
    if let Err(f) = result {
        out.code = f.code;
        writeln!(out.stderr, "error: {}", f.message).unwrap();
    }
    out
}

fn load_fan(path: &str, trusted: bool) -> Result<Fan, Failure> {
    Ok(FanFile::read(path)?.to_fan(trusted)?)
}

fn load_pair(fan: &str, divisor: &str, trusted: bool) -> Result<(Fan, Divisor), Failure> {
    let fan = load_fan(fan, trusted)?;
    let d = DivisorFile::read(divisor)?.to_divisor(&fan)?;
    Ok((fan, d))
}

fn require_complete(fan: &Fan) -> Result<(), Failure> {
    if fan.is_complete() {
        Ok(())
    } else {
        Err(ChowError::NotComplete.into())
    }
}

fn validate(path: &str, trusted: bool, out: &mut Outcome) -> Result<(), Failure> {
    let report = FanFile::read(path)?.validate(!trusted);
    writeln!(out.stdout, "{report}").unwrap();
    if !report.is_valid() {
        out.code = EXIT_INVALID;
    }
    Ok(())
}

fn cone_label(cone: &[usize]) -> String {
    if cone.is_empty() {
        return "X".into();
    }
    let idx: Vec<String> = cone.iter().map(usize::to_string).collect();
    format!("V({})", idx.join(","))
}

fn info(fan: &Fan, out: &mut Outcome) {
    let s = &mut out.stdout;
    if let Some(n) = fan.name() {
        writeln!(s, "name: {n}").unwrap();
    }
    writeln!(s, "dim: {}", fan.dim()).unwrap();
    writeln!(s, "rays: {}", fan.num_rays()).unwrap();
    for (i, r) in fan.rays().iter().enumerate() {
        writeln!(s, "  {i}: {r:?}").unwrap();
    }
    writeln!(s, "maximal cones: {}", fan.max_cones().len()).unwrap();
    for c in fan.max_cones() {
        let m = fan.multiplicity(c).expect("maximal cone");
        writeln!(s, "  {c:?} multiplicity {m}").unwrap();
    }
    writeln!(s, "smooth: {}", fan.is_smooth()).unwrap();
    writeln!(s, "complete: {}", fan.is_complete()).unwrap();
    let g = support_set(fan);
    writeln!(s, "|G_Sigma|: {} (conductor {})", g.len(), g.conductor()).unwrap();
    for e in g.elements() {
        writeln!(s, "  {e} order {}", e.order()).unwrap();
    }
}

fn write_degrees<C: Coefficient + std::fmt::Display>(s: &mut String, indent: &str, class: &ChowClass<C>, d: usize) {
    for k in 0..=d {
        let terms: Vec<String> = class
            .component(k)
            .terms()
            .iter()
            .map(|(cone, c)| format!("{}: {c}", cone_label(cone)))
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(", ") };
        writeln!(s, "{indent}degree {k}: {body}").unwrap();
    }
}

fn todd_json(report: &ToddReport) -> Value {
    let mut map = Map::new();
    for (k, comp) in report.components.iter().enumerate() {
        let rows: Vec<Value> = comp
            .terms()
            .iter()
            .map(|(cone, c): (&ConeKey, &Rational)| json!({"cone": cone, "coeff": c.to_string()}))
            .collect();
        map.insert(k.to_string(), Value::Array(rows));
    }
    Value::Object(map)
}

fn todd(fan: &Fan, json: bool, verbose: bool, out: &mut Outcome) -> Result<(), Failure> {
    require_complete(fan)?;
    let report = riemann_roch::todd_class(fan)?;
    let s = &mut out.stdout;
    if json {
        writeln!(s, "{}", serde_json::to_string_pretty(&todd_json(&report)).unwrap()).unwrap();
        return Ok(());
    }
    write_degrees(s, "", &report.total(), report.dim);
    writeln!(s, "integral: {}", report.integral).unwrap();
    if verbose {
        writeln!(
            s,
            "contributions ({} elements, coefficients in Q[z]/Phi_{}(z)):",
            report.contributions.len(),
            report.conductor
        )
        .unwrap();
        for c in &report.contributions {
            writeln!(s, "element {} order {}:", c.element, c.element.order()).unwrap();
            write_degrees(s, "  ", &c.assembled, report.dim);
        }
    }
    Ok(())
}

fn integer_chi(fan: &Fan, d: &Divisor, n: i64) -> Result<Rational, Failure> {
    let chi = riemann_roch::chi_twisted(fan, d, n)?;
    if !chi.is_integer() {
        return Err(Failure::new(EXIT_INTERNAL, format!("chi(O({n}D)) = {chi} is not an integer")));
    }
    Ok(chi)
}

fn chi(fan: &Fan, d: &Divisor, n: i64, json: bool, out: &mut Outcome) -> Result<(), Failure> {
    require_complete(fan)?;
    let chi = integer_chi(fan, d, n)?;
    if json {
        writeln!(out.stdout, "{}", json!({"chi": chi.to_string()})).unwrap();
    } else {
        writeln!(out.stdout, "{chi}").unwrap();
    }
    Ok(())
}

fn polynomial_string(p: &[Rational]) -> String {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
        .map(|(k, c)| {
            let power = match k {
                0 => return format!("{c}"),
                1 => "n".to_string(),
                _ => format!("n^{k}"),
            };
            if num_traits::One::is_one(c) {
                power
            } else {
                format!("({c}){power}")
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn ehrhart(
    fan: &Fan,
    d: &Divisor,
    max_n: u32,
    compare: bool,
    json: bool,
    out: &mut Outcome,
) -> Result<(), Failure> {
    require_complete(fan)?;
    let result = riemann_roch::ehrhart(fan, d, max_n)?;
    if let Some((n, c)) = result.table.iter().find(|(_, c)| !c.is_integer()) {
        return Err(Failure::new(EXIT_INTERNAL, format!("chi(O({n}D)) = {c} is not an integer")));
    }
    let compare = compare && {
        let nef = polytope::is_nef(fan, d);
        if !nef {
            writeln!(out.stderr, "warning: divisor is not nef; count comparison skipped").unwrap();
        }
        nef
    };
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut mismatch = false;
    for (n, c) in &result.table {
        let mut row = Map::new();
        row.insert("n".into(), json!(n));
        row.insert("chi".into(), json!(c.to_string()));
        write!(text, "{n} {c}").unwrap();
        if compare {
            let count = polytope::count_dilate(fan, d, *n, false)?;
            let ok = Rational::from_integer(count.into()) == *c;
            mismatch |= !ok;
            row.insert("count".into(), json!(count));
            row.insert("match".into(), json!(ok));
            write!(text, " {count} {}", if ok { "MATCH" } else { "MISMATCH" }).unwrap();
        }
        text.push('\n');
        rows.push(Value::Object(row));
    }
    if json {
        writeln!(out.stdout, "{}", Value::Array(rows)).unwrap();
    } else {
        out.stdout.push_str(&text);
        if let Some(p) = &result.polynomial {
            writeln!(out.stdout, "polynomial: {}", polynomial_string(p)).unwrap();
        }
    }
    if mismatch {
        out.code = EXIT_MISMATCH;
    }
    Ok(())
}

fn count(fan: &Fan, d: &Divisor, n: i64, interior: bool, out: &mut Outcome) -> Result<(), Failure> {
    require_complete(fan)?;
    let c = polytope::count_dilate(fan, d, n, interior)?;
    writeln!(out.stdout, "{c}").unwrap();
    Ok(())
}
