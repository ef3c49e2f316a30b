//! The `fquad` command line.
//!
//! Spaces are given as inline block sums (`H0+H0+x1`) or as paths to files in
//! the formats of [`crate::text`]; `-` reads standard input. Output is
//! deterministic for fixed inputs and seed.

use std::io::{Read as _, Write};
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cospancat::{compose_cospans, epsilon_lift, sigma_lift, Cospan};
use crate::error::Error;
use crate::f2::BitMatrix;
use crate::isofunc::iso_table;
use crate::qmorph::{enumerate_homs, orthogonal_group, QuadMap};
use crate::quadform::QuadSpace;
use crate::spancat::{compose_spans, SpanMorphism};
use crate::text::{self, Tokens};
use crate::verify::{self, VerifyConfig, DEFAULT_SEED};
use crate::Limits;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BOUND: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "fquad",
    version,
    about = "Quadratic spaces over F2, their span and cospan categories, and isotropic functors"
)]
pub struct Cli {
    /// Enumeration bound on total ambient dimension (apex bound is two more).
    #[arg(long, global = true, value_name = "N")]
    pub bound: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the isometry class of each space.
    Classify {
        #[arg(required = true)]
        spaces: Vec<String>,
    },
    /// List every morphism V → W.
    EnumHoms { v: String, w: String },
    /// List the orthogonal group of V.
    OrthGroup { v: String },
    /// Compose two span files, first then second.
    ComposeSpan { first: String, second: String },
    /// Compose two cospan files, first then second.
    ComposeCospan { first: String, second: String },
    /// Build a cospan whose ε-image is the given linear map.
    ///
    /// The input holds the spaces V and W followed by the matrix
    /// (dim W rows, dim V columns).
    EpsilonLift { input: String },
    /// Build a cospan whose σ-image is the given span.
    SigmaLift { input: String },
    /// Dimensions of Q, iso and K and the matrix dim Hom(iso_V, iso_W).
    IsoTable {
        /// Objects; defaults to 0, x0, x1, H0, H1.
        spaces: Vec<String>,
    },
    /// Run the acceptance suites.
    Verify {
        /// List the suites instead of running them.
        #[arg(long)]
        list: bool,
        /// Run only the named suite (repeatable).
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<String>,
    },
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_USAGE,
        Error::BoundExceeded { .. } => EXIT_BOUND,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut buf = String::new();
    let result = match &cli.command {
        Command::Verify { list, suites } => return run_verify(cli, *list, suites, out, err),
        cmd => execute(cli, cmd, &mut buf),
    };
    match result {
        Ok(()) => {
            if out.write_all(buf.as_bytes()).is_err() {
                return EXIT_INVALID;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "fquad: {e}");
            exit_code(&e)
        }
    }
}

fn limits(cli: &Cli) -> Limits {
    cli.bound.map(Limits::with_bound).unwrap_or_default()
}

fn read_input(arg: &str) -> Result<String, Error> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("reading standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))
}

/// A file path, `-`, or an inline descriptor.
fn space_arg(arg: &str) -> Result<QuadSpace, Error> {
    if arg == "-" || Path::new(arg).is_file() {
        text::parse_space_any(&read_input(arg)?)
    } else {
        text::parse_descriptor(arg)
    }
}

fn space_json(s: &QuadSpace) -> Value {
    let rows: Vec<String> = text::format_space(s).lines().map(str::to_string).collect();
    json!({
        "dim": s.dim(),
        "gram": rows[1..=s.dim()],
        "diag": rows[s.dim() + 1],
        "class": s.iso_class().to_string(),
    })
}

fn matrix_json(m: &BitMatrix) -> Value {
    let mut s = String::new();
    text::write_matrix(&mut s, m);
    json!(s.lines().collect::<Vec<_>>())
}

fn map_line(f: &QuadMap) -> String {
    let mut s = String::new();
    text::write_matrix(&mut s, &f.matrix());
    s.lines().collect::<Vec<_>>().join(" ")
}

fn push_json(buf: &mut String, v: Value) {
    buf.push_str(&v.to_string());
    buf.push('\n');
}

fn cospan_out(cli: &Cli, t: &Cospan, buf: &mut String) {
    match cli.format {
        Format::Text => text::write_cospan(buf, t),
        Format::JsonLines => push_json(
            buf,
            json!({
                "dom": space_json(t.dom()),
                "cod": space_json(t.cod()),
                "apex": space_json(t.apex()),
                "left": matrix_json(&t.left().matrix()),
                "right": matrix_json(&t.right().matrix()),
            }),
        ),
    }
}

fn span_out(cli: &Cli, s: &SpanMorphism, buf: &mut String) {
    match cli.format {
        Format::Text => text::write_span(buf, s),
        Format::JsonLines => {
            let (f, g) = s.legs();
            push_json(
                buf,
                json!({
                    "dom": space_json(s.dom()),
                    "cod": space_json(s.cod()),
                    "middle": space_json(f.dom()),
                    "left": matrix_json(&f.matrix()),
                    "right": matrix_json(&g.matrix()),
                }),
            )
        }
    }
}

fn maps_out(cli: &Cli, label: &str, maps: &[QuadMap], buf: &mut String) {
    match cli.format {
        Format::Text => {
            buf.push_str(&format!(
                "# {label}: {} maps, one matrix per line, rows separated by spaces\n",
                maps.len()
            ));
            for f in maps {
                buf.push_str(&map_line(f));
                buf.push('\n');
            }
        }
        Format::JsonLines => {
            for (i, f) in maps.iter().enumerate() {
                push_json(buf, json!({"index": i, "matrix": matrix_json(&f.matrix())}));
            }
        }
    }
}

fn execute(cli: &Cli, cmd: &Command, buf: &mut String) -> Result<(), Error> {
    let limits = limits(cli);
    match cmd {
        Command::Classify { spaces } => {
            for arg in spaces {
                let c = space_arg(arg)?.iso_class();
                match cli.format {
                    Format::Text => buf.push_str(&format!("{arg}\t{c}\n")),
                    Format::JsonLines => push_json(
                        buf,
                        json!({"input": arg, "class": c.to_string(), "dim": c.dim, "rad_dim": c.rad_dim,
                               "rad_type": c.rad_type, "arf": c.arf}),
                    ),
                }
            }
        }
        Command::EnumHoms { v, w } => {
            let (v, w) = (space_arg(v)?, space_arg(w)?);
            let homs = enumerate_homs(&v, &w, &limits)?;
            let label = format!("Hom({}, {})", v.iso_class(), w.iso_class());
            maps_out(cli, &label, &homs, buf);
        }
        Command::OrthGroup { v } => {
            let v = space_arg(v)?;
            let group = orthogonal_group(&v, &limits)?;
            maps_out(cli, &format!("O({})", v.iso_class()), &group, buf);
        }
        Command::ComposeSpan { first, second } => {
            let s1 = text::parse_span(&read_input(first)?)?;
            let s2 = text::parse_span(&read_input(second)?)?;
            span_out(cli, &compose_spans(&s1, &s2)?, buf);
        }
        Command::ComposeCospan { first, second } => {
            let t1 = text::parse_cospan(&read_input(first)?)?;
            let t2 = text::parse_cospan(&read_input(second)?)?;
            cospan_out(cli, &compose_cospans(&t1, &t2)?, buf);
        }
        Command::EpsilonLift { input } => {
            let data = read_input(input)?;
            let mut tokens = Tokens::new(&data);
            let v = tokens.space()?;
            let w = tokens.space()?;
            let f = tokens.matrix(w.dim(), v.dim())?;
            tokens.finish()?;
            cospan_out(cli, &epsilon_lift(&f, &v, &w)?, buf);
        }
        Command::SigmaLift { input } => {
            let s = text::parse_span(&read_input(input)?)?;
            cospan_out(cli, &sigma_lift(&s)?, buf);
        }
        Command::IsoTable { spaces } => {
            let objects: Vec<QuadSpace> = if spaces.is_empty() {
                ["0", "x0", "x1", "H0", "H1"]
                    .iter()
                    .map(|d| text::parse_descriptor(d))
                    .collect::<Result<_, _>>()?
            } else {
                spaces
                    .iter()
                    .map(|a| space_arg(a))
                    .collect::<Result<_, _>>()?
            };
            let table = iso_table(&objects, &limits)?;
            match cli.format {
                Format::Text => {
                    buf.push_str("# V\tX\tdim Q\tdim iso\tdim K\n");
                    for &(i, j, q, iso, k) in &table.dims {
                        buf.push_str(&format!(
                            "{}\t{}\t{q}\t{iso}\t{k}\n",
                            table.objects[i], table.objects[j]
                        ));
                    }
                    buf.push_str(&format!(
                        "# dim Hom(iso_V, iso_W) over {}\n",
                        table.objects.join(", ")
                    ));
                    for row in &table.hom {
                        let cells: Vec<String> = row.iter().map(usize::to_string).collect();
                        buf.push_str(&cells.join(" "));
                        buf.push('\n');
                    }
                }
                Format::JsonLines => {
                    for &(i, j, q, iso, k) in &table.dims {
                        push_json(
                            buf,
                            json!({"v": table.objects[i], "x": table.objects[j], "dim_q": q, "dim_iso": iso,
                                   "dim_k": k, "hom_iso": table.hom[i][j]}),
                        );
                    }
                }
            }
        }
        Command::Verify { .. } => unreachable!("handled by run_verify"),
    }
    Ok(())
}

fn run_verify(
    cli: &Cli,
    list: bool,
    names: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if list {
        for s in verify::suites() {
            let _ = writeln!(out, "{}\t{}", s.name, s.summary);
        }
        return EXIT_OK;
    }
    let selected: Vec<&verify::Suite> = if names.is_empty() {
        verify::suites().iter().collect()
    } else {
        let mut chosen = Vec::new();
        for n in names {
            match verify::find_suite(n) {
                Some(s) => chosen.push(s),
                None => {
                    let _ = writeln!(
                        err,
                        "fquad: unknown suite `{n}` (see `fquad verify --list`)"
                    );
                    return EXIT_USAGE;
                }
            }
        }
        chosen
    };
    let config = VerifyConfig {
        seed: cli.seed,
        limits: limits(cli),
    };
    let outcomes = verify::run_suites(&selected, &config);
    let mut text = String::new();
    for o in &outcomes {
        match cli.format {
            Format::Text => {
                text.push_str(&o.summary_line());
                text.push('\n');
                for r in o
                    .records
                    .iter()
                    .filter(|r| r.status == verify::Status::Fail)
                {
                    text.push_str(&format!(
                        "      {}: expected {}, got {}\n",
                        r.case, r.expected, r.actual
                    ));
                }
            }
            Format::JsonLines => {
                for r in &o.records {
                    text.push_str(&serde_json::to_string(r).expect("records serialize"));
                    text.push('\n');
                }
            }
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    if cli.format == Format::Text {
        text.push_str(&format!("{passed} of {} suites passed\n", outcomes.len()));
    }
    let _ = out.write_all(text.as_bytes());
    let errors: Vec<&Error> = outcomes.iter().filter_map(|o| o.error.as_ref()).collect();
    for o in outcomes.iter().filter(|o| !o.passed()) {
        match &o.error {
            Some(e) => {
                let _ = writeln!(err, "fquad: suite {} stopped: {e}", o.name);
            }
            None => {
                let _ = writeln!(err, "fquad: suite {} violates the {}", o.name, o.theorem);
            }
        }
    }
    if outcomes.iter().any(|o| o.error.is_none() && !o.passed()) {
        EXIT_VIOLATION
    } else if let Some(e) = errors.first() {
        exit_code(e)
    } else {
        EXIT_OK
    }
}
