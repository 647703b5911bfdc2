//! The `kval` command line: argument handling, dispatch to `kval_core`,
//! text and structured output, and session files.

pub mod session;
mod render;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use kval_core::text::{
    parse_ball_with, parse_field_with, parse_gamma, parse_series_expr_with,
    parse_series_file_with, print_ball, print_field, print_rational,
};
use kval_core::{
    classify_extremum, dist, monotone_certificate, picard_invert, residue,
    series_reversion_oracle, val, Error, FieldElem, GammaVal, PowerSeries, Result,
    DEFAULT_DEPTH,
};
use serde_json::{json, Value};

pub use session::{Binding, Session, SessionFile};

/// Version tag of the structured output schema.
pub const OUTPUT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(name = "kval", version, about = "Exact arithmetic, valuations, power series and local inversion over Q(X1, X2, ...)")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Session file to read bindings from and store them into.
    #[arg(long, global = true, value_name = "FILE")]
    session: Option<PathBuf>,
    /// Store this command's result in the session under NAME.
    #[arg(long, global = true, value_name = "NAME")]
    bind: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Canonical form of a field element.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Compare two field elements in the field order.
    Cmp {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Valuation of a field element.
    Val {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Ultrametric distance between two field elements.
    Dist {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Residue in Q of an element of the valuation ring.
    Residue {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Canonical form of a ball, or a membership test.
    Ball {
        ball: String,
        #[arg(long, allow_hyphen_values = true)]
        contains: Option<String>,
    },
    /// Power series operations.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Classify x0 as a local min, max or neither.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Try to certify that f is increasing on [a, b].
    Monotone {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Local inverse of f around x0 by fixed-point iteration, with a certificate.
    Invert {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long)]
        order: usize,
    },
    /// Local inverse by direct series reversion.
    Oracle {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long)]
        order: usize,
    },
    /// Manage session bindings.
    #[command(subcommand)]
    Session(SessionCmd),
}

#[derive(Debug, Subcommand)]
enum SeriesCmd {
    Add {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    Mul {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Derivative.
    Diff {
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// Re-expand around a new center.
    Recenter {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// f(g(z)) through the given order.
    Compose {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
        #[arg(long)]
        order: usize,
    },
    /// Value at a point, with the uncertainty bound.
    Eval {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Convergence verdict up to depth M.
    Converges {
        #[arg(allow_hyphen_values = true)]
        f: String,
        /// Overrides KVAL_DEPTH.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Supremum norm on the closed ball of the given radius.
    Norm {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        radius: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Field,
    Gamma,
    Series,
}

#[derive(Debug, Subcommand)]
enum SessionCmd {
    /// Bind NAME to a value.
    Save {
        name: String,
        #[arg(allow_hyphen_values = true)]
        value: String,
        #[arg(long, value_enum, default_value_t = Kind::Field)]
        kind: Kind,
    },
    /// Print one binding, or the whole session document.
    Load { name: Option<String> },
    /// List bindings with their kinds.
    List,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// What a successful command produced.
struct Reply {
    command: String,
    kind: &'static str,
    text: String,
    data: Value,
    stored: Stored,
}

enum Stored {
    Field(FieldElem),
    Gamma(GammaVal),
    Series(PowerSeries),
    Report,
    Nothing,
}

impl Reply {
    fn new(command: &str, kind: &'static str, text: String, data: Value, stored: Stored) -> Self {
        Reply {
            command: command.to_string(),
            kind,
            text,
            data,
            stored,
        }
    }

    fn field(command: &str, a: FieldElem) -> Self {
        let text = print_field(&a);
        Reply::new(command, "field", text.clone(), json!({ "value": text }), Stored::Field(a))
    }

    fn gamma(command: &str, g: GammaVal) -> Self {
        Reply::new(command, "gamma", g.to_string(), render::gamma_json(&g), Stored::Gamma(g))
    }

    fn series(command: &str, s: PowerSeries, var: &str) -> Self {
        let text = render::series_text(&s, var);
        Reply::new(command, "series", text, render::series_json(&s, var), Stored::Series(s))
    }

    fn report(command: &str, kind: &'static str, text: String, data: Value) -> Self {
        Reply::new(command, kind, text, data, Stored::Report)
    }

    fn binding(&self) -> Result<Binding> {
        match &self.stored {
            Stored::Field(a) => Ok(Binding::field(a)),
            Stored::Gamma(g) => Ok(Binding::gamma(g)),
            Stored::Series(s) => Binding::series(s),
            Stored::Report => Ok(Binding::Report {
                command: self.command.clone(),
                text: self.text.clone(),
                data: self.data.clone(),
            }),
            Stored::Nothing => Err(Error::Domain(format!(
                "`{}` has no result that can be bound",
                self.command
            ))),
        }
    }
}

struct Ctx {
    session: Option<SessionFile>,
    depth: u32,
}

impl Ctx {
    fn lookup(&self, name: &str) -> Option<FieldElem> {
        self.session.as_ref()?.session.field(name)
    }

    fn binding(&self, name: &str) -> Option<&Binding> {
        self.session.as_ref()?.session.get(name)
    }

    fn field(&self, src: &str) -> Result<FieldElem> {
        parse_field_with(src, &|n| self.lookup(n))
    }

    fn gamma(&self, src: &str) -> Result<GammaVal> {
        if let Some(g) = self.binding(src.trim()).and_then(Binding::as_gamma) {
            return Ok(g);
        }
        parse_gamma(src)
    }

    /// A series given as `@file`, a bound name or an expression in `z`.
    fn series(&self, src: &str) -> Result<PowerSeries> {
        if let Some(path) = src.strip_prefix('@') {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Domain(format!("reading series file {path}: {e}")))?;
            return parse_series_file_with(&text, &|n| self.lookup(n));
        }
        if let Some(s) = self.binding(src.trim()).and_then(Binding::as_series) {
            return Ok(s);
        }
        Ok(parse_series_expr_with(src, &|n| self.lookup(n))?.0)
    }

    fn session_mut(&mut self) -> Result<&mut SessionFile> {
        self.session
            .as_mut()
            .ok_or_else(|| Error::Domain("this needs a session: pass --session FILE".into()))
    }
}

/// Convergence depth from `KVAL_DEPTH`, if set.
fn env_depth() -> std::result::Result<u32, String> {
    match std::env::var("KVAL_DEPTH") {
        Err(_) => Ok(DEFAULT_DEPTH),
        Ok(s) => match s.trim().parse::<u32>() {
            Ok(d) if d >= 1 => Ok(d),
            _ => Err(format!("KVAL_DEPTH must be a positive integer, got `{s}`")),
        },
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    let format = cli.format;
    let depth = match env_depth() {
        Ok(d) => d,
        Err(msg) => return usage_error(format, &msg),
    };
    let result = execute(cli, depth);
    match (result, format) {
        (Ok(reply), Format::Text) => Outcome {
            code: 0,
            stdout: format!("{}\n", reply.text),
            stderr: String::new(),
        },
        (Ok(reply), Format::Structured) => {
            let doc = json!({
                "version": OUTPUT_VERSION,
                "status": "ok",
                "command": reply.command,
                "kind": reply.kind,
                "text": reply.text,
                "data": reply.data,
                "diagnostics": [],
            });
            Outcome {
                code: 0,
                stdout: format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")),
                stderr: String::new(),
            }
        }
        (Err(e), format) => error_outcome(format, &e),
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_parse() {
        2
    } else {
        1
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Parse(_) => "parse",
        Error::Center(_) => "center",
        Error::Convergence(_) => "convergence",
        Error::Composition(_) => "composition",
        Error::Depth(_) => "depth",
        Error::Pivot(_) => "pivot",
        Error::Internal(_) => "internal",
    }
}

fn error_outcome(format: Format, e: &Error) -> Outcome {
    let code = exit_code(e);
    match format {
        Format::Text => Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        Format::Structured => {
            let diagnostic = match e {
                Error::Parse(p) => json!({
                    "message": p.message,
                    "span": { "line": p.span.line, "column": p.span.column },
                    "expected": p.expected,
                }),
                other => json!({ "message": other.to_string() }),
            };
            let doc = json!({
                "version": OUTPUT_VERSION,
                "status": "error",
                "error": { "kind": error_kind(e), "message": e.to_string() },
                "diagnostics": [diagnostic],
            });
            Outcome {
                code,
                stdout: format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")),
                stderr: String::new(),
            }
        }
    }
}

fn usage_error(format: Format, msg: &str) -> Outcome {
    match format {
        Format::Text => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Format::Structured => {
            let doc = json!({
                "version": OUTPUT_VERSION,
                "status": "error",
                "error": { "kind": "usage", "message": msg },
                "diagnostics": [{ "message": msg }],
            });
            Outcome {
                code: 2,
                stdout: format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")),
                stderr: String::new(),
            }
        }
    }
}

fn execute(cli: Cli, depth: u32) -> Result<Reply> {
    let session = cli.session.as_deref().map(SessionFile::open).transpose()?;
    let mut ctx = Ctx { session, depth };
    let reply = dispatch(&mut ctx, cli.command)?;
    if let Some(name) = &cli.bind {
        let b = reply.binding()?;
        ctx.session_mut()?.session.insert(name, b)?;
    }
    if let Some(s) = ctx.session.as_mut() {
        s.store()?;
    }
    Ok(reply)
}

fn ordering_word(o: std::cmp::Ordering) -> (&'static str, &'static str) {
    match o {
        std::cmp::Ordering::Less => ("<", "less"),
        std::cmp::Ordering::Equal => ("=", "equal"),
        std::cmp::Ordering::Greater => (">", "greater"),
    }
}

fn dispatch(ctx: &mut Ctx, cmd: Command) -> Result<Reply> {
    match cmd {
        Command::Eval { expr } => Ok(Reply::field("eval", ctx.field(&expr)?)),
        Command::Cmp { a, b } => {
            let (a, b) = (ctx.field(&a)?, ctx.field(&b)?);
            let (sym, word) = ordering_word(a.cmp(&b));
            Ok(Reply::new("cmp", "ordering", sym.into(), json!({ "ordering": word }), Stored::Nothing))
        }
        Command::Val { a } => Ok(Reply::gamma("val", val(&ctx.field(&a)?))),
        Command::Dist { a, b } => {
            let d = dist(&ctx.field(&a)?, &ctx.field(&b)?);
            let data = json!({ "value": d.to_string(), "exponent": d.exponent() });
            Ok(Reply::new("dist", "dist", d.to_string(), data, Stored::Nothing))
        }
        Command::Residue { a } => {
            let r = residue(&ctx.field(&a)?)?;
            let text = print_rational(&r);
            let data = json!({ "value": text });
            Ok(Reply::new("residue", "field", text, data, Stored::Field(FieldElem::from_rational(r))))
        }
        Command::Ball { ball, contains } => {
            let b = parse_ball_with(&ball, &|n| ctx.lookup(n))?;
            match contains {
                None => {
                    let text = print_ball(&b);
                    Ok(Reply::new("ball", "ball", text.clone(), json!({ "value": text }), Stored::Nothing))
                }
                Some(x) => {
                    let inside = b.contains(&ctx.field(&x)?);
                    let data = json!({ "ball": print_ball(&b), "contains": inside });
                    Ok(Reply::new("ball", "bool", inside.to_string(), data, Stored::Nothing))
                }
            }
        }
        Command::Series(cmd) => series_cmd(ctx, cmd),
        Command::Classify { f, at } => {
            let (f, x0) = (ctx.series(&f)?, ctx.field(&at)?);
            let report = classify_extremum(&f, &x0)?;
            let (text, data) = render::extremum(&x0, &report);
            Ok(Reply::report("classify", "extremum", text, data))
        }
        Command::Monotone { f, a, b } => {
            let (f, a, b) = (ctx.series(&f)?, ctx.field(&a)?, ctx.field(&b)?);
            let outcome = monotone_certificate(&f, &a, &b)?;
            let (text, data) = render::monotone(&a, &b, &outcome);
            Ok(Reply::report("monotone", "monotone", text, data))
        }
        Command::Invert { f, x0, order } => {
            let (f, x0) = (ctx.series(&f)?, ctx.field(&x0)?);
            let (g, cert) = picard_invert(&f, &x0, order)?;
            let (text, mut data) = render::inversion(&g, &cert);
            data["series"] = render::series_json(&g, "y");
            Ok(Reply::new("invert", "inversion", text, data, Stored::Series(g)))
        }
        Command::Oracle { f, x0, order } => {
            let (f, x0) = (ctx.series(&f)?, ctx.field(&x0)?);
            let b = series_reversion_oracle(&f, &x0, order)?;
            let (y0, _) = f.eval(&x0)?;
            let mut coeffs = vec![x0];
            coeffs.extend(b);
            let g = PowerSeries::polynomial(y0, coeffs);
            Ok(Reply::series("oracle", g, "y"))
        }
        Command::Session(cmd) => session_cmd(ctx, cmd),
    }
}

fn series_cmd(ctx: &mut Ctx, cmd: SeriesCmd) -> Result<Reply> {
    match cmd {
        SeriesCmd::Add { f, g } => Ok(Reply::series("series add", ctx.series(&f)?.add(&ctx.series(&g)?)?, "z")),
        SeriesCmd::Mul { f, g } => Ok(Reply::series("series mul", ctx.series(&f)?.mul(&ctx.series(&g)?)?, "z")),
        SeriesCmd::Diff { f } => Ok(Reply::series("series diff", ctx.series(&f)?.derivative(), "z")),
        SeriesCmd::Recenter { f, at } => {
            let s = ctx.series(&f)?.recenter(&ctx.field(&at)?)?;
            Ok(Reply::series("series recenter", s, "z"))
        }
        SeriesCmd::Compose { f, g, order } => {
            let s = PowerSeries::compose(&ctx.series(&f)?, &ctx.series(&g)?, order)?;
            Ok(Reply::series("series compose", s, "z"))
        }
        SeriesCmd::Eval { f, at } => {
            let (value, err) = ctx.series(&f)?.eval(&ctx.field(&at)?)?;
            let mut text = print_field(&value);
            if !err.is_zero() {
                text.push_str(&format!("\nerror valuation <= {err}"));
            }
            let data = json!({ "value": print_field(&value), "error": err.to_string() });
            Ok(Reply::new("series eval", "value", text, data, Stored::Field(value)))
        }
        SeriesCmd::Converges { f, depth } => {
            let depth = depth.unwrap_or(ctx.depth);
            let verdict = ctx.series(&f)?.convergence_check(depth)?;
            let (text, data) = render::verdict(&verdict, depth);
            Ok(Reply::report("series converges", "verdict", text, data))
        }
        SeriesCmd::Norm { f, radius } => {
            let r = ctx.gamma(&radius)?;
            let (norm, attained) = ctx.series(&f)?.sup_norm_ball(&r)?;
            let mut reply = Reply::gamma("series norm", norm);
            reply.data["attained_at"] = json!(attained);
            Ok(reply)
        }
    }
}

fn session_cmd(ctx: &mut Ctx, cmd: SessionCmd) -> Result<Reply> {
    match cmd {
        SessionCmd::Save { name, value, kind } => {
            let b = match kind {
                Kind::Field => Binding::field(&ctx.field(&value)?),
                Kind::Gamma => Binding::gamma(&ctx.gamma(&value)?),
                Kind::Series => Binding::series(&ctx.series(&value)?)?,
            };
            let text = format!("{name} = {}", b.text().trim_end());
            let data = json!({ "name": name, "binding": b });
            ctx.session_mut()?.session.insert(&name, b)?;
            Ok(Reply::new("session save", "binding", text, data, Stored::Nothing))
        }
        SessionCmd::Load { name: None } => {
            let s = &ctx.session_mut()?.session;
            let doc = s.to_json();
            let data = serde_json::to_value(s).expect("session serializes");
            Ok(Reply::new("session load", "session", doc.trim_end().to_string(), data, Stored::Nothing))
        }
        SessionCmd::Load { name: Some(name) } => {
            let b = ctx
                .session_mut()?
                .session
                .get(&name)
                .cloned()
                .ok_or_else(|| Error::Domain(format!("no binding named `{name}`")))?;
            let data = json!({ "name": name, "binding": b });
            Ok(Reply::new("session load", "binding", b.text().trim_end().to_string(), data, Stored::Nothing))
        }
        SessionCmd::List => {
            let s = &ctx.session_mut()?.session;
            let lines: Vec<String> = s
                .bindings
                .iter()
                .map(|(n, b)| format!("{n}\t{}", b.kind()))
                .collect();
            let data = json!(s
                .bindings
                .iter()
                .map(|(n, b)| json!({ "name": n, "kind": b.kind() }))
                .collect::<Vec<_>>());
            Ok(Reply::new("session list", "list", lines.join("\n"), json!({ "bindings": data }), Stored::Nothing))
        }
    }
}

/// Kinds of text accepted by [`roundtrip`].
pub const CORPUS_KINDS: [&str; 6] = ["field", "gamma", "ball", "rule", "expr", "series"];

/// Parses `src` as `kind`, prints it canonically and parses that again. Returns
/// the canonical text when both parses agree and printing is a fixpoint.
pub fn roundtrip(kind: &str, src: &str) -> Result<String> {
    use kval_core::text::{
        parse_ball, parse_field, parse_rule, parse_series_expr, parse_series_file, print_rule,
        print_series_expr, print_series_file,
    };
    fn check<T: PartialEq>(a: T, b: T, text: String, again: String) -> Result<String> {
        if a != b {
            return Err(Error::Internal(format!("`{text}` parses to a different value")));
        }
        if text != again {
            return Err(Error::Internal(format!("printing is not a fixpoint: `{text}` vs `{again}`")));
        }
        Ok(text)
    }
    let no_rule = || Error::Internal("rule has no text form".into());
    match kind {
        "field" => {
            let a = parse_field(src)?;
            let t = print_field(&a);
            let b = parse_field(&t)?;
            let again = print_field(&b);
            check(a, b, t, again)
        }
        "gamma" => {
            let a = parse_gamma(src)?;
            let t = a.to_string();
            let b = parse_gamma(&t)?;
            let again = b.to_string();
            check(a, b, t, again)
        }
        "ball" => {
            let a = parse_ball(src)?;
            let t = print_ball(&a);
            let b = parse_ball(&t)?;
            let again = print_ball(&b);
            check(a, b, t, again)
        }
        "rule" => {
            let a = parse_rule(src)?;
            let t = print_rule(&a).ok_or_else(no_rule)?;
            let b = parse_rule(&t)?;
            let again = print_rule(&b).ok_or_else(no_rule)?;
            check(a, b, t, again)
        }
        "expr" => {
            let a = parse_series_expr(src)?;
            let t = print_series_expr(&a, "z");
            let b = parse_series_expr(&t)?;
            let again = print_series_expr(&b, "z");
            check(a, b, t, again)
        }
        "series" => {
            let a = parse_series_file(src)?;
            let t = print_series_file(&a)?;
            let b = parse_series_file(&t)?;
            let again = print_series_file(&b)?;
            check(a, b, t, again)
        }
        other => Err(Error::Domain(format!(
            "unknown kind `{other}`; expected one of {}",
            CORPUS_KINDS.join(", ")
        ))),
    }
}
