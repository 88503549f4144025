//! Command-line front end. `run` parses arguments, dispatches to the library
//! and writes a text or JSON report. Exit codes: 0 when every check holds
//! (or solutions exist), 1 when a check fails (or nothing is found), 2 for
//! usage and input errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::characters::{characters, generalized_bernoulli, group_action_check, s_chi, verify_nonvanishing};
use crate::distribution::{distribution_of, check_multiples_relation, p_matrix_determinant, row_sums, solve_distribution};
use crate::error::Error;
use crate::exact::{fmt_q, q, qi, Q};
use crate::lattice::LatticeBasis;
use crate::numtheory::is_odd_prime;
use crate::relations::{check_all, euler_divisibility, RelationReport};
use crate::solver::{enumerate, verify_group_closure, EnumerationQuery};
use crate::surface_model::{ComponentAssignment, FiberConfiguration};

#[derive(Parser, Debug)]
#[command(name = "torsion", version, about = "Component numbers of torsion sections on semistable elliptic surfaces")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Det,
    Characters,
    Both,
}

#[derive(Args, Debug, Clone)]
struct SurfaceArgs {
    /// Singular fiber lengths, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    fibers: Option<Vec<i64>>,
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<i64>,
    /// Component numbers of a section, comma separated. Repeatable.
    #[arg(long, action = clap::ArgAction::Append, allow_hyphen_values = true)]
    components: Vec<String>,
    /// Allow fiber sums other than 12 chi.
    #[arg(long)]
    non_strict: bool,
    /// JSON input: {"fibers": [..], "chi": .., "sections": [{"order": .., "components": [..]}]}.
    #[arg(long, conflicts_with_all = ["fibers", "chi", "components"])]
    input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every relation for the given sections.
    Check {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Order claimed for the sections (default: exact order).
        #[arg(long)]
        order: Option<u64>,
    },
    /// Enumerate component numbers compatible with a section of given order.
    Enumerate {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        order: u64,
        #[arg(long)]
        up_to_symmetry: bool,
        /// Keep solutions matching the solved distribution numbers.
        #[arg(long)]
        require_distribution: bool,
        /// Keep solutions generating a valid subgroup with this section.
        #[arg(long)]
        partner: Option<String>,
    },
    /// Solve P_n M = (1/6) 1.
    Distribution {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        order: u64,
    },
    /// Certify that P_p is invertible.
    Invertibility {
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Generalised Bernoulli numbers and s_chi for characters mod p.
    Bernoulli {
        #[arg(long)]
        prime: u64,
        /// Character index t, where chi_t(g) = zeta^t.
        #[arg(long)]
        character: Option<u64>,
    },
    /// Verify intersection-lattice identities.
    LatticeVerify {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        order: Option<u64>,
    },
    /// Close the subgroup generated by the given sections.
    Group {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
}

/// One verified relation; `lhs` and `rhs` print exact values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub relation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

impl Check {
    fn from_report(subject: Option<&str>, r: &RelationReport) -> Self {
        Check {
            relation: r.relation.name().to_string(),
            subject: subject.map(str::to_string),
            lhs: fmt_q(&r.lhs),
            rhs: fmt_q(&r.rhs),
            holds: r.holds,
        }
    }

    fn new(relation: &str, subject: Option<&str>, lhs: String, rhs: String, holds: bool) -> Self {
        Check { relation: relation.to_string(), subject: subject.map(str::to_string), lhs, rhs, holds }
    }

    fn equal(relation: &str, subject: Option<&str>, lhs: &Q, rhs: &Q) -> Self {
        Check::new(relation, subject, fmt_q(lhs), fmt_q(rhs), lhs == rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, Value>,
    /// False when the command found nothing (e.g. no solutions).
    pub found: bool,
}

impl Report {
    fn new(command: &str) -> Self {
        Report { command: command.to_string(), checks: Vec::new(), values: BTreeMap::new(), found: true }
    }

    fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.to_string(), v.into());
    }

    pub fn success(&self) -> bool {
        self.found && self.checks.iter().all(|c| c.holds)
    }

    pub fn exit_code(&self) -> i32 {
        if self.success() {
            0
        } else {
            1
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for (k, v) in &self.values {
            render_value(&mut out, k, v);
        }
        for c in &self.checks {
            let subject = c.subject.as_ref().map(|s| format!("[{s}] ")).unwrap_or_default();
            let verdict = if c.holds { "holds" } else { "FAILS" };
            out.push_str(&format!("{subject}{}: {} vs {} [{verdict}]\n", c.relation, c.lhs, c.rhs));
        }
        out.push_str(if self.success() { "result: ok\n" } else { "result: FAIL\n" });
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("({})", items.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn render_value(out: &mut String, key: &str, v: &Value) {
    match v {
        Value::Array(items) if items.iter().any(|x| x.is_array() || x.is_object()) => {
            out.push_str(&format!("{key}:\n"));
            for item in items {
                out.push_str(&format!("  {}\n", scalar(item)));
            }
        }
        Value::Object(map) => {
            for (k, inner) in map {
                render_value(out, &format!("{key}.{k}"), inner);
            }
        }
        _ => out.push_str(&format!("{key}: {}\n", scalar(v))),
    }
}

fn qs(values: &[Q]) -> Value {
    Value::Array(values.iter().map(|x| Value::String(fmt_q(x))).collect())
}

fn tuple(a: &ComponentAssignment) -> Value {
    Value::Array(a.components().iter().map(|&k| json!(k)).collect())
}

/// Input or usage problem; maps to exit code 2.
#[derive(Debug)]
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InputFile {
    fibers: Vec<i64>,
    chi: i64,
    #[serde(default)]
    sections: Vec<InputSection>,
    #[serde(default)]
    strict: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InputSection {
    #[serde(default)]
    order: Option<u64>,
    components: Vec<i64>,
}

struct Surface {
    config: FiberConfiguration,
    sections: Vec<(Option<u64>, Vec<i64>)>,
}

fn parse_components(s: &str) -> Result<Vec<i64>, InputError> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| InputError(format!("invalid component list '{s}'"))))
        .collect()
}

fn load_surface(args: &SurfaceArgs, order: Option<u64>) -> Result<Surface, InputError> {
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
        let file: InputFile =
            serde_json::from_str(&text).map_err(|e| InputError(format!("malformed input file: {e}")))?;
        let strict = file.strict.unwrap_or(true) && !args.non_strict;
        let config = FiberConfiguration::new(&file.fibers, file.chi, strict)?;
        let sections = file.sections.into_iter().map(|s| (s.order.or(order), s.components)).collect();
        return Ok(Surface { config, sections });
    }
    let fibers = args.fibers.as_ref().ok_or_else(|| InputError("--fibers or --input is required".into()))?;
    let chi = args.chi.ok_or_else(|| InputError("--chi is required with --fibers".into()))?;
    let config = FiberConfiguration::new(fibers, chi, !args.non_strict)?;
    let sections = args
        .components
        .iter()
        .map(|s| parse_components(s).map(|ks| (order, ks)))
        .collect::<Result<_, _>>()?;
    Ok(Surface { config, sections })
}

impl Surface {
    fn assignments(&self) -> Result<Vec<ComponentAssignment>, InputError> {
        self.sections
            .iter()
            .map(|(order, ks)| match order {
                Some(n) => self.config.assignment(ks, *n),
                None => self.config.assignment_exact(ks),
            })
            .collect::<Result<_, _>>()
            .map_err(InputError::from)
    }

    fn describe(&self, report: &mut Report) {
        report.value("fibers", json!(self.config.fiber_lengths()));
        report.value("chi", json!(self.config.chi()));
        report.value("strict", json!(self.config.is_strict()));
    }
}

fn cmd_check(surface: &SurfaceArgs, order: Option<u64>) -> Result<Report, InputError> {
    let s = load_surface(surface, order)?;
    let sections = s.assignments()?;
    if sections.is_empty() {
        return Err(InputError("check needs at least one section".into()));
    }
    let mut report = Report::new("check");
    s.describe(&mut report);
    let cfg = &s.config;
    for (i, a) in sections.iter().enumerate() {
        let label = format!("S{}", i + 1);
        report.value(&format!("{label}.components"), tuple(a));
        report.value(&format!("{label}.order"), json!(a.order()));
        if a.is_zero() {
            continue;
        }
        for r in check_all(cfg, a)? {
            report.checks.push(Check::from_report(Some(&label), &r));
        }
        if is_odd_prime(a.order()) {
            let e = euler_divisibility(a.order(), cfg.chi())?;
            report.checks.push(Check::from_report(Some(&label), &e.report));
        }
        if cfg.is_strict() {
            let dist = distribution_of(cfg, a)?;
            report.value(&format!("{label}.distribution"), qs(&dist.unoriented));
            let m = check_multiples_relation(cfg, a)?;
            let two_chi = qi(2 * cfg.chi() as i64);
            for c in &m.checks {
                let subject = format!("{label}, alpha={}", c.alpha);
                report.checks.push(Check::equal("quadratic_multiple", Some(&subject), &c.per_fiber, &two_chi));
                report.checks.push(Check::equal("distribution_weighted", Some(&subject), &c.collected, &q(1, 6)));
            }
        }
    }
    Ok(report)
}

fn cmd_enumerate(
    surface: &SurfaceArgs,
    order: u64,
    up_to_symmetry: bool,
    require_distribution: bool,
    partner: Option<&str>,
) -> Result<Report, InputError> {
    let s = load_surface(surface, None)?;
    let partner = partner
        .map(|p| parse_components(p).and_then(|ks| Ok(s.config.assignment_exact(&ks)?)))
        .transpose()?;
    let query = EnumerationQuery {
        config: s.config.clone(),
        order,
        up_to_symmetry,
        require_distribution,
        partner,
    };
    let set = enumerate(&query)?;
    let mut report = Report::new("enumerate");
    s.describe(&mut report);
    report.value("order", json!(order));
    report.value("raw_count", json!(set.raw_count));
    report.value("orbit_count", json!(set.orbit_count));
    report.value("solutions", Value::Array(set.assignments.iter().map(tuple).collect()));
    if up_to_symmetry {
        report.value("orbit_sizes", json!(set.orbit_sizes));
    }
    report.found = !set.is_empty();
    Ok(report)
}

fn cmd_distribution(surface: &SurfaceArgs, order: u64) -> Result<Report, InputError> {
    let sol = solve_distribution(order)?;
    let mut report = Report::new("distribution");
    report.value("order", json!(order));
    report.value("p_matrix", Value::Array(sol.matrix.entries.to_rows().iter().map(|r| qs(r)).collect()));
    report.value("unique", json!(sol.is_unique()));
    report.value("M", qs(&sol.system.particular));
    report.value("M_0", fmt_q(&sol.m0));
    if !sol.is_unique() {
        report.value("nullspace", Value::Array(sol.system.nullspace.iter().map(|v| qs(v)).collect()));
    }
    if is_odd_prime(order) {
        let p = order as i64;
        let expected = q(2 * p, p * p - 1);
        for (i, m) in sol.system.particular.iter().enumerate() {
            report.checks.push(Check::equal("equidistribution", Some(&format!("M_{}", i + 1)), m, &expected));
        }
        report.checks.push(Check::equal("equidistribution", Some("M_0"), &sol.m0, &q(1, p + 1)));
        let target = q(p * p - 1, 12 * p);
        for (i, r) in row_sums(order)?.iter().enumerate() {
            report.checks.push(Check::equal("row_sum", Some(&format!("alpha={}", i + 1)), r, &target));
        }
    }
    if surface.fibers.is_some() || surface.input.is_some() {
        let s = load_surface(surface, Some(order))?;
        s.describe(&mut report);
        for (i, a) in s.assignments()?.iter().enumerate() {
            let label = format!("S{}", i + 1);
            let dist = distribution_of(&s.config, a)?;
            report.value(&format!("{label}.distribution"), qs(&dist.unoriented));
            if let Some(expected) = sol.unoriented() {
                for (j, (got, want)) in dist.unoriented.iter().zip(&expected).enumerate() {
                    report.checks.push(Check::equal("forced_distribution", Some(&format!("{label}, M_{j}")), got, want));
                }
            }
        }
    }
    Ok(report)
}

fn cmd_invertibility(p: u64, method: Method) -> Result<Report, InputError> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p).into());
    }
    let mut report = Report::new("invertibility");
    report.value("prime", json!(p));
    let mut verdicts = Vec::new();
    if matches!(method, Method::Det | Method::Both) {
        let det = p_matrix_determinant(p)?;
        report.value("determinant", fmt_q(&det));
        let nonzero = det != Q::from_integer(0.into());
        report.checks.push(Check::new("determinant_nonzero", None, fmt_q(&det), "0".into(), nonzero));
        verdicts.push(nonzero);
    }
    if matches!(method, Method::Characters | Method::Both) {
        let nv = verify_nonvanishing(p)?;
        for s in &nv.even {
            let subject = format!("chi_{}", s.index);
            report.value(&format!("s_chi.{}", s.index), s.direct.to_string());
            report.checks.push(Check::new("s_chi_nonzero", Some(&subject), s.direct.to_string(), "0".into(), !s.direct.is_zero()));
            if let Some(via) = &s.via_bernoulli {
                report.checks.push(Check::new("s_chi_bernoulli", Some(&subject), s.direct.to_string(), via.to_string(), *via == s.direct));
            }
        }
        report.checks.push(Check::new("odd_characters_vanish", None, nv.odd_vanish.to_string(), "true".into(), nv.odd_vanish));
        verdicts.push(nv.all_nonzero);
    }
    if verdicts.len() == 2 {
        let agree = verdicts[0] == verdicts[1];
        report.checks.push(Check::new("routes_agree", None, verdicts[0].to_string(), verdicts[1].to_string(), agree));
    }
    Ok(report)
}

fn cmd_bernoulli(p: u64, character: Option<u64>) -> Result<Report, InputError> {
    let chars = characters(p)?;
    let selected: Vec<_> = match character {
        Some(t) => {
            let c = chars.iter().find(|c| c.index() == t).cloned();
            vec![c.ok_or_else(|| InputError(format!("character index {t} out of range for p = {p}")))?]
        }
        None => chars,
    };
    let mut report = Report::new("bernoulli");
    report.value("prime", json!(p));
    report.value("field", format!("Q(zeta_{})", p - 1));
    for c in &selected {
        let b = generalized_bernoulli(c, 2)?;
        let s = s_chi(c);
        let key = format!("chi_{}", c.index());
        report.value(&format!("{key}.even"), json!(c.is_even()));
        report.value(&format!("{key}.B_2"), b.to_string());
        report.value(&format!("{key}.s_chi"), s.direct.to_string());
        if let Some(via) = &s.via_bernoulli {
            report.checks.push(Check::new("s_chi_bernoulli", Some(&key), s.direct.to_string(), via.to_string(), *via == s.direct));
        }
    }
    if character.is_none() {
        let g = group_action_check(p)?;
        for (name, ok) in [
            ("reflection", g.reflection),
            ("unit_action", g.action),
            ("eigenvectors", g.eigenvectors),
            ("first_coordinate", g.first_coordinate),
        ] {
            report.checks.push(Check::new(name, None, ok.to_string(), "true".into(), ok));
        }
    }
    Ok(report)
}

fn cmd_lattice(surface: &SurfaceArgs, order: Option<u64>) -> Result<Report, InputError> {
    let s = load_surface(surface, order)?;
    let basis = LatticeBasis::new(&s.config);
    let mut report = Report::new("lattice-verify");
    s.describe(&mut report);
    let gram = basis.gram_matrix();
    report.value("rank", json!(basis.rank()));
    report.value("gram_determinant", fmt_q(&gram.determinant()));
    report.checks.push(Check::new("gram_symmetric", None, gram.is_symmetric().to_string(), "true".into(), gram.is_symmetric()));
    let d = basis.verify_d_lemma();
    report.value("d_lemma_checks", json!(d.checks));
    let (lhs, rhs) = match &d.counterexample {
        Some(c) => (fmt_q(&c.got), fmt_q(&c.expected)),
        None => ("ok".to_string(), "ok".to_string()),
    };
    report.checks.push(Check::new("d_lemma", None, lhs, rhs, d.passed));
    let chi = qi(s.config.chi() as i64);
    for (i, a) in s.assignments()?.iter().enumerate() {
        let label = format!("S{}", i + 1);
        let r = basis.verify_section_class(a)?;
        report.value(&format!("{label}.class"), qs(&r.class.coefficients));
        report.checks.push(Check::equal("meets_fiber_once", Some(&label), &r.with_fiber, &qi(1)));
        report.checks.push(Check::equal("disjoint_from_zero_section", Some(&label), &r.with_zero_section, &qi(0)));
        match &r.component_mismatch {
            Some(m) => report.checks.push(Check::equal(
                "component_pattern",
                Some(&format!("{label}, fiber {}, C_{}", m.fiber + 1, m.component)),
                &m.got,
                &m.expected,
            )),
            None => report.checks.push(Check::new("component_pattern", Some(&label), "ok".into(), "ok".into(), true)),
        }
        report.checks.push(Check::equal("self_intersection", Some(&label), &r.self_intersection, &-&chi));
    }
    Ok(report)
}

fn cmd_group(surface: &SurfaceArgs) -> Result<Report, InputError> {
    let s = load_surface(surface, None)?;
    let gens = s.assignments()?;
    if gens.is_empty() {
        return Err(InputError("group needs at least one generator".into()));
    }
    let r = verify_group_closure(&s.config, &gens)?;
    let mut report = Report::new("group");
    s.describe(&mut report);
    report.value("group_order", json!(r.order()));
    report.value("invariant_factors", json!(r.invariant_factors));
    report.value(
        "elements",
        Value::Array(r.elements.iter().map(|e| json!({"components": tuple(e), "order": e.order()})).collect()),
    );
    for e in &r.nonzero {
        let label = scalar(&tuple(&e.element));
        for c in &e.checks {
            report.checks.push(Check::from_report(Some(&label), c));
        }
    }
    Ok(report)
}

fn dispatch(cli: &Cli) -> Result<Report, InputError> {
    match &cli.command {
        Command::Check { surface, order } => cmd_check(surface, *order),
        Command::Enumerate { surface, order, up_to_symmetry, require_distribution, partner } => {
            cmd_enumerate(surface, *order, *up_to_symmetry, *require_distribution, partner.as_deref())
        }
        Command::Distribution { surface, order } => cmd_distribution(surface, *order),
        Command::Invertibility { prime, method } => cmd_invertibility(*prime, *method),
        Command::Bernoulli { prime, character } => cmd_bernoulli(*prime, *character),
        Command::LatticeVerify { surface, order } => cmd_lattice(surface, *order),
        Command::Group { surface } => cmd_group(surface),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            let text = match cli.format {
                Format::Text => report.to_text(),
                Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
            };
            let _ = out.write_all(text.as_bytes());
            report.exit_code()
        }
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
