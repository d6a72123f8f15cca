//! Front end for the `quatideal` binary: argument types, dispatch and output records.
//!
//! Every subcommand prints either a short text rendering or, with `--json`, a JSON
//! record that deserializes back into the types below.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use quatideal::experiments::{self, Census, CensusOptions, ClassOrder, Cycle, OrderSearch};
use quatideal::factor::{self, FactorWitness};
use quatideal::forms::{self, BinaryQuadraticForm, ClassGroupDescription};
use quatideal::ideals::IdentityReport;
use quatideal::orders::all_three_squares_u64;
use quatideal::{HurwitzQuaternion, Ideal, QuadraticOrder, Sign, SolutionModule, ZBasis};
use serde::{Deserialize, Serialize};

pub const THREADS_ENV: &str = "QUATIDEAL_THREADS";

/// Failure of a subcommand, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments: exit code 2.
    Usage(String),
    /// The arguments are well formed but the mathematics refuses: exit code 1.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) | CliError::Domain(s) => f.write_str(s),
        }
    }
}

impl From<quatideal::Error> for CliError {
    fn from(e: quatideal::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// `x,y,z` on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple(pub [BigInt; 3]);

impl FromStr for Triple {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected x,y,z, got `{s}`"));
        }
        let mut out = [BigInt::from(0), BigInt::from(0), BigInt::from(0)];
        for (slot, p) in out.iter_mut().zip(parts) {
            *slot = p.parse().map_err(|_| format!("`{p}` is not an integer"))?;
        }
        Ok(Triple(out))
    }
}

/// `a,b` on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair(pub BigInt, pub BigInt);

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b, got `{s}`"))?;
        let a = a.trim().parse().map_err(|_| format!("`{a}` is not an integer"))?;
        let b = b.trim().parse().map_err(|_| format!("`{b}` is not an integer"))?;
        Ok(Pair(a, b))
    }
}

#[derive(Parser, Debug)]
#[command(name = "quatideal", version, about = "Ideals of imaginary quadratic orders inside the Hurwitz quaternions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write m as x² + y² + z² with x ≥ y ≥ z ≥ 0.
    ThreeSquares {
        m: u64,
        /// List every representation, not just the largest.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        json: bool,
    },
    /// Build O(xi+yj+zk) and show its invariants.
    MakeOrder {
        #[arg(allow_hyphen_values = true)]
        mu: Triple,
        #[arg(long)]
        json: bool,
    },
    /// Operate on an ideal [a, b + ω].
    Ideal {
        op: IdealOp,
        #[command(flatten)]
        target: IdealArgs,
        /// Second ideal for `mul`.
        #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
        with: Option<Pair>,
        #[arg(long)]
        json: bool,
    },
    /// Z-basis of the solutions of ρμ = μ'ρ and its norm form.
    SolveModule {
        #[arg(long)]
        m: Option<BigInt>,
        #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
        mu: Triple,
        #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
        mu_prime: Triple,
        #[arg(long)]
        json: bool,
    },
    /// Find a proper divisor of m through pairs of quadratic orders of norm m.
    Factor {
        m: u64,
        /// Also try every pair of representations (default).
        #[arg(long, conflicts_with_all = ["single_rep", "two_squares"])]
        pairs: bool,
        /// Only μ against −μ for each representation.
        #[arg(long, conflicts_with = "two_squares")]
        single_rep: bool,
        /// Use two representations as a sum of two squares instead.
        #[arg(long)]
        two_squares: bool,
        /// Text output; the trace is JSON by default.
        #[arg(long)]
        text: bool,
    },
    /// Class group of discriminant Δ < 0 as invariant factors.
    ClassGroup {
        #[arg(allow_negative_numbers = true)]
        discriminant: BigInt,
        #[arg(long)]
        json: bool,
    },
    /// Class number of discriminant Δ < 0.
    ClassNumber {
        #[arg(allow_negative_numbers = true)]
        discriminant: BigInt,
        #[arg(long)]
        json: bool,
    },
    /// Count m ≤ N with a non-principal ambiguous class among their orders.
    Census(CensusArgs),
    /// Walk the cycle of orders visited by moving [a, b + ω].
    Cycle {
        #[command(flatten)]
        target: IdealArgs,
        #[arg(long, value_enum, default_value_t = SearchArg::Separation)]
        order_search: SearchArg,
        #[arg(long)]
        json: bool,
    },
    /// Order of the class of [a, b + ω].
    OrderOf {
        #[command(flatten)]
        target: IdealArgs,
        #[arg(long, value_enum, default_value_t = SearchArg::Bruteforce)]
        order_search: SearchArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
pub struct IdealArgs {
    /// Expected norm of μ; checked when given.
    #[arg(long)]
    pub m: Option<BigInt>,
    #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
    pub mu: Triple,
    #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
    pub ideal: Pair,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[arg(long)]
    pub limit: u64,
    /// Write the summary row as JSON to a file, or `-` for standard output.
    #[arg(long, value_name = "PATH")]
    pub json: Option<String>,
    /// Write one CSV line per m in Σ.
    #[arg(long, value_name = "PATH")]
    pub details: Option<PathBuf>,
    /// Worker threads; QUATIDEAL_THREADS takes precedence.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IdealOp {
    Restore,
    Reduce,
    Conj,
    Mul,
    Check,
    LeftRight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SearchArg {
    Separation,
    Bruteforce,
}

impl From<SearchArg> for OrderSearch {
    fn from(s: SearchArg) -> Self {
        match s {
            SearchArg::Separation => OrderSearch::Separation,
            SearchArg::Bruteforce => OrderSearch::Bruteforce,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeSquaresReport {
    pub m: u64,
    pub representations: Vec<[u64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderReport {
    pub order: QuadraticOrder,
    #[serde(with = "quatideal::serde_int")]
    pub discriminant: BigInt,
    /// `None` when no unit conjugate has all coordinates of one sign.
    pub sign: Option<Sign>,
}

/// An ideal together with its integer basis and right order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealView {
    pub ideal: Ideal,
    pub z_basis: ZBasis,
    #[serde(with = "quatideal::serde_int")]
    pub norm: BigInt,
    pub right_order: QuadraticOrder,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum IdealReport {
    Restore { input: ZBasis, result: IdealView },
    Reduce { input: IdealView, result: IdealView },
    Conj { input: IdealView, result: IdealView },
    Mul { left: IdealView, right: IdealView, result: IdealView },
    Check { input: IdealView, identities: IdentityReport, all_hold: bool },
    LeftRight { input: IdealView, left_generator: HurwitzQuaternion, left_order: QuadraticOrder, right_again: HurwitzQuaternion },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleReport {
    pub module: SolutionModule,
    pub norm_form: BinaryQuadraticForm,
    pub minimal_vector: HurwitzQuaternion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorReport {
    pub m: u64,
    pub witness: Option<FactorWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNumberReport {
    #[serde(with = "quatideal::serde_int")]
    pub discriminant: BigInt,
    pub h: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cycle: Cycle,
    pub length: usize,
    /// `None` when some order has no sign.
    pub separated: Option<bool>,
    pub class_order: ClassOrder,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderOfReport {
    pub ideal: Ideal,
    pub class_order: ClassOrder,
}

/// One CSV line of `census --details`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetailRow {
    pub m: u64,
    pub x: Option<u64>,
    pub y: Option<u64>,
    pub z: Option<u64>,
    pub ambiguous_class_count: usize,
    pub factor_found: Option<u64>,
}

fn order_from(mu: &Triple, m: Option<&BigInt>) -> CliResult<QuadraticOrder> {
    let [x, y, z] = mu.0.clone();
    let o = QuadraticOrder::make(x, y, z)?;
    if let Some(m) = m {
        if o.m() != m {
            return Err(quatideal::Error::NormMismatch(o.m().clone(), m.clone()).into());
        }
    }
    Ok(o)
}

fn view(i: &Ideal) -> CliResult<IdealView> {
    Ok(IdealView { ideal: i.clone(), z_basis: i.restore_z_basis()?, norm: i.norm(), right_order: i.right_order()? })
}

fn threads(flag: usize) -> CliResult<usize> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV}=`{v}` is not a thread count")))?,
        Err(_) => flag,
    };
    if n == 0 {
        return Err(CliError::Usage("thread count must be at least 1".into()));
    }
    Ok(n)
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("records serialize")
}

fn render_view(v: &IdealView) -> String {
    format!("{} = {}, norm {}, right order {}", v.ideal, v.z_basis, v.norm, v.right_order)
}

/// Runs one parsed command, writing its data to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::ThreeSquares { m, all, json: as_json } => {
            let mut reps: Vec<[u64; 3]> = all_three_squares_u64(m).into_iter().map(|(x, y, z)| [x, y, z]).collect();
            if reps.is_empty() {
                return Err(quatideal::Error::NoRepresentation(m.into()).into());
            }
            if !all {
                reps.truncate(1);
            }
            let r = ThreeSquaresReport { m, representations: reps };
            if as_json {
                writeln!(out, "{}", json(&r))?;
            } else {
                for [x, y, z] in &r.representations {
                    writeln!(out, "{m} = {x}^2 + {y}^2 + {z}^2")?;
                }
            }
        }
        Command::MakeOrder { mu, json: as_json } => {
            let o = order_from(&mu, None)?;
            let r = OrderReport { discriminant: o.discriminant(), sign: o.sign().ok(), order: o };
            if as_json {
                writeln!(out, "{}", json(&r))?;
            } else {
                let sign = r.sign.map_or("none".to_string(), |s| s.to_string());
                writeln!(out, "{}  m = {}  r = {}  ω = {}  Δ = {}  sign {}", r.order, r.order.m(), r.order.r(), r.order.omega(), r.discriminant, sign)?;
            }
        }
        Command::Ideal { op, target, with, json: as_json } => {
            let o = order_from(&target.mu, target.m.as_ref())?;
            let z = ZBasis::new(target.ideal.0.clone(), target.ideal.1.clone());
            let i = Ideal::from_basis(&o, &z)?;
            let r = match op {
                IdealOp::Restore => IdealReport::Restore { input: z, result: view(&i)? },
                IdealOp::Reduce => IdealReport::Reduce { input: view(&i)?, result: view(&i.reduce()?)? },
                IdealOp::Conj => IdealReport::Conj { input: view(&i)?, result: view(&i.conjugate()?)? },
                IdealOp::Mul => {
                    let Pair(a, b) = with.ok_or_else(|| CliError::Usage("`ideal mul` needs --with a,b".into()))?;
                    let j = Ideal::from_basis(&o, &ZBasis::new(a, b))?;
                    IdealReport::Mul { left: view(&i)?, right: view(&j)?, result: view(&i.multiply(&j)?)? }
                }
                IdealOp::Check => {
                    let identities = i.check_identities()?;
                    IdealReport::Check { input: view(&i)?, all_hold: identities.all_hold(), identities }
                }
                IdealOp::LeftRight => {
                    let l = i.left_generator()?;
                    IdealReport::LeftRight {
                        input: view(&i)?,
                        right_again: quatideal::ideals::right_from_left(&l, &o)?,
                        left_order: i.left_order()?,
                        left_generator: l,
                    }
                }
            };
            if as_json {
                writeln!(out, "{}", json(&r))?;
            } else {
                match &r {
                    IdealReport::Restore { input, result } => writeln!(out, "{input} -> {}", render_view(result))?,
                    IdealReport::Reduce { input, result } | IdealReport::Conj { input, result } => {
                        writeln!(out, "{}\n-> {}", render_view(input), render_view(result))?
                    }
                    IdealReport::Mul { left, right, result } => {
                        writeln!(out, "{}\n * {}\n-> {}", render_view(left), render_view(right), render_view(result))?
                    }
                    IdealReport::Check { input, identities, all_hold } => {
                        writeln!(out, "{}", render_view(input))?;
                        writeln!(out, "ξ = {}", identities.xi)?;
                        for (name, ok) in [
                            ("rho_relation", identities.rho_relation),
                            ("xi_relation", identities.xi_relation),
                            ("trace_relation", identities.trace_relation),
                            ("norm_relation", identities.norm_relation),
                        ] {
                            writeln!(out, "{name}: {}", if ok { "holds" } else { "FAILS" })?;
                        }
                        writeln!(out, "all hold: {all_hold}")?;
                    }
                    IdealReport::LeftRight { input, left_generator, left_order, right_again } => {
                        writeln!(out, "{}", render_view(input))?;
                        writeln!(out, "left generator {left_generator} in {left_order}; back to right: {right_again}")?;
                    }
                }
            }
        }
        Command::SolveModule { m, mu, mu_prime, json: as_json } => {
            let o = order_from(&mu, m.as_ref())?;
            let o2 = order_from(&mu_prime, m.as_ref())?;
            let sm = SolutionModule::solve(o.mu(), o2.mu())?;
            let (a, b, c) = sm.norm_form();
            let r = ModuleReport { norm_form: BinaryQuadraticForm::new(a, b, c), minimal_vector: sm.minimal_vector(), module: sm };
            if as_json {
                writeln!(out, "{}", json(&r))?;
            } else {
                writeln!(out, "υ = {}\nυ₁ = {}\nnorm form {}\nshortest {}", r.module.first, r.module.second, r.norm_form, r.minimal_vector)?;
            }
        }
        Command::Factor { m, pairs: _, single_rep, two_squares, text } => {
            let witness = if two_squares {
                let reps = factor::two_square_reps(m, false);
                match reps.as_slice() {
                    [(x0, y0), (x1, y1), ..] => Some(factor::fermat_two_squares(
                        &m.into(),
                        &(*x0).into(),
                        &(*y0).into(),
                        &(*x1).into(),
                        &(*y1).into(),
                        false,
                    )?),
                    _ => None,
                }
            } else {
                factor::factor_by_representations(&m.into(), !single_rep)?
            };
            let r = FactorReport { m, witness };
            if text {
                match &r.witness {
                    Some(w) => writeln!(out, "{m} = {} * {}", w.factor, BigInt::from(m) / &w.factor)?,
                    None => writeln!(out, "{m}: no factor found")?,
                }
            } else {
                writeln!(out, "{}", json(&r))?;
            }
        }
        Command::ClassGroup { discriminant, json: as_json } => {
            let r: ClassGroupDescription = forms::class_group(&discriminant)?;
            if as_json {
                writeln!(out, "{}", json(&r))?;
            } else {
                let parts: Vec<String> = r.elementary_divisors.iter().filter(|&&d| d > 1).map(|d| format!("Z/{d}")).collect();
                let group = if parts.is_empty() { "trivial".to_string() } else { parts.join(" x ") };
                writeln!(out, "Δ = {}  h = {}  Cl ≅ {group}", r.discriminant, r.h)?;
            }
        }
        Command::ClassNumber { discriminant, json: as_json } => {
            let h = forms::class_number(&discriminant)?;
            let r = ClassNumberReport { discriminant, h };
            if as_json {
                writeln!(out, "{}", json(&r))?;
            } else {
                writeln!(out, "{}", r.h)?;
            }
        }
        Command::Census(args) => run_census(args, out)?,
        Command::Cycle { target, order_search, json: as_json } => {
            let o = order_from(&target.mu, target.m.as_ref())?;
            let seed = ZBasis::new(target.ideal.0.clone(), target.ideal.1.clone());
            let cycle = experiments::walk_cycle(&o, &seed)?;
            let separated = experiments::is_separated(&cycle).ok();
            let class_order = experiments::class_order(&o, &seed, order_search.into())?;
            let r = CycleReport { length: cycle.len(), cycle, separated, class_order };
            if as_json {
                writeln!(out, "{}", json(&r))?;
            } else {
                writeln!(out, "cycle of {} in {}: f = {}", r.cycle.seed, r.cycle.order, r.length)?;
                for (k, (mu, s)) in r.cycle.orders.iter().zip(&r.cycle.signs).enumerate() {
                    let s = s.map_or("none".to_string(), |s| s.to_string());
                    writeln!(out, "μ{:<3} {:<28} {s}", k + 1, mu.to_string())?;
                }
                let sep = r.separated.map_or("undetermined".to_string(), |b| b.to_string());
                writeln!(out, "separated: {sep}")?;
                writeln!(out, "class order {} by {:?}{}", r.class_order.order, r.class_order.method, if r.class_order.fell_back { " (fallback)" } else { "" })?;
            }
        }
        Command::OrderOf { target, order_search, json: as_json } => {
            let o = order_from(&target.mu, target.m.as_ref())?;
            let seed = ZBasis::new(target.ideal.0.clone(), target.ideal.1.clone());
            let ideal = Ideal::from_basis(&o, &seed)?;
            let class_order = experiments::class_order(&o, &seed, order_search.into())?;
            let r = OrderOfReport { ideal, class_order };
            if as_json {
                writeln!(out, "{}", json(&r))?;
            } else {
                writeln!(out, "{}", r.class_order.order)?;
            }
        }
    }
    Ok(())
}

fn run_census(args: CensusArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut opts = CensusOptions::for_limit(args.limit);
    opts.threads = threads(args.threads)?;
    let limit = args.limit;
    let census: Census = experiments::census(limit, opts, |done| eprintln!("census: {done} of {limit} values of m done"))?;
    let row = &census.row;
    if let Some(path) = &args.details {
        let mut w = csv::Writer::from_path(path)?;
        for e in &census.entries {
            let hit = e.first_hit();
            w.serialize(DetailRow {
                m: e.m,
                x: hit.map(|h| h.x),
                y: hit.map(|h| h.y),
                z: hit.map(|h| h.z),
                ambiguous_class_count: e.ambiguous_class_count(),
                factor_found: e.factor_found(),
            })?;
        }
        w.flush()?;
    }
    match args.json.as_deref() {
        Some("-") => writeln!(out, "{}", json(row))?,
        other => {
            if let Some(path) = other {
                let mut f = File::create(path)?;
                writeln!(f, "{}", json(row))?;
            }
            writeln!(out, "N        #Σ      #A      %A      argmax m (M)   example in A          example outside")?;
            let ex = row.example_in_a.map_or("-".to_string(), |(m, x, y, z)| format!("{m} ({x},{y},{z})"));
            let outside = row.example_outside.map_or("-".to_string(), |m| m.to_string());
            writeln!(
                out,
                "{:<8} {:<7} {:<7} {:<7.2} {:<14} {:<21} {}",
                row.limit,
                row.count_sigma,
                row.count_a,
                row.percent,
                format!("{} ({})", row.argmax_m, row.argmax_count),
                ex,
                outside
            )?;
        }
    }
    Ok(())
}
