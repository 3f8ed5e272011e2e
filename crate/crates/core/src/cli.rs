//! Command-line front end: identity suites, homotopy runs, the bar side and
//! the comparison harness. Every command writes one JSON document.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bar::{self, CDGAlgebra, QBar};
use crate::dgl::{self, CobarLie};
use crate::error::{Error, Result};
use crate::fincat::{self, DMorphism, GroupRingElement};
use crate::freelie::{self, GradedGenerators, TensorElement};
use crate::rational::{self, q};
use crate::simplicial::SimplicialSpace;

#[derive(Parser, Debug)]
#[command(name = "cobarlie", version, about = "Rational homotopy Lie algebras from the geometric cobar complex")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the group-ring, category and free Lie algebra identities.
    Verify(VerifyArgs),
    /// Compute ranks, brackets and certificates of the homotopy Lie algebra.
    Homotopy(HomotopyArgs),
    /// Bar-side computation for a commutative d.g. algebra.
    Bar(BarArgs),
    /// Compare bar-side and cobar-side ranks.
    Compare(CompareArgs),
    /// Print a space or algebra from the built-in library as JSON.
    Show(ShowArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for sampled certificates and representative probes.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of basis elements in any column.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Largest weight for the single-index identities.
    #[arg(short = 'N', default_value_t = 6)]
    pub n_max: usize,
    /// Largest `p + q` for the two-index identities.
    #[arg(long = "pq-max", default_value_t = 6)]
    pub pq_max: usize,
    /// Replace `w_n` by a variant with wrong signs (mutation testing).
    #[arg(long)]
    pub debug_flip_sign: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct HomotopyArgs {
    /// Space expression (`S2`, `S2vS3`, `S2xS2`, …) or path to a JSON file.
    #[arg(long)]
    pub space: String,
    #[arg(short = 'N')]
    pub n: usize,
    /// Internal degree bound; defaults to `T + N + 1`.
    #[arg(long)]
    pub qmax: Option<usize>,
    #[arg(short = 'T')]
    pub t: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct BarArgs {
    /// Built-in algebra name (`H(S2)`, `H(S2vS2)`, `trivial`, …) or JSON path.
    #[arg(long)]
    pub cdga: String,
    #[arg(short = 'N')]
    pub n: usize,
    /// Top total degree reported; defaults to `N`.
    #[arg(short = 'T')]
    pub t: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub cdga: String,
    #[arg(short = 'N')]
    pub n: usize,
    #[arg(short = 'T')]
    pub t: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ShowArgs {
    #[arg(long, conflicts_with = "cdga")]
    pub space: Option<String>,
    #[arg(long)]
    pub cdga: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a command: the JSON document and whether every check passed.
pub struct Outcome {
    pub report: Value,
    pub ok: bool,
}

pub fn load_space(arg: &str) -> Result<SimplicialSpace> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{arg}: {e}")))?;
        SimplicialSpace::from_json(&text)
    } else {
        SimplicialSpace::parse_expression(arg)
    }
}

pub fn load_cdga(arg: &str) -> Result<CDGAlgebra> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{arg}: {e}")))?;
        CDGAlgebra::from_json(&text)
    } else {
        CDGAlgebra::builtin(arg)
    }
}

/// One identity family: the parameters checked and the first failure.
struct Suite {
    name: &'static str,
    checked: Vec<String>,
    failure: Option<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            checked: Vec::new(),
            failure: None,
        }
    }

    /// Runs `check` unless an earlier case already failed; `Err` and
    /// `Ok(Some(_))` both count as failures.
    fn case(&mut self, label: String, check: impl FnOnce() -> Result<Option<String>>) {
        if self.failure.is_some() {
            return;
        }
        match check() {
            Ok(None) => self.checked.push(label),
            Ok(Some(why)) => self.failure = Some(format!("{label}: {why}")),
            Err(e) => self.failure = Some(format!("{label}: {e}")),
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "identity": self.name,
            "pass": self.failure.is_none(),
            "checked": self.checked,
            "counterexample": self.failure,
        })
    }
}

fn dmorphism_difference(lhs: &DMorphism, rhs: &DMorphism) -> Option<String> {
    lhs.first_difference(rhs).map(|(m, a, b)| {
        format!(
            "coefficient of {:?} is {} on the left and {} on the right",
            m.images(),
            rational::to_string(&a),
            rational::to_string(&b)
        )
    })
}

fn idempotent_case(x: &GroupRingElement, n: usize) -> Result<Option<String>> {
    let sq = x.multiply(x)?;
    Ok(dmorphism_difference(sq.as_dmorphism(), x.scale(&q(n as i64)).as_dmorphism()))
}

/// Runs the identity suites; `flip` swaps in the sign-faulty `w_n`.
pub fn cmd_verify(n_max: usize, pq_max: usize, flip: bool) -> Outcome {
    let w = |n: usize| {
        if flip {
            fincat::w_element_flipped(n)
        } else {
            fincat::w_element(n)
        }
    };
    let mut suites = Vec::new();

    let mut s = Suite::new("s_n^2 = n s_n");
    for n in 1..=n_max {
        s.case(format!("n={n}"), || idempotent_case(&fincat::s_element(n)?, n));
    }
    suites.push(s);

    let mut s = Suite::new("w_n^2 = n w_n");
    for n in 1..=n_max {
        s.case(format!("n={n}"), || idempotent_case(&w(n)?, n));
    }
    suites.push(s);

    let mut s = Suite::new("f_n f_{n+1} = 0");
    for n in 1..=n_max {
        s.case(format!("n={n}"), || {
            let ff = fincat::cobar_differential(n)?.compose(&fincat::cobar_differential(n + 1)?)?;
            Ok(dmorphism_difference(&ff, &DMorphism::zero(n + 2, n)))
        });
    }
    suites.push(s);

    let mut s = Suite::new("f_p ⨿ Id_q + (-1)^p Id_p ⨿ f_q = f_{p+q}");
    for total in 2..=pq_max {
        for p in 1..total {
            let qq = total - p;
            s.case(format!("p={p},q={qq}"), || {
                let left = fincat::cobar_differential(p)?.disjoint_union(&DMorphism::identity(qq));
                let right = DMorphism::identity(p)
                    .disjoint_union(&fincat::cobar_differential(qq)?)
                    .scale(&q(if p % 2 == 0 { 1 } else { -1 }));
                Ok(dmorphism_difference(&left.add(&right)?, &fincat::cobar_differential(total)?))
            });
        }
    }
    suites.push(s);

    let mut s = Suite::new("w_n f_n = phi_n w_{n+1}");
    for n in 1..n_max.min(5) {
        s.case(format!("n={n}"), || {
            let wf = w(n)?.as_dmorphism().compose(&fincat::cobar_differential(n)?)?;
            let phi = wf.scale(&rational::qfrac(1, n as i64 + 1));
            Ok(dmorphism_difference(&wf, &phi.compose(w(n + 1)?.as_dmorphism())?))
        });
    }
    suites.push(s);

    let mut s = Suite::new("psi_{p,q} w_{p+q} = (w_p ⨿ w_q) B_{p,q}");
    for total in 2..=pq_max.min(5) {
        for p in 1..total {
            let qq = total - p;
            s.case(format!("p={p},q={qq}"), || {
                let wb = w(p)?.disjoint_union(&w(qq)?).multiply(&fincat::bracket_element(p, qq)?)?;
                let psi = wb.scale(&rational::qfrac(1, total as i64));
                let lhs = psi.multiply(&w(total)?)?;
                Ok(dmorphism_difference(lhs.as_dmorphism(), wb.as_dmorphism()))
            });
        }
    }
    suites.push(s);

    let mut s = Suite::new("w_n acts as the left-normed bracket");
    let gens = GradedGenerators::new(&["a", "b"], &[1, 2]).expect("two generators");
    for n in 1..=n_max.min(5) {
        s.case(format!("n={n}"), || {
            for word in gens.words(n) {
                let acted = freelie::right_action(&w(n)?, &gens, &TensorElement::word(&word))?;
                let bracket = freelie::left_normed(&gens, &word);
                if acted != bracket {
                    return Ok(Some(format!("word {}", gens.format_word(&word))));
                }
            }
            Ok(None)
        });
    }
    suites.push(s);

    let mut s = Suite::new("rank w_n = trace w_n / n = Witt dimension");
    for n in 1..=n_max.min(6) {
        s.case(format!("n={n},m=2"), || {
            let gens = GradedGenerators::uniform(2, 2);
            let m = freelie::action_matrix(&w(n)?, &gens);
            let rank = m.rank();
            let trace = m.trace() / q(n as i64);
            let witt = freelie::witt_dimension(n, 2);
            Ok((trace != q(rank as i64) || rank != witt).then(|| {
                format!("rank {rank}, trace/n {}, Witt {witt}", rational::to_string(&trace))
            }))
        });
    }
    suites.push(s);

    let ok = suites.iter().all(|s| s.failure.is_none());
    Outcome {
        report: json!({
            "n_max": n_max,
            "pq_max": pq_max,
            "flipped_sign": flip,
            "identities": suites.iter().map(Suite::to_json).collect::<Vec<_>>(),
            "all_pass": ok,
        }),
        ok,
    }
}

pub fn cmd_homotopy(args: &HomotopyArgs) -> Result<Outcome> {
    let space = load_space(&args.space)?;
    let q_max = args.qmax.unwrap_or(args.t + args.n + 1);
    let c = space.rational_connectivity().unwrap_or(usize::MAX / (args.n + 2));
    dgl::check_window_connected(c, args.n, q_max, args.t)?;
    let lie = CobarLie::build(&space, args.n, q_max, args.common.budget)?.with_seed(args.common.seed);
    let report = lie.report(args.t)?;
    Ok(Outcome {
        ok: report.certificates_pass(),
        report: report.to_json(),
    })
}

fn matrix_json(m: &crate::homalg::QMatrix) -> Value {
    json!(m
        .to_dense()
        .iter()
        .map(|row| row.iter().map(rational::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub fn cmd_bar(args: &BarArgs) -> Result<Outcome> {
    let a = load_cdga(&args.cdga)?;
    let qb = QBar::new(&a, args.n)?;
    let t_max = args.t.unwrap_or(args.n) as i64;
    let ranks = qb.cohomology_ranks(1, t_max)?;
    let dims: serde_json::Map<String, Value> = (1..=t_max).map(|k| (k.to_string(), qb.dim(k).into())).collect();
    let mut well_defined = true;
    let mut cobrackets = Vec::new();
    for k in 1..=t_max {
        well_defined &= qb.cobracket_well_defined(k)?;
    }
    for s in 1..=t_max {
        for t in s..=t_max - s {
            if ranks[&s] == 0 || ranks[&t] == 0 || ranks[&(s + t)] == 0 {
                continue;
            }
            let m = qb.cobracket_on_cohomology(s, t)?;
            cobrackets.push(json!({ "s": s, "t": t, "rank": m.rank(), "matrix": matrix_json(&m) }));
        }
    }
    let checks: Vec<Value> = qb
        .projector_checks
        .iter()
        .map(|c| {
            json!({
                "weight": c.weight,
                "internal": c.internal,
                "dim": c.dim_tensor,
                "rank_shuffles": c.rank_shuffles,
                "rank_projector": c.rank_projector,
                "agrees": c.agrees,
            })
        })
        .collect();
    let ranks_json: serde_json::Map<String, Value> = ranks.iter().map(|(k, r)| (k.to_string(), (*r).into())).collect();
    Ok(Outcome {
        ok: well_defined,
        report: json!({
            "cdga": a.name(),
            "N": args.n,
            "T": t_max,
            "ranks": ranks_json,
            "qbar_dims": dims,
            "projector_checks": checks,
            "cobrackets": cobrackets,
            "cobracket_well_defined": well_defined,
        }),
    })
}

pub fn cmd_compare(args: &CompareArgs) -> Result<Outcome> {
    let space = load_space(&args.space)?;
    let a = load_cdga(&args.cdga)?;
    let c = bar::compare(&space, &a, args.n, args.t, args.common.budget, args.common.seed)?;
    Ok(Outcome {
        ok: c.ranks_match() && c.structure_matches(),
        report: c.to_json(),
    })
}

pub fn cmd_show(args: &ShowArgs) -> Result<Outcome> {
    let text = match (&args.space, &args.cdga) {
        (Some(s), _) => load_space(s)?.to_json(),
        (None, Some(a)) => load_cdga(a)?.to_json(),
        (None, None) => return Err(Error::InvalidInput("show needs --space or --cdga".into())),
    };
    let report = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(Outcome { report, ok: true })
}

fn configure_threads() {
    if let Some(n) = std::env::var("COBARLIE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialization in the same process is harmless to ignore
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn write(out: Option<&Path>, report: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(report).expect("serializable") + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    configure_threads();
    let (outcome, out) = match &cli.command {
        Command::Verify(a) => (Ok(cmd_verify(a.n_max, a.pq_max, a.debug_flip_sign)), a.common.out.clone()),
        Command::Homotopy(a) => (cmd_homotopy(a), a.common.out.clone()),
        Command::Bar(a) => (cmd_bar(a), a.common.out.clone()),
        Command::Compare(a) => (cmd_compare(a), a.common.out.clone()),
        Command::Show(a) => (cmd_show(a), a.out.clone()),
    };
    match outcome.and_then(|o| write(out.as_deref(), &o.report).map(|_| o.ok)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
