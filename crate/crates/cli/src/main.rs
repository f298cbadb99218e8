use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tube_core::diophantine::{CertifyConfig, DiophantineRegistry, DiophantineVerdict};
use tube_core::fourier::{dprime, random_closed_form, TubeForm};
use tube_core::io::{parse_form, read_form, read_structure, write_form};
use tube_core::lattice::{classify, gamma_lattice, GammaClass, LatticeRegistry, PeriodMatrix};
use tube_core::report::{self, render};
use tube_core::solver::{
    certify_counterexample, closed_range_from, closed_range_verdict, counterexample, global_solve, ClosedRange,
    SolveOutcome,
};
use tube_core::surfaces::{dm_failure_summary, euler_index_check, LambdaClass, SurfaceProfile, Tristate};
use tube_core::isomorphisms::strong_isomorphism_report;

const DEFAULT_BOX_LIMIT: u32 = 1024;

#[derive(Parser)]
#[command(name = "tube", version, about = "Fourier-mode analysis of tube structures on tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Search radius for box enumerations.
    #[arg(long = "box", default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    radius: u32,
    /// Precision for approximation gaps.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    depth: u32,
    /// Diophantine certifier: auto, rational, quadratic, liouville or empirical.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Exit with status 3 when the closed-range question is left undecided.
    #[arg(long)]
    strict: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Frequency group, approximation verdict and degree-1 closed range.
    Analyze {
        structure: PathBuf,
        /// Lattice strategy: exact or box.
        #[arg(long, default_value = "exact")]
        lattice: String,
        #[command(flatten)]
        common: Common,
    },
    /// Solvability report for a structure.
    Report {
        structure: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Approximation verdict only.
    Diophantine {
        structure: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve d′u = f mode by mode.
    Solve {
        structure: PathBuf,
        form: PathBuf,
        /// Write the solution form file here; otherwise it is embedded in the report.
        #[arg(long)]
        solution: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Closed form whose solution modes do not decay, for a Liouville structure.
    Counterexample {
        structure: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        terms: u32,
        /// Write the form file here; otherwise it is embedded in the certificate.
        #[arg(long)]
        form: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Vanishing check off Γ and the cohomology shape in one degree.
    Isomorphism {
        structure: PathBuf,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Dimension table for a closed surface of genus g.
    Surface {
        #[arg(long)]
        genus: u32,
        #[arg(long, value_enum)]
        gamma: GammaArg,
        #[arg(long = "closed-range", value_enum)]
        closed_range: Option<YesNo>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply d′ to a form file.
    ApplyDprime {
        form: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Quick internal consistency checks.
    Selftest {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaArg {
    Zero,
    Proper,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum YesNo {
    Yes,
    No,
}

enum Failure {
    Input(String),
    Undecided(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Undecided(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Undecided(m) | Failure::Invariant(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn box_limit() -> Result<u32, Failure> {
    match std::env::var("TUBE_BOX_LIMIT") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Input(format!("TUBE_BOX_LIMIT={v} is not a positive integer"))),
        Err(_) => Ok(DEFAULT_BOX_LIMIT),
    }
}

impl Common {
    fn config(&self) -> Result<CertifyConfig, Failure> {
        let limit = box_limit()?;
        if self.radius > limit {
            return Err(Failure::Input(format!("--box {} exceeds the limit {limit} (set TUBE_BOX_LIMIT to raise it)", self.radius)));
        }
        if self.method != "auto" && DiophantineRegistry::default().get(&self.method).is_none() {
            let names = DiophantineRegistry::default().names().join(", ");
            return Err(Failure::Input(format!("unknown method '{}'; expected auto or one of {names}", self.method)));
        }
        Ok(CertifyConfig { radius: self.radius, depth: self.depth, ..CertifyConfig::default() })
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn structure(path: &PathBuf) -> Result<PeriodMatrix, Failure> {
    read_structure(&path.to_string_lossy()).map_err(input)
}

fn strict_check(strict: bool, closed: ClosedRange) -> Result<(), Failure> {
    if strict && closed == ClosedRange::Undecided {
        return Err(Failure::Undecided("closed range is undecided".into()));
    }
    Ok(())
}

/// Re-reading a written form must reproduce it.
fn form_value(f: &TubeForm) -> Result<(String, Value), Failure> {
    let text = write_form(f);
    let back = parse_form("<generated>", &text).map_err(|e| Failure::Invariant(e.to_string()))?;
    if &back != f {
        return Err(Failure::Invariant("form file does not round-trip".into()));
    }
    let value = serde_json::from_str(&text).map_err(|e| Failure::Invariant(e.to_string()))?;
    Ok((text, value))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { structure: path, lattice, common } => {
            let cfg = common.config()?;
            let a = structure(&path)?;
            let registry = LatticeRegistry::default();
            let strategy = registry.get(&lattice).ok_or_else(|| {
                Failure::Input(format!("unknown lattice strategy '{lattice}'; expected one of {}", registry.names().join(", ")))
            })?;
            let gamma = strategy.compute(&a, common.radius);
            let rep = closed_range_verdict(&a, &common.method, &cfg);
            let mut out = report::solvability(&rep);
            for (k, v) in report::lattice(&gamma).as_object().expect("object") {
                out[k] = v.clone();
            }
            out["lattice_strategy"] = json!(lattice);
            emit(&render(&out), common.output.as_ref())?;
            strict_check(common.strict, rep.closed_range)
        }
        Command::Report { structure: path, common } => {
            let cfg = common.config()?;
            let a = structure(&path)?;
            let rep = closed_range_verdict(&a, &common.method, &cfg);
            emit(&render(&report::solvability(&rep)), common.output.as_ref())?;
            strict_check(common.strict, rep.closed_range)
        }
        Command::Diophantine { structure: path, common } => {
            let cfg = common.config()?;
            let a = structure(&path)?;
            let verdict = DiophantineRegistry::default()
                .certify(&a, &common.method, &cfg)
                .unwrap_or_else(|| DiophantineVerdict::Undecided { reason: "no certifier applies".into() });
            emit(&render(&report::diophantine_report(&verdict)), common.output.as_ref())?;
            strict_check(common.strict, closed_range_from(&verdict))
        }
        Command::Solve { structure: path, form, solution, common } => {
            common.config()?;
            let a = structure(&path)?;
            let f = read_form(&form.to_string_lossy()).map_err(input)?;
            let outcome = global_solve(&a, &f).map_err(input)?;
            let mut out = report::solve_outcome(&outcome);
            if let SolveOutcome::Solved { u, .. } = &outcome {
                let (text, value) = form_value(u)?;
                match &solution {
                    Some(p) => {
                        emit(&text, Some(p))?;
                        out["solution_path"] = json!(p.to_string_lossy());
                    }
                    None => out["solution"] = value,
                }
            }
            emit(&render(&out), common.output.as_ref())
        }
        Command::Counterexample { structure: path, terms, form, common } => {
            let cfg = common.config()?;
            let a = structure(&path)?;
            let cfg = CertifyConfig { witness_depth: cfg.witness_depth.max(terms), ..cfg };
            let verdict = DiophantineRegistry::default().certify(&a, "liouville", &cfg).expect("registered");
            let DiophantineVerdict::StronglySA { witness } = verdict else {
                return Err(Failure::Input(
                    "the structure has no row built from a Liouville constant; no witness is available".into(),
                ));
            };
            let f = counterexample(&a, &witness, terms as usize).map_err(input)?;
            let cert = certify_counterexample(&a, &f).map_err(|e| Failure::Invariant(e.to_string()))?;
            let mut out = report::certificate(&cert);
            out["closed_range"] = json!(ClosedRange::No.as_str());
            let (text, value) = form_value(&f)?;
            match &form {
                Some(p) => {
                    emit(&text, Some(p))?;
                    out["form_path"] = json!(p.to_string_lossy());
                }
                None => out["form"] = value,
            }
            emit(&render(&out), common.output.as_ref())
        }
        Command::Isomorphism { structure: path, degree, common } => {
            let cfg = common.config()?;
            let a = structure(&path)?;
            if degree > a.n() {
                return Err(Failure::Input(format!("--degree {degree} exceeds n = {}", a.n())));
            }
            let cfg = CertifyConfig { radius: cfg.radius.min(32), ..cfg };
            let rep = strong_isomorphism_report(&a, degree, common.radius, &cfg);
            emit(&render(&report::isomorphism(&rep)), common.output.as_ref())?;
            strict_check(common.strict, rep.degree1_closed_range)
        }
        Command::Surface { genus, gamma, closed_range, output } => {
            let gamma_class = match gamma {
                GammaArg::Zero => GammaClass::Zero,
                GammaArg::Proper => GammaClass::InfiniteProper,
                GammaArg::Full => GammaClass::Full,
            };
            let degree1_closed_range = match closed_range {
                Some(YesNo::Yes) => Tristate::Yes,
                Some(YesNo::No) => Tristate::No,
                None => Tristate::Unknown,
            };
            let profile = SurfaceProfile { genus, gamma_class, degree1_closed_range };
            let mut out = report::surface(&profile);
            if genus >= 2 {
                let cases: Vec<Value> = [LambdaClass::RationalQ, LambdaClass::NonLiouvilleIrrational, LambdaClass::Liouville]
                    .into_iter()
                    .map(|l| report::failure_summary(&dm_failure_summary(genus, l).expect("genus checked")))
                    .collect();
                out["failure_summary"] = json!(cases);
            }
            emit(&render(&out), output.as_ref())
        }
        Command::ApplyDprime { form, structure: path, output } => {
            let a = structure(&path)?;
            let f = read_form(&form.to_string_lossy()).map_err(input)?;
            let df = dprime(&a, &f).map_err(input)?;
            let (text, _) = form_value(&df)?;
            emit(&text, output.as_ref())
        }
        Command::Selftest { output } => {
            let checks = selftest();
            let ok = checks.iter().all(|(_, pass)| *pass);
            let list: Vec<Value> = checks.iter().map(|(name, pass)| json!({"check": name, "pass": pass})).collect();
            emit(&render(&json!({"checks": list, "pass": ok})), output.as_ref())?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Invariant("selftest failed".into()))
            }
        }
    }
}

fn selftest() -> Vec<(&'static str, bool)> {
    let a = PeriodMatrix::rational(&[&[(1, 2), (0, 1)], &[(1, 3), (2, 5)]]);
    let mut complex_ok = true;
    let mut solve_ok = true;
    for seed in 0..20 {
        for q in 1..=a.n() {
            let f = random_closed_form(seed, &a, q, 3, false);
            complex_ok &= q == a.n() || dprime(&a, &f).is_ok_and(|g| g.is_zero());
            solve_ok &= match global_solve(&a, &f) {
                Ok(SolveOutcome::Solved { u, .. }) => dprime(&a, &u).is_ok_and(|du| du == f),
                _ => false,
            };
        }
    }
    let registry = LatticeRegistry::default();
    let (exact, boxed) = (registry.get("exact").expect("registered"), registry.get("box").expect("registered"));
    let small = PeriodMatrix::rational(&[&[(1, 2), (1, 3)], &[(1, 4), (0, 1)]]);
    let lattice_ok = exact.compute(&small, 0).basis() == boxed.compute(&small, 12).basis();
    let rational_full = classify(&gamma_lattice(&a)).class == GammaClass::Full || gamma_lattice(&a).rank() == a.m();
    let surfaces_ok = (0..=100).all(euler_index_check);
    vec![
        ("dprime_squares_to_zero", complex_ok),
        ("solve_round_trip", solve_ok),
        ("lattice_strategies_agree", lattice_ok),
        ("rational_gamma_full_rank", rational_full),
        ("surface_index", surfaces_ok),
    ]
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tube: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
