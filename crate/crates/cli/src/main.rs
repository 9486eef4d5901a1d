//! `qseries`: list, verify and evaluate q-series identities.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | `verify` / `check-all`: at least one check failed |
//! | 2 | usage, parse or domain error; unknown identity |
//! | 3 | `verify`: the sampler found no in-domain parameters |
//! | 4 | `eval`: parameters outside the convergence region |
//! | 5 | `eval`: pole hit or term budget exhausted |

mod literal;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qseries::{
    catalog, check_all, eval_phi, eval_psi, run_verification, ComplexScalar, Error, EvalConfig,
    EvalStatus, Param, QBase, SampleSpec, SampleStatus, SeriesSpec,
};

use literal::{format_complex, parse_complex, parse_list};

#[derive(Parser)]
#[command(name = "qseries", version, about = "Evaluate q-series and verify q-series identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the identity catalog.
    List {
        /// Print a JSON array instead of one line per entry.
        #[arg(long)]
        json: bool,
    },
    /// Check one identity on seeded in-domain samples.
    Verify {
        #[arg(long)]
        identity: String,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        q_min: Option<f64>,
        #[arg(long)]
        q_max: Option<f64>,
        #[arg(long)]
        margin: Option<f64>,
        /// Write the JSON report here (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sum one series.
    Eval {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Numerator parameters, comma separated.
        #[arg(long, allow_hyphen_values = true, default_value = "", value_parser = list_arg)]
        num: List,
        /// Denominator parameters, comma separated.
        #[arg(long, allow_hyphen_values = true, default_value = "", value_parser = list_arg)]
        den: List,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        q: ComplexScalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        z: ComplexScalar,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Verify every entry, the integer specializations and the equivalence check.
    CheckAll {
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone)]
struct List(Vec<ComplexScalar>);

fn list_arg(s: &str) -> Result<List, String> {
    parse_list(s).map(List)
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Phi,
    Psi,
}

const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::List { json } => list(json),
        Command::Verify {
            identity,
            samples,
            seed,
            tol,
            q_min,
            q_max,
            margin,
            json,
        } => {
            let mut spec = SampleSpec::new(&identity, samples as usize, seed);
            spec.q_range = [q_min.unwrap_or(spec.q_range[0]), q_max.unwrap_or(spec.q_range[1])];
            spec.margin = margin.unwrap_or(spec.margin);
            verify(&spec, tol, json)
        }
        Command::Eval {
            kind,
            num,
            den,
            q,
            z,
            tol,
        } => eval(kind, num.0, den.0, q, z, tol),
        Command::CheckAll { samples, seed } => run_check_all(samples as usize, seed),
    };
    ExitCode::from(code)
}

fn config(tol: Option<f64>) -> Result<EvalConfig, Error> {
    let cfg = EvalConfig::default();
    let cfg = tol.map_or(cfg, |t| cfg.with_tol(t));
    cfg.validate()?;
    Ok(cfg)
}

fn list(json: bool) -> u8 {
    if json {
        println!("{}", serde_json::to_string_pretty(catalog()).expect("catalog serializes"));
        return 0;
    }
    for d in catalog() {
        println!(
            "{:<26} [{}]  {}  ({})",
            d.id,
            d.slots.join(", "),
            d.constraint,
            d.citation
        );
    }
    0
}

fn verify(spec: &SampleSpec, tol: Option<f64>, json: Option<PathBuf>) -> u8 {
    let report = match config(tol).and_then(|cfg| run_verification(spec, &cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::Exhausted { .. } => 3,
                _ => USAGE,
            };
        }
    };
    let to_stdout = json.as_deref().is_some_and(|p| p.as_os_str() == "-");
    if let Some(path) = json.filter(|_| !to_stdout) {
        if let Err(e) = std::fs::write(&path, report.to_json()) {
            eprintln!("error: writing {}: {e}", path.display());
            return 1;
        }
    }
    let s = &report.summary;
    let summary = [
        format!("identity            {}", report.identity_id),
        format!("seed                {}", report.seed),
        format!("samples             {}", s.count),
        format!("accepted            {}", s.accepted),
        format!("failed              {}", s.failed),
        format!("rejected_domain     {}", s.rejected_domain),
        format!("max_rel_residual    {:.16e}", s.max_rel_residual),
        format!("median_rel_residual {:.16e}", s.median_rel_residual),
        format!("wall_time_ms        {}", s.wall_time_ms),
    ];
    let failures = report.samples.iter().filter(|r| r.status != SampleStatus::Pass).map(|r| {
        format!(
            "failed sample {}: {} params {}",
            r.index,
            r.error.clone().unwrap_or_else(|| format!(
                "rel_residual {:.16e} > {:.16e}",
                r.rel_residual.unwrap_or(f64::NAN),
                r.tol_check.unwrap_or(f64::NAN)
            )),
            serde_json::to_string(&r.params).expect("params serialize")
        )
    });
    for line in summary.into_iter().chain(failures) {
        // keep stdout pure JSON when the report goes there
        if to_stdout {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    if to_stdout {
        println!("{}", report.to_json());
    }
    u8::from(s.failed > 0)
}

fn eval(
    kind: Kind,
    num: Vec<ComplexScalar>,
    den: Vec<ComplexScalar>,
    q: ComplexScalar,
    z: ComplexScalar,
    tol: Option<f64>,
) -> u8 {
    let singles = |v: Vec<ComplexScalar>| v.into_iter().map(Param::Single).collect::<Vec<_>>();
    let result = config(tol).and_then(|cfg| {
        let q = QBase::new(q)?;
        match kind {
            Kind::Phi => eval_phi(&SeriesSpec::unilateral(singles(num), singles(den), q, z)?, &cfg),
            Kind::Psi => eval_psi(&SeriesSpec::bilateral(singles(num), singles(den), q, z)?, &cfg),
        }
    });
    let res = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE;
        }
    };
    println!("value      {}", format_complex(res.value));
    println!("err        {:.16e}", res.err);
    println!("status     {}", status_name(res.status));
    println!("n_forward  {}", res.n_forward);
    println!("n_backward {}", res.n_backward);
    if let Some(d) = &res.detail {
        println!("detail     {d}");
    }
    match res.status {
        EvalStatus::Converged => 0,
        EvalStatus::DivergentRegion => 4,
        EvalStatus::PoleHit | EvalStatus::Budget => 5,
    }
}

fn status_name(s: EvalStatus) -> &'static str {
    match s {
        EvalStatus::Converged => "converged",
        EvalStatus::Budget => "budget",
        EvalStatus::PoleHit => "pole_hit",
        EvalStatus::DivergentRegion => "divergent_region",
    }
}

fn run_check_all(samples: usize, seed: u64) -> u8 {
    match check_all(samples, seed, &EvalConfig::default()) {
        Ok(lines) => {
            for l in &lines {
                println!("{l}");
            }
            u8::from(!lines.iter().all(|l| l.pass()))
        }
        Err(e) => {
            eprintln!("error: {e}");
            USAGE
        }
    }
}
