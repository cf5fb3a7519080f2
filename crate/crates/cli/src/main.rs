//! bellcert: scores, bounds, oracle sampling, certified global bounds and
//! threshold scans for singlet extraction from block-diagonal CHSH states.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bellcert_core::bounds::{
    comparison_fidelity_bound, epsilon_rho_max_raw, epsilon_rho_raw, iota_sup,
    residual_cube_certificate, BranchChoice,
};
use bellcert_core::certifier::{certify, resume, CertStatus, Checkpoint};
use bellcert_core::chsh::{chsh_score, oracle_fidelity, reduce_strategy, StateFamilyParams};
use bellcert_core::sample::{random_strategy, rng_from_seed};
use bellcert_core::search::{epsilon_problem, full_domain, scan, MaximizerConfig, ScanConfig};

use report::{
    emit, exit_code, scan_csv, timestamp_unix, to_json, verdict_str, CertifyReport, EvalReport,
    Format, OracleReport, ReproReport, ScanReport, ScoreReport, SCHEMA_VERSION,
};

const USAGE_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "bellcert",
    version,
    about = "Certified bounds on singlet extraction from block-diagonal CHSH states",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = CliFormat::Human)]
    format: CliFormat,

    /// Write the report to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliFormat {
    Human,
    Structured,
}

impl From<CliFormat> for Format {
    fn from(f: CliFormat) -> Format {
        match f {
            CliFormat::Human => Format::Human,
            CliFormat::Structured => Format::Structured,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliBranch {
    Plus,
    Minus,
    Both,
}

impl CliBranch {
    fn choice(self) -> BranchChoice {
        match self {
            CliBranch::Plus => BranchChoice::Plus,
            CliBranch::Minus => BranchChoice::Minus,
            CliBranch::Both => BranchChoice::Both,
        }
    }

    fn name(self) -> &'static str {
        match self {
            CliBranch::Plus => "plus",
            CliBranch::Minus => "minus",
            CliBranch::Both => "both",
        }
    }
}

/// State-family parameters, defaulting to the published example.
#[derive(Args)]
struct FamilyArgs {
    /// Weight of the maximally entangled block
    #[arg(long, default_value_t = 0.061)]
    nu: f64,

    /// Corner mass p_C
    #[arg(long, default_value_t = 0.61381508)]
    pc: f64,

    /// Corner split q (the closed-form bound itself fixes q = 1/2)
    #[arg(long, default_value_t = 0.5)]
    q: f64,
}

impl FamilyArgs {
    fn params(&self) -> Result<StateFamilyParams<f64>, bellcert_core::Error> {
        StateFamilyParams::new(self.nu, self.pc, self.q)
    }
}

#[derive(Args)]
struct EngineArgs {
    /// Upper bound to certify
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,

    /// Initial grid step (defaults to pi/16)
    #[arg(long)]
    delta0: Option<f64>,

    /// Subdivision depth cap
    #[arg(long, default_value_t = 60)]
    max_depth: u32,

    /// Evaluation budget (total, including any resumed prefix)
    #[arg(long, default_value_t = 1_000_000_000)]
    budget: u64,

    /// Floating-point margin subtracted from the threshold
    #[arg(long, default_value_t = 1e-9)]
    fp_margin: f64,

    /// Worker threads
    #[arg(long, default_value_t = 1)]
    workers: usize,

    /// RNG seed (echoed into reports; certification itself is deterministic)
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Where to store the checkpoint of an interrupted run
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// CHSH score 2 + (2*sqrt(2) - 2) * nu of the state family
    Score {
        #[arg(long)]
        nu: f64,
    },

    /// Evaluate the closed-form bound at a reduced point (a0t a1t b0t b1t theta)
    Eval {
        #[command(flatten)]
        family: FamilyArgs,

        /// Branch of the bound
        #[arg(long, value_enum, default_value_t = CliBranch::Both)]
        branch: CliBranch,

        /// The five reduced coordinates, each in [0, pi/2]
        #[arg(value_name = "COORD", num_args = 5)]
        point: Vec<f64>,
    },

    /// Sample random six-channel strategies and check the bound dominates
    /// the exact extracted fidelity
    Oracle {
        #[command(flatten)]
        family: FamilyArgs,

        #[arg(long, default_value_t = 10_000)]
        samples: u64,

        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Certify the bound <= threshold on [0, pi/2]^5 outside the excluded cube
    Certify {
        #[command(flatten)]
        family: FamilyArgs,

        #[arg(long, value_enum, default_value_t = CliBranch::Both)]
        branch: CliBranch,

        #[command(flatten)]
        engine: EngineArgs,
    },

    /// Resume an interrupted certification from its checkpoint
    Resume {
        /// Checkpoint produced by a budget-exceeded run
        #[arg(long)]
        checkpoint: PathBuf,

        /// New total evaluation budget
        #[arg(long)]
        budget: Option<u64>,

        #[arg(long, default_value_t = 1)]
        workers: usize,

        /// Where to store the next checkpoint if the budget is hit again
        #[arg(long)]
        checkpoint_out: Option<PathBuf>,
    },

    /// Scan nu, minimizing the bound maximum over the corner mass
    Scan {
        #[arg(long, default_value_t = 0.0)]
        nu_start: f64,

        #[arg(long, default_value_t = 0.1)]
        nu_end: f64,

        #[arg(long, default_value_t = 0.001)]
        nu_step: f64,

        #[arg(long, default_value_t = 1e-6)]
        pc_tol: f64,

        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Reproduce the published example end to end (defaults need no flags)
    Repro {
        #[command(flatten)]
        engine: EngineArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format: Format = cli.format.into();
    let out = cli.out.clone();
    match run(cli, format, out.as_deref()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}

fn run(
    cli: Cli,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<u8, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Score { nu } => {
            let chsh = chsh_score(nu)?;
            let report = ScoreReport {
                schema_version: SCHEMA_VERSION,
                command: "score".into(),
                timestamp_unix: timestamp_unix(),
                nu,
                chsh,
                comparison_fidelity_bound: comparison_fidelity_bound(chsh)?,
            };
            let text = match format {
                Format::Structured => to_json(&report),
                Format::Human => format!(
                    "S = {:.16}\ndevice-dependent fidelity floor S/(2*sqrt(2)) = {:.16}\n",
                    report.chsh, report.comparison_fidelity_bound
                ),
            };
            emit(&text, out)?;
            Ok(0)
        }

        Command::Eval {
            family,
            branch,
            point,
        } => {
            let p = family.params()?;
            let x: [f64; 5] = point
                .as_slice()
                .try_into()
                .map_err(|_| "exactly five coordinates required")?;
            for (i, v) in x.iter().enumerate() {
                if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(v) {
                    return Err(format!("coordinate {i} out of [0, pi/2]: {v}").into());
                }
            }
            let plus = epsilon_rho_raw(&x, p.nu, p.p_c, 1.0);
            let minus = epsilon_rho_raw(&x, p.nu, p.p_c, -1.0);
            let eps = match branch.choice() {
                BranchChoice::Plus => plus,
                BranchChoice::Minus => minus,
                BranchChoice::Both => epsilon_rho_max_raw(&x, p.nu, p.p_c),
            };
            let report = EvalReport {
                schema_version: SCHEMA_VERSION,
                command: "eval".into(),
                timestamp_unix: timestamp_unix(),
                nu: p.nu,
                pc: p.p_c,
                q: p.q,
                branch: branch.name().into(),
                point: x,
                epsilon: eps,
                epsilon_plus: plus,
                epsilon_minus: minus,
                fidelity_bound: 0.25 * (1.0 + eps),
            };
            let text = match format {
                Format::Structured => to_json(&report),
                Format::Human => format!(
                    "eps({}) = {:.16}\neps+ = {:.16}\neps- = {:.16}\nfidelity bound (1+eps)/4 = {:.16}\n",
                    report.branch, report.epsilon, report.epsilon_plus, report.epsilon_minus,
                    report.fidelity_bound
                ),
            };
            emit(&text, out)?;
            Ok(0)
        }

        Command::Oracle {
            family,
            samples,
            seed,
        } => {
            let p = family.params()?;
            let mut rng = rng_from_seed(seed);
            let mut worst_slack = f64::INFINITY;
            let mut best_fidelity: f64 = 0.0;
            let mut violations = 0u64;
            for _ in 0..samples {
                let strat = random_strategy::<f64, _>(&mut rng);
                let fid = oracle_fidelity(&p, &strat)?;
                best_fidelity = best_fidelity.max(fid);
                let (x, _) = reduce_strategy(&strat);
                let bound = epsilon_rho_max_raw(&x.as_array(), p.nu, p.p_c);
                let slack = bound - (4.0 * fid - 1.0);
                worst_slack = worst_slack.min(slack);
                if slack < -1e-9 {
                    violations += 1;
                }
            }
            let dp = oracle_fidelity(&p, &bellcert_core::chsh::Strategy::discard_and_prepare())?;
            let report = OracleReport {
                schema_version: SCHEMA_VERSION,
                command: "oracle".into(),
                timestamp_unix: timestamp_unix(),
                nu: p.nu,
                pc: p.p_c,
                q: p.q,
                seed,
                samples,
                violations,
                worst_slack,
                best_fidelity,
                discard_and_prepare_fidelity: dp,
            };
            let text = match format {
                Format::Structured => to_json(&report),
                Format::Human => format!(
                    "samples             {}\nbound violations    {}\nworst slack         {:.9}\nbest fidelity       {:.9}\ndiscard-and-prepare {:.9}\n",
                    report.samples,
                    report.violations,
                    report.worst_slack,
                    report.best_fidelity,
                    report.discard_and_prepare_fidelity
                ),
            };
            emit(&text, out)?;
            Ok(if violations == 0 { 0 } else { 1 })
        }

        Command::Certify {
            family,
            branch,
            engine,
        } => {
            let p = family.params()?;
            let (code, report) = run_certification(&p, branch, &engine, None)?;
            let text = match format {
                Format::Structured => to_json(&report),
                Format::Human => human_certify(&report),
            };
            emit(&text, out)?;
            Ok(code)
        }

        Command::Resume {
            checkpoint,
            budget,
            workers,
            checkpoint_out,
        } => {
            let ckpt: Checkpoint<f64, 5> = Checkpoint::load(&checkpoint)?;
            let tag = ckpt.config.objective_tag.clone();
            let (p, branch) = parse_objective_tag(&tag)?;
            let engine = EngineArgs {
                threshold: ckpt.config.threshold,
                delta0: Some(ckpt.config.initial_delta),
                max_depth: ckpt.config.max_depth,
                budget: budget.unwrap_or(ckpt.boxes_processed.saturating_mul(4).max(1_000_000)),
                fp_margin: ckpt.config.fp_margin,
                workers,
                seed: 0,
                checkpoint: checkpoint_out.or(Some(checkpoint)),
            };
            let (code, report) = run_certification(&p, branch, &engine, Some(&ckpt))?;
            let text = match format {
                Format::Structured => to_json(&report),
                Format::Human => human_certify(&report),
            };
            emit(&text, out)?;
            Ok(code)
        }

        Command::Scan {
            nu_start,
            nu_end,
            nu_step,
            pc_tol,
            seed,
        } => {
            let mut cfg = ScanConfig::new(nu_start, nu_end, nu_step)?;
            cfg.pc_tolerance = pc_tol;
            cfg.maximizer = MaximizerConfig {
                seed,
                ..MaximizerConfig::default()
            };
            let outcome = scan(&cfg)?;
            let candidate = outcome.candidate.map(|i| &outcome.rows[i]);
            let report = ScanReport {
                schema_version: SCHEMA_VERSION,
                command: "scan".into(),
                timestamp_unix: timestamp_unix(),
                nu_start,
                nu_end,
                nu_step,
                pc_tolerance: pc_tol,
                seed,
                candidate_nu: candidate.map(|r| r.nu),
                candidate_chsh: candidate.map(|r| r.chsh),
                rows: outcome.rows.clone(),
            };
            let text = match format {
                Format::Structured => to_json(&report),
                Format::Human => scan_csv(&report.rows),
            };
            emit(&text, out)?;
            Ok(0)
        }

        Command::Repro { engine } => {
            let p = StateFamilyParams::published();
            let residual = residual_cube_certificate(&p);
            let (code, cert) = run_certification(&p, CliBranch::Both, &engine, None)?;
            let bounded = residual.valid && cert.verdict == "certified";
            let statement = if bounded {
                "extractability <= 1/2: certified on the full domain".to_string()
            } else {
                format!(
                    "not concluded: certifier verdict '{}', residual cube {}",
                    cert.verdict,
                    if residual.valid { "valid" } else { "invalid" }
                )
            };
            let report = ReproReport {
                schema_version: SCHEMA_VERSION,
                command: "repro".into(),
                timestamp_unix: timestamp_unix(),
                nu: p.nu,
                pc: p.p_c,
                q: p.q,
                chsh: chsh_score(p.nu)?,
                iota_sup: iota_sup(&p),
                lambda_max_t: residual.lambda_max,
                residual_valid: residual.valid,
                certifier_verdict: cert.verdict.clone(),
                boxes_processed: cert.boxes_processed,
                max_center_value: cert.max_center_value,
                frontier_size: cert.frontier_size,
                extractability_bounded: bounded,
                statement,
                checkpoint_path: cert.checkpoint_path.clone(),
                config_hash: cert.config_hash.clone(),
            };
            let text = match format {
                Format::Structured => to_json(&report),
                Format::Human => format!(
                    "CHSH score          {:.10}\niota_sup            {:.10}\nlambda_max(T)       {:.10} ({})\ncertifier           {} after {} boxes (max center {:.9})\n{}\n",
                    report.chsh,
                    report.iota_sup,
                    report.lambda_max_t,
                    if report.residual_valid { "valid" } else { "invalid" },
                    report.certifier_verdict,
                    report.boxes_processed,
                    report.max_center_value,
                    report.statement
                ),
            };
            emit(&text, out)?;
            Ok(code)
        }
    }
}

/// Shared certify/resume driver; returns (exit code, report).
fn run_certification(
    p: &StateFamilyParams<f64>,
    branch: CliBranch,
    engine: &EngineArgs,
    ckpt: Option<&Checkpoint<f64, 5>>,
) -> Result<(u8, CertifyReport), Box<dyn std::error::Error>> {
    let (nu, p_c) = (p.nu, p.p_c);
    let choice = branch.choice();
    let objective = move |x: &[f64; 5]| match choice {
        BranchChoice::Plus => epsilon_rho_raw(x, nu, p_c, 1.0),
        BranchChoice::Minus => epsilon_rho_raw(x, nu, p_c, -1.0),
        BranchChoice::Both => epsilon_rho_max_raw(x, nu, p_c),
    };
    let mut problem = epsilon_problem(
        &objective,
        p,
        choice,
        full_domain(),
        engine.threshold,
        engine.budget,
        engine.workers,
    );
    if let Some(d0) = engine.delta0 {
        problem.settings.initial_delta = d0;
    }
    problem.settings.max_depth = engine.max_depth;
    problem.settings.fp_margin = engine.fp_margin;

    let outcome = match ckpt {
        Some(c) => resume(&problem, c)?,
        None => certify(&problem)?,
    };

    let mut checkpoint_path = None;
    if outcome.status == CertStatus::BudgetExceeded {
        if let Some(path) = &engine.checkpoint {
            Checkpoint::from_report(&outcome).save(path)?;
            checkpoint_path = Some(path.display().to_string());
        }
    }

    let report = CertifyReport {
        schema_version: SCHEMA_VERSION,
        command: if ckpt.is_some() { "resume" } else { "certify" }.into(),
        timestamp_unix: timestamp_unix(),
        nu: p.nu,
        pc: p.p_c,
        q: p.q,
        branch: branch.name().into(),
        workers: engine.workers,
        seed: engine.seed,
        verdict: verdict_str(outcome.status).into(),
        iota_sup: iota_sup(p),
        lambda_max_t: residual_cube_certificate(p).lambda_max,
        residual_valid: residual_cube_certificate(p).valid,
        boxes_processed: outcome.boxes_processed,
        eliminated: outcome.eliminated,
        excluded: outcome.excluded,
        max_center_value: outcome.max_center_value,
        witness: outcome.witness,
        frontier_size: outcome.frontier.len(),
        checkpoint_path,
        config_hash: outcome.config_hash.clone(),
        config: outcome.config,
    };
    Ok((exit_code(outcome.status) as u8, report))
}

fn human_certify(r: &CertifyReport) -> String {
    let mut s = format!(
        "verdict            {}\niota_sup           {:.10}\nboxes processed    {}\neliminated         {}\nexcluded           {}\nmax center value   {:.12}\nfrontier size      {}\nconfig hash        {}\n",
        r.verdict,
        r.iota_sup,
        r.boxes_processed,
        r.eliminated,
        r.excluded,
        r.max_center_value,
        r.frontier_size,
        r.config_hash
    );
    if let Some(w) = &r.witness {
        s.push_str(&format!(
            "witness            {:?} -> {:.12}\n",
            w.point, w.value
        ));
    }
    if let Some(p) = &r.checkpoint_path {
        s.push_str(&format!("checkpoint         {p}\n"));
    }
    s
}

/// Rebuild the objective identity stored in a checkpoint tag, e.g.
/// `epsilon_rho|nu=0.061|pc=0.61381508|q=0.5|branch=both`.
fn parse_objective_tag(
    tag: &str,
) -> Result<(StateFamilyParams<f64>, CliBranch), Box<dyn std::error::Error>> {
    let mut parts = tag.split('|');
    if parts.next() != Some("epsilon_rho") {
        return Err(format!("checkpoint objective {tag:?} is not an epsilon_rho run").into());
    }
    let mut nu = None;
    let mut pc = None;
    let mut branch = None;
    for part in parts {
        if let Some(v) = part.strip_prefix("nu=") {
            nu = Some(v.parse()?);
        } else if let Some(v) = part.strip_prefix("pc=") {
            pc = Some(v.parse()?);
        } else if let Some(v) = part.strip_prefix("branch=") {
            branch = Some(match v {
                "plus" => CliBranch::Plus,
                "minus" => CliBranch::Minus,
                "both" => CliBranch::Both,
                other => return Err(format!("unknown branch {other:?}").into()),
            });
        }
    }
    let (nu, pc) = (
        nu.ok_or("missing nu in objective tag")?,
        pc.ok_or("missing pc in objective tag")?,
    );
    Ok((
        StateFamilyParams::new(nu, pc, 0.5)?,
        branch.ok_or("missing branch in objective tag")?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bellcert_core::search::epsilon_objective_tag;

    #[test]
    fn objective_tag_round_trip() {
        let p = StateFamilyParams::<f64>::published();
        let tag = epsilon_objective_tag(&p, BranchChoice::Both);
        let (q, branch) = parse_objective_tag(&tag).unwrap();
        assert_eq!(q.nu, p.nu);
        assert_eq!(q.p_c, p.p_c);
        assert!(matches!(branch, CliBranch::Both));
    }
}
