//! Command-line front end: validate, run, sweep, manufactured solutions, resume.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chd_galerkin::experiments::{
    manufactured_solution_study, reference_mms_model, sweep_vanishing_chemotaxis, sweep_vanishing_permeability,
    Manufactured, SweepTable,
};
use chd_galerkin::io::{load_config, resume_from_dir, run_to_dir, RunConfig};
use chd_galerkin::spectral::Domain;
use chd_galerkin::{Error, Result};

#[derive(Parser)]
#[command(name = "chd", version, about = "Cahn-Hilliard-Darcy spectral Galerkin runs and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; the reference run when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the RNG seed of the initial data.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the diagnostics cadence (in steps).
    #[arg(long, global = true)]
    cadence: Option<u64>,
    /// Reject unknown configuration keys.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the admissibility report; nonzero exit when it fails.
    Validate,
    /// Run to the final time, writing diagnostics, snapshots and a checkpoint.
    Run,
    /// Vanishing-permeability sweep with b = K.
    SweepK {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.25, 0.0625, 0.015625])]
        values: Vec<f64>,
    },
    /// Vanishing-chemotaxis sweep with b = chi.
    SweepChi {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5, 0.25, 0.125])]
        values: Vec<f64>,
    },
    /// Manufactured-solution study on the unit interval; prints fitted rates.
    Mms {
        #[arg(long, value_delimiter = ',', default_values_t = [3, 4, 6, 8])]
        modes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 5e-3, 2.5e-3, 1.25e-3])]
        dts: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        t_end: f64,
    },
    /// Continue the run stored in --out from its checkpoint.
    Resume,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::StepFailure { .. } | Error::BlowUp { .. } | Error::NonFinite(_) => 3,
        Error::Io { .. } | Error::Corrupt { .. } => 4,
        _ => 2,
    }
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let (cfg, warnings) = load_config(p, self.strict)?;
                for w in warnings {
                    eprintln!("warning: {w}");
                }
                cfg
            }
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(c) = self.cadence {
            cfg.output.cadence = c;
        }
        if let Some(o) = &self.out {
            cfg.output.dir = Some(o.clone());
        }
        Ok(cfg)
    }

    fn out_dir(&self, cfg: Option<&RunConfig>) -> Result<PathBuf> {
        self.out
            .clone()
            .or_else(|| cfg.and_then(|c| c.output.dir.clone()))
            .ok_or_else(|| Error::Config("an output directory is required (--out)".into()))
    }
}

fn print_table(t: &SweepTable) {
    print!("{}", t.to_csv());
    if !t.is_complete() {
        eprintln!("warning: some sweep members failed");
    }
}

fn ensure_dir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::Io {
        path: p.to_path_buf(),
        source: e,
    })
}

fn execute(cli: &Cli) -> Result<()> {
    let c = &cli.common;
    match &cli.command {
        Command::Validate => {
            let cfg = c.load()?;
            let report = cfg.validate()?;
            println!("{report}");
            cfg.build()?;
        }
        Command::Run => {
            let cfg = c.load()?;
            let out = c.out_dir(Some(&cfg))?;
            let setup = cfg.build()?;
            let r = run_to_dir(&setup, &out)?;
            println!(
                "reached t = {} after {} steps; output in {}",
                r.final_state.t,
                r.final_state.step,
                out.display()
            );
        }
        Command::SweepK { values } | Command::SweepChi { values } => {
            let cfg = c.load()?;
            let out = c.out.clone().or(cfg.output.dir.clone());
            if let Some(o) = &out {
                ensure_dir(o)?;
            }
            let t = if matches!(cli.command, Command::SweepK { .. }) {
                sweep_vanishing_permeability(&cfg, values, out.as_deref())?
            } else {
                sweep_vanishing_chemotaxis(&cfg, values, out.as_deref())?
            };
            print_table(&t);
        }
        Command::Mms { modes, dts, t_end } => {
            let model = match &c.config {
                Some(_) => c.load()?.model()?,
                None => reference_mms_model()?,
            };
            let fields = Manufactured::decaying_cosines();
            let study = manufactured_solution_study(&model, Domain::interval(1.0)?, &fields, modes, dts, *t_end)?;
            let mut csv = String::from("kind,x,error\n");
            for (k, e) in &study.spatial {
                csv += &format!("space,{k},{e:.16e}\n");
            }
            for (dt, e) in &study.temporal {
                csv += &format!("time,{dt:.16e},{e:.16e}\n");
            }
            print!("{csv}");
            match &study.space_fit {
                Some(f) => println!("space slope {:.4} (residual {:.2e})", f.slope, f.residual),
                None => println!("space slope n/a"),
            }
            match &study.time_fit {
                Some(f) => println!("time slope {:.4} (residual {:.2e})", f.slope, f.residual),
                None => println!("time slope n/a"),
            }
            if let Some(o) = &c.out {
                ensure_dir(o)?;
                let p = o.join("mms.csv");
                std::fs::write(&p, csv).map_err(|e| Error::Io { path: p, source: e })?;
            }
        }
        Command::Resume => {
            let out = c.out_dir(None)?;
            let r = resume_from_dir(&out, c.strict)?;
            println!("resumed to t = {} after {} steps", r.final_state.t, r.final_state.step);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
