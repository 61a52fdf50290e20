use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsRecord, Recorder};
use crate::dynamics::{run, SimState};
use crate::error::{Error, Result};
use crate::io::{write_diagnostics_csv, write_field_snapshot, RunConfig};
use crate::model::VolumeSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// `K`, with the no-flow system as the limit.
    Permeability,
    /// `χ`, with the chemotaxis-free system as the limit.
    Chemotaxis,
}

impl SweepParameter {
    pub fn symbol(self) -> &'static str {
        match self {
            SweepParameter::Permeability => "K",
            SweepParameter::Chemotaxis => "chi",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonNorm {
    /// `max_t ‖·‖_{L²}`.
    #[default]
    LinfL2,
    /// `(∫ ‖·‖²_{H¹} dt)^{1/2}`, trapezoid over the recorded times.
    L2H1,
}

/// One family of runs approaching a limit system. The Robin coefficient
/// follows the parameter, `b = value`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub base: RunConfig,
    pub parameter: SweepParameter,
    /// Strictly decreasing; only the last entry may be 0, which is the limit itself.
    pub values: Vec<f64>,
    pub norm: ComparisonNorm,
}

impl SweepSpec {
    pub fn new(base: RunConfig, parameter: SweepParameter, values: Vec<f64>) -> Self {
        SweepSpec {
            base,
            parameter,
            values,
            norm: ComparisonNorm::default(),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        for (i, &v) in self.values.iter().enumerate() {
            let last = i + 1 == self.values.len();
            if !(v.is_finite() && (v > 0.0 || (v == 0.0 && last))) {
                return Err(Error::Config(format!("sweep value {v} must be positive")));
            }
            if i > 0 && v >= self.values[i - 1] {
                return Err(Error::Config("sweep values must be strictly decreasing".into()));
            }
        }
        Ok(())
    }

    /// The limit configuration: Robin exchange off and the limit mode on.
    pub fn limit(&self) -> RunConfig {
        let mut c = self.base.clone();
        c.params.boundary_exchange = 0.0;
        match self.parameter {
            SweepParameter::Permeability => {
                c.limits.no_flow = true;
                c.volume_source = VolumeSource::Zero;
            }
            SweepParameter::Chemotaxis => c.limits.no_chemotaxis = true,
        }
        c
    }

    pub fn member(&self, value: f64) -> RunConfig {
        if value == 0.0 {
            return self.limit();
        }
        let mut c = self.base.clone();
        c.params.boundary_exchange = value;
        match self.parameter {
            SweepParameter::Permeability => {
                c.params.permeability = value;
                c.volume_source = VolumeSource::Zero;
            }
            SweepParameter::Chemotaxis => c.params.chemotaxis = value,
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub boundary_exchange: f64,
    /// `‖v‖_{L²(L²)}`.
    pub v_l2l2: f64,
    /// `K^{−1/2}‖v‖_{L²(L²)}`.
    pub v_scaled: f64,
    pub phi_diff: f64,
    pub sigma_diff: f64,
    /// Whether the member satisfies the admissibility audit.
    pub assumptions_hold: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub norm: ComparisonNorm,
    pub rows: Vec<SweepRow>,
    pub limit_failure: Option<String>,
}

impl SweepTable {
    pub fn is_complete(&self) -> bool {
        self.limit_failure.is_none() && self.rows.iter().all(|r| r.failure.is_none())
    }

    /// Whether `column` strictly decreases down the table.
    pub fn strictly_decreasing(&self, column: impl Fn(&SweepRow) -> f64) -> bool {
        self.rows.windows(2).all(|w| column(&w[1]) < column(&w[0]))
    }

    /// `max / min` of `K^{−1/2}‖v‖` over the rows.
    pub fn v_scaled_spread(&self) -> f64 {
        let v: Vec<f64> = self.rows.iter().map(|r| r.v_scaled).collect();
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "{},b,v_l2l2,v_scaled,phi_diff,sigma_diff,assumptions_hold,status\n",
            self.parameter.symbol()
        );
        for r in &self.rows {
            let status = match (&self.limit_failure, &r.failure) {
                (Some(_), _) => "limit-failed".to_string(),
                (None, Some(f)) => format!("failed: {}", f.replace([',', '\n'], ";")),
                (None, None) => "ok".to_string(),
            };
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                r.value, r.boundary_exchange, r.v_l2l2, r.v_scaled, r.phi_diff, r.sigma_diff, r.assumptions_hold, status
            );
        }
        out
    }
}

/// States and diagnostics of one member run.
#[derive(Clone, Debug)]
pub struct MemberRun {
    pub states: Vec<SimState>,
    pub records: Vec<DiagnosticsRecord>,
}

pub fn run_member(cfg: &RunConfig) -> Result<MemberRun> {
    let setup = cfg.build_unchecked()?;
    let mut stepper = setup.stepper()?;
    let mut rec = Recorder::new(&setup.model, &setup.disc);
    let traj = run(
        &mut stepper,
        setup.initial_state()?,
        cfg.t_end,
        cfg.output.cadence,
        &mut rec,
    )?;
    Ok(MemberRun {
        states: traj.snapshots,
        records: rec.into_records(),
    })
}

/// `(φ, σ)` distances between two runs recorded at the same steps.
pub fn difference_norms(a: &[SimState], b: &[SimState], norm: ComparisonNorm) -> Result<(f64, f64)> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.step != y.step) {
        return Err(Error::DimensionMismatch("runs were not recorded at matching steps".into()));
    }
    let basis = &a[0].alpha.basis;
    let weight: Vec<f64> = (0..basis.len())
        .map(|j| match norm {
            ComparisonNorm::LinfL2 => 1.0,
            ComparisonNorm::L2H1 => 1.0 + basis.eigenvalue(j),
        })
        .collect();
    let dist2 = |u: &[f64], v: &[f64]| -> f64 {
        u.iter().zip(v).zip(&weight).map(|((x, y), w)| w * (x - y).powi(2)).sum()
    };
    let series: Vec<(f64, f64, f64)> = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            (
                x.t,
                dist2(&x.alpha.coeffs, &y.alpha.coeffs),
                dist2(&x.gamma.coeffs, &y.gamma.coeffs),
            )
        })
        .collect();
    Ok(match norm {
        ComparisonNorm::LinfL2 => (
            series.iter().map(|s| s.1).fold(0.0, f64::max).sqrt(),
            series.iter().map(|s| s.2).fold(0.0, f64::max).sqrt(),
        ),
        ComparisonNorm::L2H1 => {
            let (mut p, mut s) = (0.0, 0.0);
            for w in series.windows(2) {
                let h = w[1].0 - w[0].0;
                p += 0.5 * h * (w[0].1 + w[1].1);
                s += 0.5 * h * (w[0].2 + w[1].2);
            }
            (p.sqrt(), s.sqrt())
        }
    })
}

/// Worker count from `CHD_THREADS`, else the available parallelism.
pub fn thread_count() -> usize {
    std::env::var("CHD_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Run `configs` on `threads` workers; results come back in input order.
pub fn run_all(configs: &[RunConfig], threads: usize) -> Vec<Result<MemberRun>> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<MemberRun>>>> = Mutex::new((0..configs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.clamp(1, configs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = configs.get(i) else { break };
                let r = run_member(cfg);
                slots.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

/// Run every member and the limit, then tabulate distances to the limit.
///
/// With `out`, each run writes its diagnostics and final snapshot to its own
/// subdirectory and the table goes to `sweep.csv`.
pub fn run_sweep(spec: &SweepSpec, out: Option<&Path>) -> Result<SweepTable> {
    spec.check()?;
    spec.base.build()?;
    let mut configs = vec![spec.limit()];
    configs.extend(spec.values.iter().map(|&v| spec.member(v)));
    let results = run_all(&configs, thread_count());
    let sym = spec.parameter.symbol();
    if let Some(dir) = out {
        for (i, r) in results.iter().enumerate() {
            let Ok(m) = r else { continue };
            let sub = if i == 0 {
                dir.join("limit")
            } else {
                dir.join(format!("{sym}_{:.6e}", spec.values[i - 1]))
            };
            std::fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
            write_diagnostics_csv(&sub.join("diagnostics.csv"), &m.records)?;
            if let Some(last) = m.states.last() {
                write_field_snapshot(last, &sub.join("final.bin"))?;
            }
        }
    }
    let mut results = results.into_iter();
    let limit = results.next().expect("limit run present");
    let limit_failure = limit.as_ref().err().map(|e| e.to_string());
    let mut rows = Vec::new();
    for (&value, member) in spec.values.iter().zip(results) {
        let cfg = &configs[rows.len() + 1];
        let assumptions_hold = cfg.validate().map(|r| r.passed()).unwrap_or(false);
        let mut row = SweepRow {
            value,
            boundary_exchange: cfg.params.boundary_exchange,
            v_l2l2: f64::NAN,
            v_scaled: f64::NAN,
            phi_diff: f64::NAN,
            sigma_diff: f64::NAN,
            assumptions_hold,
            failure: None,
        };
        match (&member, &limit) {
            (Err(e), _) => row.failure = Some(e.to_string()),
            (Ok(m), lim) => {
                let v2 = m.records.last().map_or(0.0, |r| r.accumulated.v2);
                row.v_l2l2 = v2.sqrt();
                row.v_scaled = row.v_l2l2 / cfg.params.permeability.sqrt();
                if let Ok(l) = lim {
                    match difference_norms(&m.states, &l.states, spec.norm) {
                        Ok((p, s)) => (row.phi_diff, row.sigma_diff) = (p, s),
                        Err(e) => row.failure = Some(e.to_string()),
                    }
                }
            }
        }
        rows.push(row);
    }
    let table = SweepTable {
        parameter: spec.parameter,
        norm: spec.norm,
        rows,
        limit_failure,
    };
    if let Some(dir) = out {
        let p = dir.join("sweep.csv");
        std::fs::write(&p, table.to_csv()).map_err(|e| Error::io(&p, e))?;
    }
    Ok(table)
}

/// `K`-sweep with `b = K`; the limit drops the Darcy subsystem.
pub fn sweep_vanishing_permeability(base: &RunConfig, values: &[f64], out: Option<&Path>) -> Result<SweepTable> {
    run_sweep(&SweepSpec::new(base.clone(), SweepParameter::Permeability, values.to_vec()), out)
}

/// `χ`-sweep with `b = χ`; the limit drops every chemotaxis term.
pub fn sweep_vanishing_chemotaxis(base: &RunConfig, values: &[f64], out: Option<&Path>) -> Result<SweepTable> {
    run_sweep(&SweepSpec::new(base.clone(), SweepParameter::Chemotaxis, values.to_vec()), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::read_field_snapshot;
    use crate::spectral::Domain;

    fn small() -> RunConfig {
        let mut c = RunConfig {
            domain: Domain::Rectangle { lx: 1.0, ly: 1.0 },
            modes: 6,
            t_end: 0.02,
            ..Default::default()
        };
        c.output.cadence = 5;
        c
    }

    #[test]
    fn spec_checks() {
        let s = |v: Vec<f64>| SweepSpec::new(small(), SweepParameter::Permeability, v).check();
        assert!(s(vec![1.0, 0.5, 0.0]).is_ok());
        assert!(s(vec![]).is_err());
        assert!(s(vec![1.0, 1.0]).is_err());
        assert!(s(vec![0.0, 1.0]).is_err());
        assert!(s(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn members_follow_the_coupling() {
        let spec = SweepSpec::new(small(), SweepParameter::Permeability, vec![0.25]);
        let m = spec.member(0.25);
        assert_eq!((m.params.permeability, m.params.boundary_exchange), (0.25, 0.25));
        assert_eq!(m.volume_source, VolumeSource::Zero);
        let l = spec.limit();
        assert!(l.limits.no_flow && l.params.boundary_exchange == 0.0);
        let c = SweepSpec::new(small(), SweepParameter::Chemotaxis, vec![0.5]).member(0.5);
        assert_eq!((c.params.chemotaxis, c.params.boundary_exchange), (0.5, 0.5));
    }

    #[test]
    fn zero_member_is_the_limit() {
        let t = sweep_vanishing_chemotaxis(&small(), &[0.05, 0.0], None).unwrap();
        assert!(t.is_complete());
        assert_eq!(t.rows[1].phi_diff, 0.0);
        assert_eq!(t.rows[1].sigma_diff, 0.0);
        assert!(t.rows[0].sigma_diff > 0.0);
    }

    #[test]
    fn single_row_energy_consistency() {
        let t = sweep_vanishing_permeability(&small(), &[1.0], None).unwrap();
        assert_eq!(t.rows.len(), 1);
        let m = run_member(&SweepSpec::new(small(), SweepParameter::Permeability, vec![1.0]).member(1.0)).unwrap();
        let diss = m.records.last().unwrap().accumulated.dissipation;
        // ‖v‖²/K is one of the dissipation terms.
        assert!(t.rows[0].v_l2l2 <= (1.0 * diss).sqrt() * (1.0 + 1e-9));
    }

    #[test]
    fn threads_do_not_change_results() {
        let cfgs = vec![small(), SweepSpec::new(small(), SweepParameter::Chemotaxis, vec![0.1]).member(0.1)];
        let a = run_all(&cfgs, 1);
        let b = run_all(&cfgs, 2);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.as_ref().unwrap().states, y.as_ref().unwrap().states);
        }
    }

    #[test]
    fn written_limit_snapshot_reproduces_the_comparison() {
        let dir = tempfile::tempdir().unwrap();
        let t = sweep_vanishing_permeability(&small(), &[1.0, 0.25], Some(dir.path())).unwrap();
        let snap = read_field_snapshot(&dir.path().join("limit/final.bin")).unwrap();
        let lim = run_member(&SweepSpec::new(small(), SweepParameter::Permeability, vec![1.0]).limit()).unwrap();
        assert_eq!(&snap, lim.states.last().unwrap());
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(t.is_complete());
    }
}
