//! Experiment runners behind the `sim` subcommands and their CSV output.
//!
//! Grid points are independent; they run on a rayon pool and are gathered
//! back in grid order, so output is identical for any thread count.

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::dynamics::{extract_gate, gate_time, positions_for_ratio};
use crate::error::{Error, Result};
use crate::gates::{decayed_i000, gamma0};
use crate::grover::{best_iteration, run_search, SearchRecord};
use crate::imperfections::{
    coupling_offset_infidelity, offset_oracle, timing_infidelity, timing_oracle, OffsetScenario,
    TimingScenario,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Gate,
    Search,
    Timing,
    Offset,
    Geometry,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Gate,
        Experiment::Search,
        Experiment::Timing,
        Experiment::Offset,
        Experiment::Geometry,
    ];

    /// CSV header, fixed per experiment.
    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            Experiment::Gate => &[
                "kappa_ratio",
                "slot",
                "analytic",
                "simulated_re",
                "simulated_im",
                "abs_error",
                "leakage",
            ],
            Experiment::Search => &["iteration", "kappa_ratio", "p_find", "survival", "fidelity"],
            Experiment::Timing => &[
                "kappa_ratio",
                "delta_t_fraction",
                "delta_t_us",
                "infidelity_formula",
                "infidelity_oracle",
            ],
            Experiment::Offset => &[
                "kappa_ratio",
                "eta",
                "chi",
                "infidelity_formula",
                "infidelity_oracle",
            ],
            Experiment::Geometry => &[
                "atom",
                "z_mm",
                "z_over_lambda",
                "coupling_khz",
                "coupling_ratio",
            ],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Gate => "gate",
            Experiment::Search => "search",
            Experiment::Timing => "timing",
            Experiment::Offset => "offset",
            Experiment::Geometry => "geometry",
        })
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// One CSV row, values in [`Experiment::columns`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub experiment: Experiment,
    pub values: Vec<f64>,
}

impl SweepRecord {
    fn new(experiment: Experiment, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), experiment.columns().len());
        Self { experiment, values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub experiment: Experiment,
    pub records: Vec<SweepRecord>,
    /// `(key, value)` scalars and notes for the summary printout.
    pub summary: Vec<(String, String)>,
}

impl ExperimentOutput {
    pub fn summary_text(&self) -> String {
        self.summary
            .iter()
            .map(|(k, v)| format!("{k}: {v}\n"))
            .collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_records(self.experiment, &self.records, &mut buf)?;
        Ok(buf)
    }
}

/// Writes a header row and the records as CSV. Floats use the shortest
/// representation that round-trips.
pub fn write_records<W: Write>(
    experiment: Experiment,
    records: &[SweepRecord],
    out: W,
) -> Result<()> {
    let columns = experiment.columns();
    if let Some(bad) = records
        .iter()
        .find(|r| r.experiment != experiment || r.values.len() != columns.len())
    {
        return Err(Error::Input(format!(
            "record for {} with {} values does not fit the {experiment} schema",
            bad.experiment,
            bad.values.len()
        )));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for r in records {
        w.write_record(r.values.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes `records` to `path`, replacing any existing file.
pub fn write_csv(experiment: Experiment, records: &[SweepRecord], path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    let mut buf = std::io::BufWriter::new(file);
    write_records(experiment, records, &mut buf)?;
    buf.flush().map_err(io)
}

/// Runs `experiment` on a pool of `threads` workers (all cores if `None`).
pub fn run_experiment(
    experiment: Experiment,
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<ExperimentOutput> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match experiment {
        Experiment::Gate => gate(config),
        Experiment::Search => search(config),
        Experiment::Timing => timing(config),
        Experiment::Offset => offset(config),
        Experiment::Geometry => geometry(config),
    })
}

/// Evaluates `f` over `points` in parallel, keeping grid order and tagging
/// failures with the point.
fn sweep<P, T, F>(points: &[P], f: F) -> Result<Vec<T>>
where
    P: Sync + fmt::Debug,
    T: Send,
    F: Fn(&P) -> Result<T> + Sync,
{
    points
        .par_iter()
        .map(|p| f(p).map_err(|e| e.at_point(format!("{p:?}"))))
        .collect()
}

fn iteration_time_us(config: &ExperimentConfig, kappa_ratio: f64) -> Result<f64> {
    Ok(2.0 * gate_time(&config.params(kappa_ratio)?)? * 1e6)
}

fn gate(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let settings = config.settings()?;
    let per_kappa = sweep(&config.kappa_ratios, |&r| {
        let params = config.params(r)?;
        let (_, d) = decayed_i000(&params)?;
        let analytic = [-d.mu, d.gamma, d.beta, d.alpha, 1.0, 1.0, 1.0, 1.0];
        let sim = extract_gate(&params, gate_time(&params)?, &settings)?;
        let diag = sim.diagonal();
        let rows: Vec<SweepRecord> = (0..8)
            .map(|slot| {
                let err = (diag[slot] - analytic[slot]).norm();
                SweepRecord::new(
                    Experiment::Gate,
                    vec![
                        r,
                        slot as f64,
                        analytic[slot],
                        diag[slot].re,
                        diag[slot].im,
                        err,
                        sim.leakage[slot],
                    ],
                )
            })
            .collect();
        let max_err = rows.iter().map(|x| x.values[5]).fold(0.0, f64::max);
        Ok((rows, max_err))
    })?;
    let base = config.params(config.kappa_ratios[0])?;
    let mut summary = vec![
        ("gamma0".to_owned(), format!("{:.4}", gamma0(&base))),
        (
            "gate_time_us".to_owned(),
            format!("{:.2}", gate_time(&base)? * 1e6),
        ),
        (
            "iteration_time_us".to_owned(),
            format!("{:.2}", iteration_time_us(config, config.kappa_ratios[0])?),
        ),
    ];
    for (r, (_, err)) in config.kappa_ratios.iter().zip(&per_kappa) {
        summary.push((
            format!("max_diag_error[kappa_ratio={r}]"),
            format!("{err:e}"),
        ));
    }
    Ok(ExperimentOutput {
        experiment: Experiment::Gate,
        records: per_kappa.into_iter().flat_map(|(rows, _)| rows).collect(),
        summary,
    })
}

fn search(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let runs: Vec<Vec<SearchRecord>> = sweep(&config.kappa_ratios, |&r| {
        run_search(
            config.tau,
            config.k_max,
            config.search_gate,
            &config.params(r)?,
        )
    })?;
    let mut records = Vec::new();
    let mut summary = vec![
        ("tau".to_owned(), config.tau.to_string()),
        ("gate".to_owned(), config.search_gate.to_string()),
        (
            "fidelity".to_owned(),
            "|<ideal|psi>|^2/|psi|^2 against the exact-gate trajectory".to_owned(),
        ),
        (
            "p_find".to_owned(),
            "|<tau|psi>|^2 on the unnormalized no-jump state".to_owned(),
        ),
    ];
    for (&r, run) in config.kappa_ratios.iter().zip(&runs) {
        for rec in run {
            records.push(SweepRecord::new(
                Experiment::Search,
                vec![
                    rec.iteration as f64,
                    r,
                    rec.p_find,
                    rec.survival,
                    rec.fidelity,
                ],
            ));
        }
        let best = best_iteration(run).expect("k_max >= 1");
        summary.push((format!("best_iteration[kappa_ratio={r}]"), best.to_string()));
        summary.push((
            format!("iteration_time_us[kappa_ratio={r}]"),
            format!("{:.2}", iteration_time_us(config, r)?),
        ));
    }
    Ok(ExperimentOutput {
        experiment: Experiment::Search,
        records,
        summary,
    })
}

fn timing(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let settings = config.settings()?;
    let points: Vec<(f64, f64)> = config
        .timing_kappa_ratios
        .iter()
        .flat_map(|&r| config.delta_t_fractions.iter().map(move |&f| (r, f)))
        .collect();
    let records = sweep(&points, |&(r, f)| {
        let s = TimingScenario::from_fraction(f, config.params(r)?)?;
        Ok(SweepRecord::new(
            Experiment::Timing,
            vec![
                r,
                f,
                s.delta_t() * 1e6,
                timing_infidelity(&s)?,
                timing_oracle(&s, &settings)?,
            ],
        ))
    })?;
    let max_gap = records
        .iter()
        .map(|x| (x.values[3] - x.values[4]).abs())
        .fold(0.0, f64::max);
    Ok(ExperimentOutput {
        experiment: Experiment::Timing,
        records,
        summary: vec![
            (
                "fidelity".to_owned(),
                "uniform-input overlap with I - 2|000><000|".to_owned(),
            ),
            ("max_formula_oracle_gap".to_owned(), format!("{max_gap:e}")),
        ],
    })
}

fn offset(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let settings = config.settings()?;
    let r = config.offset_kappa_ratio;
    let params = config.params(r)?;
    let points: Vec<(f64, u32)> = config
        .eta_grid
        .iter()
        .flat_map(|&eta| config.chi_values.iter().map(move |&chi| (eta, chi)))
        .collect();
    let records = sweep(&points, |&(eta, chi)| {
        let s = OffsetScenario::new(eta, chi, config.offset_model, params)?;
        Ok(SweepRecord::new(
            Experiment::Offset,
            vec![
                r,
                eta,
                chi as f64,
                coupling_offset_infidelity(&s)?,
                offset_oracle(&s, &settings)?,
            ],
        ))
    })?;
    let baseline =
        coupling_offset_infidelity(&OffsetScenario::new(0.0, 1, config.offset_model, params)?)?;
    Ok(ExperimentOutput {
        experiment: Experiment::Offset,
        records,
        summary: vec![
            ("offset_model".to_owned(), config.offset_model.to_string()),
            ("baseline_infidelity".to_owned(), format!("{baseline:.6}")),
            (
                "fidelity".to_owned(),
                "uniform-input overlap of four phase gates with the identity".to_owned(),
            ),
        ],
    })
}

fn geometry(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let lambda = config.lambda0();
    let pos = positions_for_ratio(config.omega0(), lambda)?;
    let records = (0..3)
        .map(|j| {
            SweepRecord::new(
                Experiment::Geometry,
                vec![
                    (j + 1) as f64,
                    pos.z[j] * 1e3,
                    pos.z[j] / lambda,
                    pos.couplings[j] / (2.0 * std::f64::consts::PI * 1e3),
                    pos.couplings[j] / pos.couplings[0],
                ],
            )
        })
        .collect();
    Ok(ExperimentOutput {
        experiment: Experiment::Geometry,
        records,
        summary: vec![(
            "z1_over_z2".to_owned(),
            format!("{:.4}", pos.offset_ratio()),
        )],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig::parse(
            "delta_t_fractions = 0, 0.05, 0.1\neta_grid = 0, 0.05\nchi_values = 1, 4\n",
        )
        .unwrap()
    }

    #[test]
    fn experiment_names() {
        for e in Experiment::ALL {
            assert_eq!(e.to_string().parse::<Experiment>().unwrap(), e);
        }
        assert!("plot".parse::<Experiment>().is_err());
    }

    #[test]
    fn search_header_and_shape() {
        assert_eq!(
            Experiment::Search.columns().join(","),
            "iteration,kappa_ratio,p_find,survival,fidelity"
        );
        let out = run_experiment(Experiment::Search, &small(), Some(1)).unwrap();
        assert_eq!(out.records.len(), 24);
        let rec = &out.records[1];
        assert_eq!(rec.values[..2], [2.0, 0.0]);
        assert!((rec.values[2] - 0.9453).abs() < 1e-3);
        assert!(out
            .summary_text()
            .contains("best_iteration[kappa_ratio=0.1]: 2"));
    }

    #[test]
    fn gate_reports_gamma0() {
        let out = run_experiment(Experiment::Gate, &small(), None).unwrap();
        assert_eq!(out.records.len(), 24);
        assert!(out.summary_text().contains("gamma0: 0.9997"));
    }

    #[test]
    fn timing_zero_rows_agree() {
        let out = run_experiment(Experiment::Timing, &small(), None).unwrap();
        assert_eq!(out.records.len(), 6);
        let zero = &out.records[3];
        assert_eq!(zero.values[..2], [0.1, 0.0]);
        assert!((zero.values[3] - 6.3e-4).abs() < 1e-4);
        assert!((zero.values[3] - zero.values[4]).abs() < 1e-6);
    }

    #[test]
    fn offset_and_geometry_shapes() {
        let out = run_experiment(Experiment::Offset, &small(), None).unwrap();
        assert_eq!(out.records.len(), 4);
        let geo = run_experiment(Experiment::Geometry, &small(), None).unwrap();
        assert_eq!(geo.records.len(), 3);
        assert!(geo.summary_text().contains("z1_over_z2: 1.957"));
    }

    #[test]
    fn empty_records_write_header_only() {
        let mut buf = Vec::new();
        write_records(Experiment::Search, &[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "iteration,kappa_ratio,p_find,survival,fidelity\n"
        );
    }

    #[test]
    fn mismatched_records_rejected() {
        let bad = SweepRecord {
            experiment: Experiment::Gate,
            values: vec![0.0; 7],
        };
        assert!(matches!(
            write_records(Experiment::Search, &[bad], Vec::new()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let c = small();
        for e in [Experiment::Timing, Experiment::Offset] {
            let one = run_experiment(e, &c, Some(1)).unwrap().to_csv().unwrap();
            let many = run_experiment(e, &c, Some(4)).unwrap().to_csv().unwrap();
            assert_eq!(one, many);
        }
    }

    #[test]
    fn numerical_failures_name_the_point() {
        let e = Error::Numerical("boom".into()).at_point("(0.1, 2)");
        assert!(e.to_string().contains("(0.1, 2)"));
        assert!(e.is_numerical());
    }
}
