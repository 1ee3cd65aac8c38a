//! Experiment configuration in a flat `key = value` text format.
//!
//! ```text
//! # comments start with '#'
//! omega1c_khz = 6.125
//! kappa_ratios = 0, 0.02, 0.1
//! delta_t_fractions = linspace(0, 0.1, 50)
//! tau = 000
//! ```
//!
//! Every key is optional; missing keys take the defaults of
//! [`ExperimentConfig::default`]. Lists are comma separated, and any real
//! grid may also be written `linspace(start, stop, count)`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::dynamics::{CavityParams, EvolutionSettings};
use crate::error::{Error, Result};
use crate::grover::{GateVariant, MarkedState};
use crate::imperfections::OffsetModel;

/// Largest number of points accepted in one grid.
pub const MAX_GRID_POINTS: usize = 100_000;

/// Evolution method selector as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Expm,
    Rk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// `Ω1c / 2π` in kHz.
    pub omega1c_khz: f64,
    /// Peak coupling `Ω0 / 2π` in kHz, for the geometry experiment.
    pub omega0_khz: f64,
    /// Cavity mode wavelength in millimeters.
    pub lambda0_mm: f64,
    /// Decay rates `κ/Ω1c` for the gate and search experiments.
    pub kappa_ratios: Vec<f64>,
    pub k_max: usize,
    pub tau: MarkedState,
    pub search_gate: GateVariant,
    /// Decay rates `κ/Ω1c` for the timing sweep.
    pub timing_kappa_ratios: Vec<f64>,
    /// `δt / t0` grid.
    pub delta_t_fractions: Vec<f64>,
    /// `κ/Ω1c` for the offset sweep.
    pub offset_kappa_ratio: f64,
    pub eta_grid: Vec<f64>,
    pub chi_values: Vec<u32>,
    pub offset_model: OffsetModel,
    pub photon_cutoff: usize,
    pub method: MethodChoice,
    pub integrator_steps: usize,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            omega1c_khz: 49.0 / 8.0,
            omega0_khz: 49.0,
            lambda0_mm: 5.87,
            kappa_ratios: vec![0.0, 0.02, 0.1],
            k_max: 8,
            tau: MarkedState::new(0).expect("valid"),
            search_gate: GateVariant::Decayed,
            timing_kappa_ratios: vec![0.02, 0.1],
            delta_t_fractions: linspace(0.0, 0.1, 50),
            offset_kappa_ratio: 0.1,
            eta_grid: linspace(0.0, 0.1, 50),
            chi_values: vec![1, 2, 3, 4],
            offset_model: OffsetModel::Atom1Only,
            photon_cutoff: 1,
            method: MethodChoice::Expm,
            integrator_steps: 20_000,
            out: None,
        }
    }
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

fn config_err(line: usize, key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {key}: {msg}"))
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{:?} is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{:?} is not finite", s.trim()))
    }
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("{:?} is not a non-negative integer", s.trim()))
}

/// Parses a real grid: a comma list or `linspace(start, stop, count)`.
pub fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    let s = s.trim();
    if let Some(args) = s
        .strip_prefix("linspace(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let parts: Vec<&str> = args.split(',').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err("linspace takes (start, stop, count)".into());
        };
        let count = parse_usize(n)?;
        if count > MAX_GRID_POINTS {
            return Err(format!("linspace count {count} exceeds {MAX_GRID_POINTS}"));
        }
        let grid = linspace(parse_f64(a)?, parse_f64(b)?, count);
        if grid.iter().any(|x| !x.is_finite()) {
            return Err("linspace span overflows".into());
        }
        return Ok(grid);
    }
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let grid: Vec<f64> = s
        .split(',')
        .map(parse_f64)
        .collect::<std::result::Result<_, _>>()?;
    if grid.len() > MAX_GRID_POINTS {
        return Err(format!(
            "{} grid points exceed {MAX_GRID_POINTS}",
            grid.len()
        ));
    }
    Ok(grid)
}

fn parse_int_list(s: &str) -> std::result::Result<Vec<u32>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| format!("{:?} is not an integer", x.trim()))
        })
        .collect()
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl ExperimentConfig {
    /// Parses and validates a config document.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line_no}: expected `key = value`")))?;
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(config_err(line_no, key, "duplicate key"));
            }
            seen.push(key.to_owned());
            cfg.set(key, value.trim())
                .map_err(|m| config_err(line_no, key, m))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "omega1c_khz" => self.omega1c_khz = parse_f64(value)?,
            "omega0_khz" => self.omega0_khz = parse_f64(value)?,
            "lambda0_mm" => self.lambda0_mm = parse_f64(value)?,
            "kappa_ratios" => self.kappa_ratios = parse_grid(value)?,
            "k_max" => self.k_max = parse_usize(value)?,
            "tau" => self.tau = value.parse().map_err(|e: Error| e.to_string())?,
            "search_gate" => self.search_gate = value.parse().map_err(|e: Error| e.to_string())?,
            "timing_kappa_ratios" => self.timing_kappa_ratios = parse_grid(value)?,
            "delta_t_fractions" => self.delta_t_fractions = parse_grid(value)?,
            "offset_kappa_ratio" => self.offset_kappa_ratio = parse_f64(value)?,
            "eta_grid" => self.eta_grid = parse_grid(value)?,
            "chi_values" => self.chi_values = parse_int_list(value)?,
            "offset_model" => {
                self.offset_model = value.parse().map_err(|e: Error| e.to_string())?
            }
            "photon_cutoff" => self.photon_cutoff = parse_usize(value)?,
            "method" => {
                self.method = match value {
                    "expm" => MethodChoice::Expm,
                    "rk4" => MethodChoice::Rk4,
                    other => return Err(format!("method must be expm or rk4, got {other:?}")),
                }
            }
            "integrator_steps" => self.integrator_steps = parse_usize(value)?,
            "out" => {
                self.out = if value.is_empty() {
                    None
                } else {
                    Some(PathBuf::from(value))
                }
            }
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Checks ranges and grid shapes; messages name the offending key.
    pub fn validate(&self) -> Result<()> {
        let fail = |key: &str, msg: &str| Err(Error::Config(format!("{key}: {msg}")));
        for (key, v) in [
            ("omega1c_khz", self.omega1c_khz),
            ("omega0_khz", self.omega0_khz),
            ("lambda0_mm", self.lambda0_mm),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(key, "must be positive");
            }
        }
        let kappa_ok = |r: f64| r.is_finite() && (0.0..4.0).contains(&r);
        for (key, grid) in [
            ("kappa_ratios", &self.kappa_ratios),
            ("timing_kappa_ratios", &self.timing_kappa_ratios),
        ] {
            if grid.is_empty() {
                return fail(key, "must not be empty");
            }
            if !strictly_increasing(grid) {
                return fail(key, "must be strictly increasing");
            }
            if !grid.iter().all(|&r| kappa_ok(r)) {
                return fail(key, "decay ratios must lie in [0, 4)");
            }
        }
        if !kappa_ok(self.offset_kappa_ratio) {
            return fail("offset_kappa_ratio", "must lie in [0, 4)");
        }
        if self.k_max == 0 {
            return fail("k_max", "must be at least 1");
        }
        let f = &self.delta_t_fractions;
        if f.is_empty() || !strictly_increasing(f) {
            return fail(
                "delta_t_fractions",
                "must be non-empty and strictly increasing",
            );
        }
        if !f.iter().all(|x| (0.0..=1.0).contains(x)) {
            return fail("delta_t_fractions", "fractions of t0 must lie in [0, 1]");
        }
        let e = &self.eta_grid;
        if e.is_empty() || !strictly_increasing(e) {
            return fail("eta_grid", "must be non-empty and strictly increasing");
        }
        if !e.iter().all(|x| x.abs() < 1.0) {
            return fail("eta_grid", "offsets must satisfy |eta| < 1");
        }
        let c = &self.chi_values;
        if c.is_empty()
            || !c.windows(2).all(|w| w[0] < w[1])
            || !c.iter().all(|x| (1..=4).contains(x))
        {
            return fail(
                "chi_values",
                "must be a strictly increasing subset of 1..=4",
            );
        }
        let w = self.offset_model.weights();
        if !e.iter().all(|eta| w.iter().all(|wj| 1.0 + eta * wj > 0.0)) {
            return fail(
                "offset_model",
                "an eta in eta_grid drives a coupling to zero",
            );
        }
        if self.photon_cutoff == 0 {
            return fail("photon_cutoff", "must be at least 1");
        }
        if self.integrator_steps < EvolutionSettings::MIN_STEPS {
            return fail("integrator_steps", "must be at least 100");
        }
        Ok(())
    }

    /// Writes every key in canonical order; `parse` of the result gives back
    /// an equal config.
    pub fn serialize(&self) -> String {
        let method = match self.method {
            MethodChoice::Expm => "expm",
            MethodChoice::Rk4 => "rk4",
        };
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("omega1c_khz", self.omega1c_khz.to_string());
        put("omega0_khz", self.omega0_khz.to_string());
        put("lambda0_mm", self.lambda0_mm.to_string());
        put("kappa_ratios", join(&self.kappa_ratios));
        put("k_max", self.k_max.to_string());
        put("tau", self.tau.to_string());
        put("search_gate", self.search_gate.to_string());
        put("timing_kappa_ratios", join(&self.timing_kappa_ratios));
        put("delta_t_fractions", join(&self.delta_t_fractions));
        put("offset_kappa_ratio", self.offset_kappa_ratio.to_string());
        put("eta_grid", join(&self.eta_grid));
        put("chi_values", join(&self.chi_values));
        put("offset_model", self.offset_model.to_string());
        put("photon_cutoff", self.photon_cutoff.to_string());
        put("method", method.to_string());
        put("integrator_steps", self.integrator_steps.to_string());
        if let Some(p) = &self.out {
            put("out", p.display().to_string());
        }
        s
    }

    /// `Ω1c` in rad/s.
    pub fn omega1c(&self) -> f64 {
        2.0 * PI * 1e3 * self.omega1c_khz
    }

    /// `Ω0` in rad/s.
    pub fn omega0(&self) -> f64 {
        2.0 * PI * 1e3 * self.omega0_khz
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0_mm * 1e-3
    }

    /// Designed couplings at decay rate `kappa_ratio · Ω1c`.
    pub fn params(&self, kappa_ratio: f64) -> Result<CavityParams> {
        let w = self.omega1c();
        CavityParams::designed(w, kappa_ratio * w)?.with_photon_cutoff(self.photon_cutoff)
    }

    pub fn settings(&self) -> Result<EvolutionSettings> {
        match self.method {
            MethodChoice::Expm => Ok(EvolutionSettings::matrix_exponential()),
            MethodChoice::Rk4 => EvolutionSettings::integrator(self.integrator_steps),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = ExperimentConfig::parse("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.delta_t_fractions.len(), 50);
        assert_eq!(*c.delta_t_fractions.last().unwrap(), 0.1);
        assert_eq!(c.omega0_khz / c.omega1c_khz, 8.0);
    }

    #[test]
    fn parses_keys_comments_and_grids() {
        let c = ExperimentConfig::parse(
            "# search\nkappa_ratios = 0, 0.1  # two\n\ntau = 101\nk_max=3\neta_grid = linspace(0, 0.05, 6)\n\
             offset_model = per_atom(0, 1, 1)\nmethod = rk4\nout = data/run.csv\n",
        )
        .unwrap();
        assert_eq!(c.kappa_ratios, vec![0.0, 0.1]);
        assert_eq!(c.tau.bits(), 5);
        assert_eq!(c.k_max, 3);
        assert_eq!(c.eta_grid.len(), 6);
        assert_eq!(c.offset_model, OffsetModel::PerAtom([0.0, 1.0, 1.0]));
        assert_eq!(c.method, MethodChoice::Rk4);
        assert_eq!(c.out, Some(PathBuf::from("data/run.csv")));
    }

    #[test]
    fn errors_name_line_and_key() {
        let cases = [
            ("bogus = 1", "line 1: bogus"),
            ("\nk_max = x", "line 2: k_max"),
            ("k_max = 1\nk_max = 2", "duplicate"),
            ("no equals sign", "line 1"),
            ("kappa_ratios = 0.1, 0", "kappa_ratios"),
            ("kappa_ratios =", "kappa_ratios"),
            ("kappa_ratios = 4", "kappa_ratios"),
            ("omega1c_khz = -1", "omega1c_khz"),
            ("omega1c_khz = nan", "omega1c_khz"),
            ("k_max = 0", "k_max"),
            ("chi_values = 0, 1", "chi_values"),
            ("chi_values = 2, 1", "chi_values"),
            ("eta_grid = 0.5, 1.5", "eta_grid"),
            ("eta_grid = linspace(0, 1, 1000001)", "eta_grid"),
            ("delta_t_fractions = 0, 2", "delta_t_fractions"),
            ("integrator_steps = 10", "integrator_steps"),
            ("photon_cutoff = 0", "photon_cutoff"),
            ("tau = 8", "tau"),
            ("method = euler", "method"),
            (
                "offset_model = per_atom(-20, 0, 0)\neta_grid = 0.1",
                "offset_model",
            ),
        ];
        for (doc, needle) in cases {
            match ExperimentConfig::parse(doc) {
                Err(Error::Config(msg)) => assert!(msg.contains(needle), "{doc:?} -> {msg}"),
                other => panic!("{doc:?} -> {other:?}"),
            }
        }
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 0), Vec::<f64>::new());
        assert_eq!(linspace(0.3, 1.0, 1), vec![0.3]);
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn unit_conversion() {
        let c = ExperimentConfig::default();
        assert!((c.omega1c() - 2.0 * PI * 6125.0).abs() < 1e-9);
        let p = c.params(0.1).unwrap();
        assert!((p.kappa() - 0.1 * c.omega1c()).abs() < 1e-12);
    }

    fn grid() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::btree_set(0u32..1000, 1..12).prop_map(|s| {
            s.into_iter()
                .map(|x| x as f64 * 1e-3 + 1e-7 * x as f64)
                .collect()
        })
    }

    prop_compose! {
        fn config()(
            omega in 0.1f64..100.0,
            kappas in grid(),
            k_max in 1usize..20,
            tau in 0u8..8,
            fracs in grid(),
            eta in grid(),
            chi in prop::sample::subsequence(vec![1u32, 2, 3, 4], 1..=4),
            rk4 in any::<bool>(),
            steps in 100usize..100_000,
            out in prop::option::of("[a-z]{1,8}\\.csv"),
        ) -> ExperimentConfig {
            ExperimentConfig {
                omega1c_khz: omega,
                kappa_ratios: kappas.clone(),
                k_max,
                tau: MarkedState::new(tau).unwrap(),
                timing_kappa_ratios: kappas,
                delta_t_fractions: fracs,
                eta_grid: eta,
                chi_values: chi,
                method: if rk4 { MethodChoice::Rk4 } else { MethodChoice::Expm },
                integrator_steps: steps,
                out: out.map(PathBuf::from),
                ..ExperimentConfig::default()
            }
        }
    }

    proptest! {
        #[test]
        fn serialize_round_trips(c in config()) {
            prop_assert_eq!(ExperimentConfig::parse(&c.serialize()).unwrap(), c);
        }

        #[test]
        fn parse_never_panics(s in "\\PC*") {
            let _ = ExperimentConfig::parse(&s);
        }
    }
}
