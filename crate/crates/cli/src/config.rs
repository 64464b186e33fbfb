// SPDX-License-Identifier: MIT OR Apache-2.0

//! Flat `key = value` experiment configuration with `#` comments.
//!
//! Keys mirror the experiment fields one-to-one so configs stay trivially
//! parseable and diff-friendly. Unknown keys are rejected rather than
//! ignored: a typo must not silently change an experiment.

use std::collections::BTreeSet;

use arcpd_core::{
    required_sample_size, Ar1Params, CensoringPolicy, ChangePoint, DetectorSpec, McConfig, Regime,
};

use crate::error::CliError;
use crate::reference::DetectorKind;

/// Every key the parser accepts.
const KNOWN_KEYS: &[&str] = &[
    // model
    "mu_pre",
    "lambda_pre",
    "mu_post",
    "lambda_post",
    "x0",
    // detector
    "detector",
    "headstart",
    "threshold",
    "target_gamma",
    // monte carlo
    "replications",
    "master_seed",
    "epsilon",
    "closeness_w",
    "max_steps",
    "censored_as_lower_bound",
    // output
    "output_path",
    // subcommand-specific
    "change_point",
    "path_length",
    "k_values",
    "lambda0_grid",
    "gammas",
    "table",
    "mode",
    "rel_tol",
    "thresholds",
    "samples",
    "grid_points",
    "query_y1",
    "query_x1",
    "regime",
];

/// Parsed configuration: raw values in file order plus command-line
/// overrides.
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: Vec<(String, String)>,
    pub seed_override: Option<u64>,
    pub output_override: Option<String>,
    pub smoke: bool,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        let mut seen = BTreeSet::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.split_once('#') {
                Some((before, _)) => before,
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Validation(format!(
                    "line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            if !seen.insert(key.clone()) {
                return Err(CliError::Validation(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
            if value.is_empty() {
                return Err(CliError::Validation(format!(
                    "line {}: key `{key}` has no value",
                    lineno + 1
                )));
            }
            entries.push((key, value));
        }
        let cfg = Self {
            entries,
            seed_override: None,
            output_override: None,
            smoke: false,
        };
        if cfg.get("threshold").is_some() && cfg.get("target_gamma").is_some() {
            return Err(CliError::Validation(
                "exactly one of `threshold` / `target_gamma` may be set".into(),
            ));
        }
        Ok(cfg)
    }

    /// Canonical `key = value` rendering; parsing the output reproduces the
    /// same configuration.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn parse_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::Validation(format!("key `{key}`: `{v}` is not a number"))),
        }
    }

    fn parse_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<u64>().map(Some).map_err(|_| {
                CliError::Validation(format!("key `{key}`: `{v}` is not a non-negative integer"))
            }),
        }
    }

    fn parse_bool(&self, key: &str) -> Result<Option<bool>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some("true") => Ok(Some(true)),
            Some("false") => Ok(Some(false)),
            Some(v) => Err(CliError::Validation(format!(
                "key `{key}`: `{v}` is not `true` or `false`"
            ))),
        }
    }

    fn require_f64(&self, key: &str) -> Result<f64, CliError> {
        self.parse_f64(key)?
            .ok_or_else(|| CliError::Validation(format!("missing required key `{key}`")))
    }

    fn parse_list_f64(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => {
                let mut out = Vec::new();
                for part in v.split(',') {
                    let part = part.trim();
                    out.push(part.parse::<f64>().map_err(|_| {
                        CliError::Validation(format!("key `{key}`: `{part}` is not a number"))
                    })?);
                }
                if out.is_empty() {
                    return Err(CliError::Validation(format!("key `{key}`: empty list")));
                }
                Ok(Some(out))
            }
        }
    }

    fn parse_list_u64(&self, key: &str) -> Result<Option<Vec<u64>>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => {
                let mut out = Vec::new();
                for part in v.split(',') {
                    let part = part.trim();
                    out.push(part.parse::<u64>().map_err(|_| {
                        CliError::Validation(format!(
                            "key `{key}`: `{part}` is not a non-negative integer"
                        ))
                    })?);
                }
                if out.is_empty() {
                    return Err(CliError::Validation(format!("key `{key}`: empty list")));
                }
                Ok(Some(out))
            }
        }
    }

    // ------------------------------------------------------------------
    // typed views
    // ------------------------------------------------------------------

    pub fn pre_params(&self) -> Result<Ar1Params, CliError> {
        Ar1Params::new(self.require_f64("mu_pre")?, self.require_f64("lambda_pre")?)
            .map_err(CliError::from)
    }

    pub fn post_params(&self) -> Result<Ar1Params, CliError> {
        Ar1Params::new(
            self.require_f64("mu_post")?,
            self.require_f64("lambda_post")?,
        )
        .map_err(CliError::from)
    }

    pub fn x0(&self) -> Result<f64, CliError> {
        Ok(self.parse_f64("x0")?.unwrap_or(0.0))
    }

    pub fn detector_kind(&self) -> Result<DetectorKind, CliError> {
        match self.get("detector") {
            Some("sr") => Ok(DetectorKind::Sr),
            Some("cusum") => Ok(DetectorKind::Cusum),
            Some(v) => Err(CliError::Validation(format!(
                "key `detector`: `{v}` is not `sr` or `cusum`"
            ))),
            None => Err(CliError::Validation(
                "missing required key `detector`".into(),
            )),
        }
    }

    pub fn headstart(&self) -> Result<f64, CliError> {
        Ok(self.parse_f64("headstart")?.unwrap_or(0.0))
    }

    pub fn threshold(&self) -> Result<f64, CliError> {
        self.parse_f64("threshold")?
            .ok_or_else(|| CliError::Validation("this command requires the `threshold` key".into()))
    }

    pub fn target_gamma(&self) -> Result<f64, CliError> {
        self.parse_f64("target_gamma")?.ok_or_else(|| {
            CliError::Validation("this command requires the `target_gamma` key".into())
        })
    }

    pub fn detector_spec(&self) -> Result<DetectorSpec, CliError> {
        let kind = self.detector_kind()?;
        DetectorSpec::new(kind.psi(), self.headstart()?, self.threshold()?).map_err(CliError::from)
    }

    pub fn master_seed(&self) -> Result<u64, CliError> {
        if let Some(s) = self.seed_override {
            return Ok(s);
        }
        self.parse_u64("master_seed")?.ok_or_else(|| {
            CliError::Validation(
                "randomized commands require an explicit seed: set `master_seed` or pass --seed"
                    .into(),
            )
        })
    }

    pub fn epsilon(&self) -> Result<f64, CliError> {
        Ok(self.parse_f64("epsilon")?.unwrap_or(0.05))
    }

    pub fn closeness_w(&self) -> Result<f64, CliError> {
        Ok(self.parse_f64("closeness_w")?.unwrap_or(0.05))
    }

    pub fn rel_tol(&self) -> Result<f64, CliError> {
        Ok(self.parse_f64("rel_tol")?.unwrap_or(0.01))
    }

    /// Monte Carlo configuration. The censoring cap defaults to a thousand
    /// times a threshold-implied ARL guess (ten times the threshold), with a
    /// floor that keeps steady-state sweeps feasible.
    pub fn mc(&self, threshold_hint: f64) -> Result<McConfig, CliError> {
        let epsilon = self.epsilon()?;
        let closeness_w = self.closeness_w()?;
        let replications = if self.smoke {
            100
        } else {
            match self.parse_u64("replications")? {
                Some(n) => n,
                None => required_sample_size(epsilon, closeness_w)?,
            }
        };
        let max_steps = match self.parse_u64("max_steps")? {
            Some(m) => m,
            None => ((10_000.0 * threshold_hint).ceil() as u64).max(100_000),
        };
        let mut mc = McConfig::new(
            replications,
            self.master_seed()?,
            epsilon,
            closeness_w,
            max_steps,
        )?;
        if self.parse_bool("censored_as_lower_bound")?.unwrap_or(false) {
            mc = mc.with_censoring(CensoringPolicy::LowerBound);
        }
        Ok(mc)
    }

    pub fn output_path(&self) -> Option<String> {
        self.output_override
            .clone()
            .or_else(|| self.get("output_path").map(str::to_string))
    }

    pub fn change_point(&self) -> Result<ChangePoint, CliError> {
        match self.get("change_point") {
            None => Err(CliError::Validation(
                "this command requires the `change_point` key (an index or `inf`)".into(),
            )),
            Some("inf") => Ok(ChangePoint::Never),
            Some(v) => v.parse::<u64>().map(ChangePoint::At).map_err(|_| {
                CliError::Validation(format!(
                    "key `change_point`: `{v}` is not an index or `inf`"
                ))
            }),
        }
    }

    pub fn path_length(&self) -> Result<u64, CliError> {
        self.parse_u64("path_length")?
            .ok_or_else(|| CliError::Validation("missing required key `path_length`".into()))
    }

    pub fn k_values(&self) -> Result<Option<Vec<u64>>, CliError> {
        self.parse_list_u64("k_values")
    }

    pub fn lambda0_grid(&self) -> Result<Option<Vec<f64>>, CliError> {
        self.parse_list_f64("lambda0_grid")
    }

    pub fn gammas(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        Ok(self
            .parse_list_f64("gammas")?
            .unwrap_or_else(|| default.to_vec()))
    }

    pub fn thresholds(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        Ok(self
            .parse_list_f64("thresholds")?
            .unwrap_or_else(|| default.to_vec()))
    }

    pub fn table_id(&self) -> Result<&str, CliError> {
        match self.get("table") {
            Some(t @ ("operating-characteristics" | "add0-addinf")) => Ok(t),
            Some(v) => Err(CliError::Validation(format!(
                "key `table`: `{v}` is not `operating-characteristics` or `add0-addinf`"
            ))),
            None => Err(CliError::Validation("missing required key `table`".into())),
        }
    }

    pub fn table_mode(&self) -> Result<&str, CliError> {
        match self.get("mode") {
            None => Ok("replication"),
            Some(m @ ("replication" | "calibrate")) => Ok(m),
            Some(v) => Err(CliError::Validation(format!(
                "key `mode`: `{v}` is not `replication` or `calibrate`"
            ))),
        }
    }

    pub fn samples(&self, default: u64) -> Result<u64, CliError> {
        let n = self.parse_u64("samples")?.unwrap_or(default);
        Ok(if self.smoke { n.min(20_000) } else { n })
    }

    pub fn grid_points(&self) -> Result<u64, CliError> {
        let n = self.parse_u64("grid_points")?.unwrap_or(20);
        if n < 2 {
            return Err(CliError::Validation(
                "`grid_points` must be at least 2".into(),
            ));
        }
        Ok(n)
    }

    pub fn query_y1(&self) -> Result<f64, CliError> {
        Ok(self.parse_f64("query_y1")?.unwrap_or(0.5))
    }

    pub fn query_x1(&self) -> Result<f64, CliError> {
        Ok(self.parse_f64("query_x1")?.unwrap_or(0.0))
    }

    pub fn regime(&self) -> Result<Regime, CliError> {
        match self.get("regime") {
            None | Some("pre") => Ok(Regime::Pre),
            Some("post") => Ok(Regime::Post),
            Some(v) => Err(CliError::Validation(format!(
                "key `regime`: `{v}` is not `pre` or `post`"
            ))),
        }
    }
}
