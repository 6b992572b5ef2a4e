//! Parameter sweeps behind the four figure reproductions, plus CSV and JSON
//! emission with fixed 12-significant-digit formatting.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{
    bipartite_channel_state, concurrence_x_state, optimal_k, prob_pos_bipartite, prob_pos_w, prob_pos_z, Family,
};

pub const DEFAULT_NU: f64 = 0.1;
pub const DEFAULT_Q: f64 = 0.9;
pub const FIG4_Q: f64 = 0.8;
pub const DEFAULT_OMEGA_DELTA: f64 = TAU;
pub const DEFAULT_N_MULTI: usize = 20;
pub const DEFAULT_N_MAX: usize = 20;
pub const DEFAULT_Q_MAX: f64 = 1.0 - 1e-6;
pub const DEFAULT_NU_MAX: f64 = 1.0;
pub const DEFAULT_THETA_STEPS: usize = 1000;
pub const DEFAULT_STEPS: usize = 200;
pub const SIGNIFICANT_DIGITS: usize = 12;

pub const CSV_HEADER: &str = "x,family,p_pos,amplitude,k_used,concurrence";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Custom,
}

/// Named protocol parameters a sweep can fix or vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Param {
    N,
    K,
    Q,
    Nu,
    Theta,
    OmegaDelta,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::N => "n",
            Param::K => "k",
            Param::Q => "q",
            Param::Nu => "nu",
            Param::Theta => "theta",
            Param::OmegaDelta => "omega_delta",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, Param::N | Param::K)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::param("format", s, "expected csv or json")),
        }
    }
}

/// Inclusive grid `start..=stop` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(start: f64, stop: f64, steps: usize) -> Self {
        Self { start, stop, steps }
    }

    /// Evenly spaced points; the last one is `stop` exactly.
    pub fn points(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub figure: Figure,
    pub fixed: BTreeMap<Param, f64>,
    pub sweep_var: Param,
    pub range: GridRange,
    pub families: Vec<Family>,
    pub format: OutputFormat,
}

impl SweepSpec {
    /// Fixes (or overrides) one parameter.
    pub fn set(&mut self, param: Param, value: f64) -> &mut Self {
        self.fixed.insert(param, value);
        self
    }

    /// Checks grid shape and parameter domains without evaluating anything.
    ///
    /// An integer sweep over `n` visits every integer in `start..=stop`, so
    /// `steps` must equal the number of integers and a single point is allowed.
    pub fn validate(&self) -> Result<()> {
        let GridRange { start, stop, steps } = self.range;
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::NonFinite("sweep range"));
        }
        if self.fixed.contains_key(&self.sweep_var) {
            return Err(Error::param(
                "sweep_var",
                self.sweep_var,
                "also present among fixed parameters",
            ));
        }
        if self.families.is_empty() {
            return Err(Error::param("families", "[]", "at least one family is required"));
        }
        if let Some((&p, &v)) = self.fixed.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::param("fixed", format!("{p}={v}"), "must be finite"));
        }
        if self.sweep_var.is_integer() {
            if start.fract() != 0.0 || stop.fract() != 0.0 || start > stop {
                return Err(Error::param(
                    "range",
                    format!("{start}..{stop}"),
                    "integer sweep needs integer start <= stop",
                ));
            }
            if steps as f64 != stop - start + 1.0 {
                return Err(Error::param(
                    "steps",
                    steps,
                    "integer sweep visits every integer in range",
                ));
            }
        } else {
            if steps < 2 {
                return Err(Error::param("steps", steps, "need at least 2 grid points"));
            }
            if start >= stop {
                return Err(Error::param(
                    "range",
                    format!("{start}..{stop}"),
                    "start must be below stop",
                ));
            }
        }
        // evaluate the parameter checks at both grid ends
        for x in [start, stop] {
            for &family in &self.families {
                self.evaluate(x, family)?;
            }
        }
        Ok(())
    }

    fn get(&self, param: Param, x: f64) -> Result<f64> {
        if param == self.sweep_var {
            return Ok(x);
        }
        self.fixed
            .get(&param)
            .copied()
            .ok_or(Error::param("fixed", param, "required parameter is missing"))
    }

    fn get_count(&self, param: Param, x: f64) -> Result<usize> {
        let v = self.get(param, x)?;
        if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
            return Err(Error::param(param.name(), v, "must be a non-negative integer"));
        }
        Ok(v as usize)
    }

    fn evaluate(&self, x: f64, family: Family) -> Result<SweepRow> {
        let q = self.get(Param::Q, x)?;
        let nu = self.get(Param::Nu, x)?;
        let od = self.get(Param::OmegaDelta, x)?;
        let (result, k_used, concurrence) = match family {
            Family::Z => {
                let n = self.get_count(Param::N, x)?;
                let k = match self.fixed.contains_key(&Param::K) || self.sweep_var == Param::K {
                    true => self.get_count(Param::K, x)?,
                    false => optimal_k(n, q, nu)?.k_opt,
                };
                (prob_pos_z(n, k, q, nu, od)?, Some(k), None)
            }
            Family::W => (prob_pos_w(self.get_count(Param::N, x)?, q, nu, od)?, Some(1), None),
            Family::Bipartite => {
                let theta = self.get(Param::Theta, x)?;
                let c = concurrence_x_state(&bipartite_channel_state(theta, q, nu)?)?;
                (prob_pos_bipartite(theta, q, nu, od)?, None, Some(c))
            }
        };
        let x = match self.sweep_var.is_integer() {
            true => GridValue::Int(x as usize),
            false => GridValue::Real(x),
        };
        Ok(SweepRow {
            x,
            family,
            p_pos: result.p_pos,
            amplitude: result.amplitude,
            k_used,
            concurrence,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum GridValue {
    Int(usize),
    Real(f64),
}

impl GridValue {
    pub fn as_f64(self) -> f64 {
        match self {
            GridValue::Int(v) => v as f64,
            GridValue::Real(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x: GridValue,
    pub family: Family,
    pub p_pos: f64,
    pub amplitude: f64,
    pub k_used: Option<usize>,
    pub concurrence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// Grid-major, then in the order of `spec.families`.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows of one family, in grid order.
    pub fn family(&self, family: Family) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.family == family)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let x = match r.x {
                GridValue::Int(v) => v.to_string(),
                GridValue::Real(v) => format_sig(v),
            };
            let k = r.k_used.map(|k| k.to_string()).unwrap_or_default();
            let c = r.concurrence.map(format_sig).unwrap_or_default();
            let _ = writeln!(
                out,
                "{x},{},{},{},{k},{c}",
                r.family,
                format_sig(r.p_pos),
                format_sig(r.amplitude)
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct JsonRow {
            x: GridValue,
            family: &'static str,
            p_pos: f64,
            amplitude: f64,
            k_used: Option<usize>,
            concurrence: Option<f64>,
        }
        let rows: Vec<JsonRow> = self
            .rows
            .iter()
            .map(|r| JsonRow {
                x: match r.x {
                    GridValue::Real(v) => GridValue::Real(round_sig(v)),
                    int => int,
                },
                family: r.family.label(),
                p_pos: round_sig(r.p_pos),
                amplitude: round_sig(r.amplitude),
                k_used: r.k_used,
                concurrence: r.concurrence.map(round_sig),
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
        s.push('\n');
        s
    }

    pub fn render(&self) -> String {
        match self.spec.format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.range.steps * spec.families.len());
    for x in spec.range.points() {
        for &family in &spec.families {
            rows.push(spec.evaluate(x, family)?);
        }
    }
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
    })
}

fn base_fixed(q: f64, nu: f64) -> BTreeMap<Param, f64> {
    BTreeMap::from([(Param::Q, q), (Param::Nu, nu), (Param::OmegaDelta, DEFAULT_OMEGA_DELTA)])
}

/// W and optimal-Z probabilities against the atom number `n = 2..=n_max`.
pub fn fig1_spec(n_max: usize) -> SweepSpec {
    SweepSpec {
        figure: Figure::Fig1,
        fixed: base_fixed(DEFAULT_Q, DEFAULT_NU),
        sweep_var: Param::N,
        range: GridRange::new(2.0, n_max as f64, n_max.saturating_sub(1)),
        families: vec![Family::W, Family::Z],
        format: OutputFormat::Csv,
    }
}

/// Bipartite probability and channel-output concurrence over θ ∈ [0, π/2].
pub fn fig2_spec(theta_steps: usize) -> SweepSpec {
    SweepSpec {
        figure: Figure::Fig2,
        fixed: base_fixed(DEFAULT_Q, DEFAULT_NU),
        sweep_var: Param::Theta,
        range: GridRange::new(0.0, FRAC_PI_2, theta_steps),
        families: vec![Family::Bipartite],
        format: OutputFormat::Csv,
    }
}

/// Three families against q ∈ [0, 1 − 10⁻⁶].
pub fn fig3_spec(q_steps: usize, n_multi: usize) -> SweepSpec {
    let mut fixed = base_fixed(0.0, DEFAULT_NU);
    fixed.remove(&Param::Q);
    fixed.insert(Param::N, n_multi as f64);
    fixed.insert(Param::Theta, FRAC_PI_4);
    SweepSpec {
        figure: Figure::Fig3,
        fixed,
        sweep_var: Param::Q,
        range: GridRange::new(0.0, DEFAULT_Q_MAX, q_steps),
        families: vec![Family::Bipartite, Family::W, Family::Z],
        format: OutputFormat::Csv,
    }
}

/// Three families against ν ∈ [0, 1].
pub fn fig4_spec(nu_steps: usize, n_multi: usize) -> SweepSpec {
    let mut fixed = base_fixed(FIG4_Q, 0.0);
    fixed.remove(&Param::Nu);
    fixed.insert(Param::N, n_multi as f64);
    fixed.insert(Param::Theta, FRAC_PI_4);
    SweepSpec {
        figure: Figure::Fig4,
        fixed,
        sweep_var: Param::Nu,
        range: GridRange::new(0.0, DEFAULT_NU_MAX, nu_steps),
        families: vec![Family::Bipartite, Family::W, Family::Z],
        format: OutputFormat::Csv,
    }
}

pub fn run_fig1(n_max: usize) -> Result<SweepResult> {
    run_sweep(&fig1_spec(n_max))
}

pub fn run_fig2(theta_steps: usize) -> Result<SweepResult> {
    run_sweep(&fig2_spec(theta_steps))
}

pub fn run_fig3(q_steps: usize, n_multi: usize) -> Result<SweepResult> {
    run_sweep(&fig3_spec(q_steps, n_multi))
}

pub fn run_fig4(nu_steps: usize, n_multi: usize) -> Result<SweepResult> {
    run_sweep(&fig4_spec(nu_steps, n_multi))
}

/// Formats `v` with 12 significant digits, trailing zeros trimmed.
///
/// Positional notation is used for decimal exponents in `-5..15`,
/// `d.ddde±x` otherwise. Output never depends on locale.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    if !(-5..15).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let frac = if tail.is_empty() {
            String::new()
        } else {
            format!(".{tail}")
        };
        return format!("{sign}{head}{frac}e{exp}");
    }
    let body = if exp < 0 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            format!("{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    };
    format!("{sign}{body}")
}

/// `v` rounded to 12 significant digits.
pub fn round_sig(v: f64) -> f64 {
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v).parse().unwrap_or(v)
}
