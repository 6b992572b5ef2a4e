//! Seeded oracle-equivalence suite, run by the `selftest` subcommand.
//!
//! Every check compares two independently computed quantities on random
//! parameters drawn from a ChaCha stream, so a given seed always reproduces
//! the same report.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::protocol::{
    bipartite_channel_state, closed_form_bob_state, closed_form_rho_ab_dual, concurrence_x_state,
    conditional_bob_state, estimate_delta, evolve_bob_state, pipeline_probability, prob_pos_bipartite, prob_pos_w,
    prob_pos_z, wootters_concurrence, TwoQubitState, PIPELINE_TOL,
};
use crate::qlin::{is_density_matrix, DENSITY_TOL};
use crate::states::{build_bipartite_theta, build_w_state, build_z_state, BasisLabel};
use crate::unruh::{apply_unruh_map, closed_form_rho_ab, closed_form_rho_full, ACCELERATED_ATOM};

/// Tolerances used by the suite; defaults mirror the library constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Closed form against numeric pipeline.
    pub pipeline: f64,
    /// Density-matrix validity.
    pub density: f64,
    /// Algebraic identities between closed forms.
    pub identity: f64,
    /// Estimator round trip, in units of the phase Ωδ.
    pub estimate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pipeline: PIPELINE_TOL,
            density: DENSITY_TOL,
            identity: 1e-12,
            estimate: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Random `(q, ν)` draws per `(n, k)` pair and per family.
    pub samples: usize,
    pub max_atoms: usize,
    pub tolerances: Tolerances,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 50,
            max_atoms: 6,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{tag} {:<34} cases={:<6} max_err={:.3e} tol={:.0e}",
            self.name, self.cases, self.max_error, self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "selftest seed={}", self.seed)?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    max_error: f64,
    tolerance: f64,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            cases: 0,
            max_error: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, err: f64) {
        self.cases += 1;
        // NaN must fail the check
        self.max_error = if err.is_nan() {
            f64::INFINITY
        } else {
            self.max_error.max(err)
        };
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name,
            cases: self.cases,
            max_error: self.max_error,
            tolerance: self.tolerance,
        }
    }
}

pub fn run_selftest(config: &SelftestConfig) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let tol = config.tolerances;
    let mut channel = Tally::new("channel vs closed-form rho_AB", tol.pipeline);
    let mut validity = Tally::new("channel output validity", tol.density);
    let mut full = Tally::new("channel vs closed-form full rho", tol.pipeline);
    let mut dual = Tally::new("dual closed form vs transform", tol.identity);
    let mut bob = Tally::new("evolved Bob state vs closed form", tol.identity);
    let mut z_pipe = Tally::new("Z pipeline vs closed form", tol.pipeline);
    let mut w_pipe = Tally::new("W pipeline vs closed form", tol.pipeline);
    let mut b_pipe = Tally::new("bipartite pipeline vs closed form", tol.pipeline);
    let mut conc = Tally::new("X-state vs spin-flip concurrence", tol.pipeline);
    let mut two = Tally::new("two-atom family coincidence", tol.identity);
    let mut est = Tally::new("estimator round trip", tol.estimate);

    for n in 2..=config.max_atoms {
        for k in 1..n {
            let psi = build_z_state::<f64>(n, k)?;
            for _ in 0..config.samples {
                let q = rng.gen_range(0.0..0.95);
                let nu = rng.gen_range(0.0..0.5);
                let od = rng.gen_range(-TAU..TAU);
                let out = apply_unruh_map(&psi, ACCELERATED_ATOM, q, nu)?;
                validity.record(if is_density_matrix(&out.rho_atoms, tol.density) {
                    0.0
                } else {
                    f64::INFINITY
                });
                let brute = out.joint_state.reduced_density(&[0, 1])?;
                channel.record(brute.max_abs_diff(&closed_form_rho_ab(n, k, q, nu)?));
                if n <= 4 {
                    full.record(out.rho_atoms.max_abs_diff(&closed_form_rho_full(n, k, q, nu)?));
                }
                let rho = TwoQubitState::new(closed_form_rho_ab(n, k, q, nu)?, BasisLabel::Computational)?;
                let rho_dual = rho.to_dual();
                dual.record(rho_dual.matrix().max_abs_diff(&closed_form_rho_ab_dual(n, k, q, nu)?));
                let evolved = evolve_bob_state(&conditional_bob_state(&rho_dual)?, od);
                bob.record(evolved.matrix().max_abs_diff(&closed_form_bob_state(n, k, q, nu, od)?));
                let pipe = pipeline_probability(&psi, q, nu, od)?;
                z_pipe.record((pipe.p_pos - prob_pos_z(n, k, q, nu, od)?.p_pos).abs());
                conc.record((concurrence_x_state(&rho)? - wootters_concurrence(rho.matrix())?).abs());
            }
        }
        let w = build_w_state::<f64>(n)?;
        for _ in 0..config.samples {
            let q = rng.gen_range(0.0..0.95);
            let nu = rng.gen_range(0.0..0.5);
            let od = rng.gen_range(-TAU..TAU);
            let pipe = pipeline_probability(&w, q, nu, od)?;
            w_pipe.record((pipe.p_pos - prob_pos_w(n, q, nu, od)?.p_pos).abs());
        }
    }

    for _ in 0..config.samples * 4 {
        let theta = rng.gen_range(0.0..FRAC_PI_2);
        let q = rng.gen_range(0.0..0.95);
        let nu = rng.gen_range(0.0..0.5);
        let od = rng.gen_range(-TAU..TAU);
        let pipe = pipeline_probability(&build_bipartite_theta(theta), q, nu, od)?;
        b_pipe.record((pipe.p_pos - prob_pos_bipartite(theta, q, nu, od)?.p_pos).abs());
        let rho = bipartite_channel_state(theta, q, nu)?;
        conc.record((concurrence_x_state(&rho)? - wootters_concurrence(rho.matrix())?).abs());

        let z = prob_pos_z(2, 1, q, nu, od)?.p_pos;
        let w = prob_pos_w(2, q, nu, od)?.p_pos;
        let b = prob_pos_bipartite(FRAC_PI_4, q, nu, od)?.p_pos;
        two.record((z - w).abs().max((z - b).abs()));

        let amplitude = rng.gen_range(0.01..0.5);
        let omega = rng.gen_range(0.1..10.0);
        let phase: f64 = rng.gen_range(-TAU..TAU);
        let found = estimate_delta(0.5 + amplitude * phase.cos(), amplitude, omega)?;
        let miss = found
            .iter()
            .map(|d| (d * omega - phase).abs())
            .fold(f64::INFINITY, f64::min);
        est.record(miss);
    }

    let checks = [
        channel, validity, full, dual, bob, z_pipe, w_pipe, b_pipe, conc, two, est,
    ]
    .into_iter()
    .map(Tally::finish)
    .collect();
    Ok(SelftestReport {
        seed: config.seed,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SelftestConfig {
        SelftestConfig {
            seed: 7,
            samples: 4,
            max_atoms: 4,
            ..SelftestConfig::default()
        }
    }

    #[test]
    fn small_suite_passes() {
        let report = run_selftest(&small()).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks.len(), 11);
        assert!(report.checks.iter().all(|c| c.cases > 0));
    }

    #[test]
    fn same_seed_same_report() {
        assert_eq!(run_selftest(&small()).unwrap(), run_selftest(&small()).unwrap());
    }

    #[test]
    fn impossible_tolerance_fails() {
        let mut config = small();
        config.tolerances.pipeline = -1.0;
        let report = run_selftest(&config).unwrap();
        assert!(!report.passed());
        assert!(report.to_string().contains("FAIL"));
    }

    #[test]
    fn nan_counts_as_failure() {
        let mut t = Tally::new("x", 1.0);
        t.record(f64::NAN);
        assert!(!t.finish().passed());
    }
}
