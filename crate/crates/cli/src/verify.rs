//! `verify quick|full`: the acceptance criteria as a table and a JSON report.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use widom_core::asymptotics::{build_report, ReportInputs};
use widom_core::interval_sets::{make_cantor, IntervalSet};
use widom_core::jacobi::recurrence_auto;
use widom_core::measure::{build_measure, WeightSpec};
use widom_core::potential::equilibrium_auto;

use crate::acceptance::{self, cantor_spec, Check, CriterionResult};
use crate::{write_atomic, CliError};

/// Wall-clock budget of the full suite.
pub const FULL_BUDGET_SECS: u64 = 15 * 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Quick,
    Full,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            _ => Err(CliError::usage(format!("unknown suite {s:?} (quick, full)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Quick => "quick",
            Self::Full => "full",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub all_pass: bool,
    pub criteria: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<4} {:<6} {:>10} {:>10} {:>9}  {}\n", "id", "result", "measured", "bound", "time", "criterion");
        for c in &self.criteria {
            let (value, bound) = c.binding().map_or((f64::NAN, f64::NAN), |b| (b.value, b.bound));
            let verdict = if c.pass && c.within_budget() { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "C{:<3} {verdict:<6} {value:>10.3e} {bound:>10.3e} {:>8.1}s  {}\n",
                c.id,
                c.elapsed.as_secs_f64(),
                c.name
            ));
        }
        out
    }

    pub fn succeeded(&self) -> bool {
        self.criteria.iter().all(|c| c.pass && c.within_budget())
    }
}

type CriterionFn = fn() -> CriterionResult;

const NUMERICAL: [CriterionFn; 10] = [
    acceptance::capacity_oracles,
    acceptance::green_oracles,
    acceptance::szego_suite,
    acceptance::tau_unitarity,
    acceptance::identity_suite,
    acceptance::almost_periodicity,
    acceptance::admissibility,
    acceptance::nth_root_decay,
    acceptance::mass_stability,
    acceptance::homogeneity,
];

/// Criteria 1 to 10; independent criteria run on the rayon pool, results stay in order.
pub fn numerical() -> Vec<CriterionResult> {
    NUMERICAL.par_iter().map(|f| f()).collect()
}

fn report(suite: Suite, criteria: Vec<CriterionResult>) -> VerifyReport {
    let all_pass = criteria.iter().all(|c| c.pass);
    VerifyReport { suite, all_pass, criteria }
}

/// Cantor truncations up to generation 4 through the whole pipeline.
fn cantor_runs() -> Vec<Check> {
    let mut checks = Vec::new();
    for generation in 1..=4 {
        let outcome = (|| -> widom_core::Result<bool> {
            let set: IntervalSet = make_cantor(&cantor_spec(generation)?, generation)?;
            let eq = equilibrium_auto(&set)?;
            let m = build_measure(&set, &WeightSpec::Equilibrium {}, &[])?;
            let c = recurrence_auto(&m, 60)?.coefficients;
            let r = build_report(&ReportInputs {
                measure: &m,
                eq: &eq,
                coefficients: &c,
                burn_in: 30,
                t_max: 12,
                szego_n: 0,
                szego_points: Vec::new(),
            })?;
            Ok(r.widom_factors.iter().all(|w| *w > 0.0) && r.diagnostics.is_some())
        })();
        checks.push(Check::holds(format!("Cantor generation {generation} run complete"), outcome.unwrap_or(false)));
    }
    checks
}

pub fn run_suite(suite: Suite) -> VerifyReport {
    let start = Instant::now();
    let mut criteria = numerical();
    if suite == Suite::Full {
        let t = Instant::now();
        let first = report(Suite::Quick, criteria.clone()).to_json();
        let second = report(Suite::Quick, numerical()).to_json();
        let mut checks = vec![Check::holds("two quick runs give byte-identical reports", first == second)];
        checks.extend(cantor_runs());
        checks.push(Check::holds("full suite within 15 minutes", start.elapsed().as_secs() < FULL_BUDGET_SECS));
        let pass = checks.iter().all(|c| c.pass);
        criteria.push(CriterionResult {
            id: 11,
            name: "determinism and full-suite runtime".into(),
            pass,
            checks,
            elapsed: t.elapsed(),
            budget: std::time::Duration::from_secs(FULL_BUDGET_SECS),
        });
    }
    report(suite, criteria)
}

/// Sampled properties driven by the user seed; printed, never written to a report.
pub fn property_sweep(seed: u64, cases: usize) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = 0;
    for _ in 0..cases {
        let a: f64 = rng.gen_range(-3.0..0.0);
        let gap: f64 = rng.gen_range(0.1..1.5);
        let b: f64 = rng.gen_range(0.2..3.0);
        let Ok(set) = IntervalSet::new(vec![(a - 1.0, a), (a + gap, a + gap + b)]) else { continue };
        let s: f64 = rng.gen_range(0.2..5.0);
        let z = num_complex::Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.1..2.0));
        let w = num_complex::Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-2.0..-0.1));
        let good = (|| -> widom_core::Result<bool> {
            let eq = equilibrium_auto(&set)?;
            let scaled = equilibrium_auto(&set.affine(s, 1.0)?)?;
            let cap_ok = (scaled.capacity() - s * eq.capacity()).abs() <= 1e-9 * s * eq.capacity();
            let sym_ok = (eq.green_two_point(z, w)? - eq.green_two_point(w, z)?).abs() <= 1e-9;
            Ok(cap_ok && sym_ok)
        })();
        if good.unwrap_or(false) {
            ok += 1;
        }
    }
    (ok, cases)
}

/// Runs the suite, writes `verify-<suite>.json` into `out` and returns the report.
pub fn verify(suite: Suite, out: &Path) -> Result<VerifyReport, CliError> {
    let r = run_suite(suite);
    write_atomic(&out.join(format!("verify-{}.json", suite.name())), r.to_json().as_bytes())?;
    Ok(r)
}
