//! Monte-Carlo harness for random sampling patterns.
//!
//! Trials run in parallel. Trial `t` of a run with master seed `s` draws
//! everything from `rng::derive_seed(s, t)`, so results do not depend on
//! scheduling or thread count.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::identify::{project, recover};
use crate::linalg::{random_subspace_with, subspace_distance, Tolerances};
use crate::pattern::{is_identifiable, random_pattern, random_pattern_with, theorem2_ell};
use crate::rng;

/// Distance below which a recovered subspace counts as exact.
pub const RECOVERY_DISTANCE: f64 = 1e-8;

/// Two-sided 95% normal quantile used by the Wilson interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub d: usize,
    pub r: usize,
    pub ell: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub wilson_ci: (f64, f64),
    pub seed: u64,
    /// Wall-clock seconds.
    pub elapsed: f64,
    /// `r ≤ d/6`, where the random-sampling guarantee applies.
    pub within_bound_range: bool,
}

impl TrialReport {
    fn new(
        d: usize,
        r: usize,
        ell: usize,
        trials: usize,
        successes: usize,
        seed: u64,
        elapsed: f64,
    ) -> Self {
        Self {
            d,
            r,
            ell,
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            wilson_ci: wilson_interval(successes, trials),
            seed,
            elapsed,
            within_bound_range: 6 * r <= d,
        }
    }

    pub fn table_header() -> &'static str {
        "     d      r    ell   trials  successes     rate   ci_low  ci_high        seed  elapsed_s"
    }

    pub fn table_row(&self) -> String {
        format!(
            "{:>6} {:>6} {:>6} {:>8} {:>10} {:>8.4} {:>8.4} {:>8.4} {:>11} {:>10.3}{}",
            self.d,
            self.r,
            self.ell,
            self.trials,
            self.successes,
            self.rate,
            self.wilson_ci.0,
            self.wilson_ci.1,
            self.seed,
            self.elapsed,
            if self.within_bound_range {
                ""
            } else {
                "  (r > d/6)"
            }
        )
    }

    pub const CSV_HEADER: &'static str =
        "d,r,ell,trials,successes,rate,ci_low,ci_high,seed,elapsed_s";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.d,
            self.r,
            self.ell,
            self.trials,
            self.successes,
            self.rate,
            self.wilson_ci.0,
            self.wilson_ci.1,
            self.seed,
            self.elapsed
        )
    }
}

/// Plain-text table, one report per line.
pub fn format_table(reports: &[TrialReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", TrialReport::table_header());
    for r in reports {
        let _ = writeln!(s, "{}", r.table_row());
    }
    s
}

pub fn format_csv(reports: &[TrialReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", TrialReport::CSV_HEADER);
    for r in reports {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The bounds are exactly 0 and 1 at the extremes; pin them there so
    // rounding cannot leave them a few ulps inside.
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

fn check_params(d: usize, r: usize, ell: usize) -> Result<()> {
    if r == 0 || r >= d {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= r < d, got r = {r}, d = {d}"
        )));
    }
    if ell < r + 1 || ell > d {
        return Err(Error::InvalidArgument(format!(
            "ell = {ell} must lie in [r + 1, d] = [{}, {d}]",
            r + 1
        )));
    }
    Ok(())
}

/// Counts successes of `trial` over derived seeds, in parallel.
fn count_successes<F>(trials: usize, seed: u64, trial: F) -> Result<usize>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    (0..trials as u64)
        .into_par_iter()
        .map(|t| trial(rng::derive_seed(seed, t)).map(usize::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// One draw of `d − r` uniformly random `ell`-row columns; succeeds when
/// the pattern is identifiable.
pub fn theorem2_trial(d: usize, r: usize, ell: usize, seed: u64) -> Result<bool> {
    check_params(d, r, ell)?;
    is_identifiable(&random_pattern(d, d - r, ell, r, seed)?)
}

/// Success rate of [`theorem2_trial`].
pub fn estimate_rate(
    d: usize,
    r: usize,
    ell: usize,
    trials: usize,
    seed: u64,
) -> Result<TrialReport> {
    check_params(d, r, ell)?;
    let start = Instant::now();
    let successes = count_successes(trials, seed, |s| theorem2_trial(d, r, ell, s))?;
    Ok(TrialReport::new(
        d,
        r,
        ell,
        trials,
        successes,
        seed,
        start.elapsed().as_secs_f64(),
    ))
}

/// [`estimate_rate`] at the sample size prescribed for failure probability
/// `eps`.
pub fn estimate_rate_for_eps(
    d: usize,
    r: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<TrialReport> {
    let bound = theorem2_ell(d, r, eps)?;
    estimate_rate(d, r, bound.ell.max(r + 1), trials, seed)
}

/// Outcome of one end-to-end trial, judged at both levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairedOutcome {
    /// The pattern passes the combinatorial test.
    pub pattern_identifiable: bool,
    /// Recovery from projections returned the true subspace.
    pub recovered: bool,
}

/// Draws a random subspace and pattern, then checks the pattern and runs
/// recovery from the projections.
pub fn paired_trial(d: usize, r: usize, ell: usize, seed: u64) -> Result<PairedOutcome> {
    check_params(d, r, ell)?;
    let tol = Tolerances::default();
    let mut g = rng::from_seed(seed);
    let s = random_subspace_with(&mut g, d, r)?;
    let p = random_pattern_with(&mut g, d, d - r, ell, r)?;
    let observations = p
        .columns()
        .iter()
        .map(|m| project(&s, m, &tol))
        .collect::<Result<Vec<_>>>()?;
    let result = recover(&observations, d, r, &tol)?;
    let recovered = match &result.subspace {
        Some(found) => subspace_distance(found, &s)? <= RECOVERY_DISTANCE,
        None => false,
    };
    Ok(PairedOutcome {
        pattern_identifiable: is_identifiable(&p)?,
        recovered,
    })
}

/// End-to-end recovery success rate for each `ell`, sorted by `ell`.
pub fn recovery_curve(
    d: usize,
    r: usize,
    ell_values: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialReport>> {
    let mut ells = ell_values.to_vec();
    ells.sort_unstable();
    ells.dedup();
    for &ell in &ells {
        check_params(d, r, ell)?;
    }
    ells.iter()
        .map(|&ell| {
            let start = Instant::now();
            let master = rng::derive_seed(seed, ell as u64);
            let successes =
                count_successes(
                    trials,
                    master,
                    |s| Ok(paired_trial(d, r, ell, s)?.recovered),
                )?;
            Ok(TrialReport::new(
                d,
                r,
                ell,
                trials,
                successes,
                seed,
                start.elapsed().as_secs_f64(),
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_interval_matches_closed_form() {
        // 80 of 100, reference values from statsmodels proportion_confint.
        let (lo, hi) = wilson_interval(80, 100);
        assert!(
            (lo - 0.711_171).abs() < 1e-6 && (hi - 0.866_633).abs() < 1e-6,
            "{lo} {hi}"
        );
        assert_eq!(wilson_interval(0, 10).0, 0.0);
        assert_eq!(wilson_interval(10, 10).1, 1.0);
    }

    #[test]
    fn full_observation_always_succeeds() {
        for seed in 0..5 {
            assert!(theorem2_trial(20, 3, 20, seed).unwrap());
        }
    }

    #[test]
    fn smoke_at_prescribed_ell() {
        let ell = theorem2_ell(60, 5, 0.5).unwrap().ell;
        assert!(theorem2_trial(60, 5, ell, 1).unwrap());
    }

    #[test]
    fn sparse_columns_rarely_expand() {
        let rep = estimate_rate(30, 1, 2, 1000, 3).unwrap();
        assert!(rep.rate < 0.5, "rate {}", rep.rate);
    }

    #[test]
    fn reports_are_reproducible_and_self_consistent() {
        let a = estimate_rate(12, 2, 4, 300, 9).unwrap();
        let b = estimate_rate(12, 2, 4, 300, 9).unwrap();
        assert_eq!(a.successes, b.successes);
        assert!(a.wilson_ci.0 <= a.rate && a.rate <= a.wilson_ci.1);
        assert!(estimate_rate(12, 2, 4, 0, 9).is_err());
        assert!(estimate_rate(12, 2, 2, 10, 9).is_err());
    }

    #[test]
    fn full_recovery_at_ell_equals_d() {
        let reports = recovery_curve(8, 2, &[8, 3], 40, 4).unwrap();
        assert_eq!(reports[0].ell, 3);
        assert_eq!(reports[1].rate, 1.0);
    }

    #[test]
    fn table_and_csv_have_one_line_per_report() {
        let reports = recovery_curve(6, 1, &[2, 6], 10, 1).unwrap();
        assert_eq!(format_table(&reports).lines().count(), 3);
        let csv = format_csv(&reports);
        assert_eq!(csv.lines().count(), 3);
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 10);
    }
}
