use super::report::{Comparison, Criterion, Curve, ExperimentReport};
use super::{Experiment, ExperimentConfig};
use crate::cadlag::CadlagPath;
use crate::error::Result;
use crate::pointproc::TimeSpacePointMeasure;
use crate::skorokhod::{m1_distance, wm1_distance, M1Options, DEFAULT_TOLERANCE};

pub const FIRST_N: usize = 3;
pub const LAST_N: usize = 50;
/// Weak distance at the last rung must be at most this multiple of `u`.
pub const WEAK_LIMIT_FACTOR: f64 = 0.05;

const SCOPE: &str =
    "Deterministic example: atoms at 1/2 - 1/n (height u/2) and 1/2 (height 2u) merging into one time. \
The sum-maximum images converge in weak M1 while their difference stays a fixed distance from 0 in strong M1.";

fn approximant(u: f64, n: usize) -> Result<TimeSpacePointMeasure> {
    TimeSpacePointMeasure::new(vec![(0.5 - 1.0 / n as f64, u / 2.0), (0.5, 2.0 * u)])
}

fn limit(u: f64) -> Result<TimeSpacePointMeasure> {
    TimeSpacePointMeasure::new(vec![(0.5, u / 2.0), (0.5, 2.0 * u)])
}

/// Maximum minus truncated sum.
fn difference(pair: &CadlagPath) -> Result<CadlagPath> {
    CadlagPath::linear_combination(&[&pair.component(1)?, &pair.component(0)?], &[1.0, -1.0])
}

struct Rung {
    n: usize,
    /// Strong distance of the scalar difference from 0.
    scalar: f64,
    weak: f64,
    strong_lower: f64,
    strong_upper: f64,
}

fn ladder(u: f64) -> Result<Vec<Rung>> {
    let opts = M1Options::default();
    let target = limit(u)?.sum_max_functional(u)?;
    let target_diff = difference(&target)?;
    (FIRST_N..=LAST_N)
        .map(|n| {
            let image = approximant(u, n)?.sum_max_functional(u)?;
            let scalar = m1_distance(&difference(&image)?, &target_diff, &opts)?;
            let weak = wm1_distance(&image, &target, &opts)?;
            let strong = m1_distance(&image, &target, &opts)?;
            Ok(Rung {
                n,
                scalar: scalar.value,
                weak: weak.value,
                strong_lower: strong.lower,
                strong_upper: strong.upper,
            })
        })
        .collect()
}

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let u = config.u;
    let rungs = ladder(u)?;
    let doubled = ladder(2.0 * u)?;
    let slack = DEFAULT_TOLERANCE;
    let mut report = ExperimentReport::new(Experiment::E6, config, SCOPE);

    // (a) the difference path stays exactly u/2 away from 0
    let scalar_err = rungs.iter().map(|r| (r.scalar - u / 2.0).abs()).fold(0.0, f64::max);
    report.stat("scalar_distance_max_abs_error", scalar_err);
    report.criterion(Criterion::new("difference_distance_equals_half_u", scalar_err, Comparison::Le, slack));

    // (b) weak distances shrink to 0
    let last = rungs.last().expect("non-empty ladder");
    let rises = rungs.windows(2).map(|w| w[1].weak - w[0].weak).fold(f64::NEG_INFINITY, f64::max);
    report.stat("weak_distance_last", last.weak);
    report.stat("weak_distance_first", rungs[0].weak);
    report.stat("weak_distance_largest_rise", rises);
    report.criterion(Criterion::new("weak_distance_small_at_last_n", last.weak, Comparison::Le, WEAK_LIMIT_FACTOR * u));
    report.criterion(Criterion::new("weak_distance_nonincreasing", rises, Comparison::Le, slack));

    // (c) the strong distance of the pair dominates half the scalar distance and stays >= u/4
    let factor_two = rungs.iter().map(|r| r.scalar - 2.0 * r.strong_upper).fold(f64::NEG_INFINITY, f64::max);
    let gap = rungs.iter().map(|r| r.strong_lower).fold(f64::INFINITY, f64::min);
    let literal = rungs.iter().filter(|r| r.scalar <= r.strong_upper + slack).count();
    report.stat("strong_pair_distance_min_lower", gap);
    report.stat("factor_two_domination_excess", factor_two);
    report.stat("factor_one_domination_holds_count", literal as f64);
    report.stat("ladder_len", rungs.len() as f64);
    report.criterion(Criterion::new("factor_two_domination", factor_two, Comparison::Le, slack));
    report.criterion(Criterion::new("strong_pair_gap_quarter_u", gap, Comparison::Ge, u / 4.0 - slack));

    // Homogeneity in u holds for the scalar difference; the weak distance is
    // driven by the 1/n time offset and does not scale.
    let ratio_err =
        rungs.iter().zip(&doubled).map(|(a, b)| (b.scalar - 2.0 * a.scalar).abs() / a.scalar).fold(0.0, f64::max);
    let weak_ratio = doubled.last().expect("non-empty").weak / last.weak;
    report.stat("doubling_scalar_relative_error", ratio_err);
    report.stat("doubling_weak_ratio_last", weak_ratio);
    report.criterion(Criterion::new("doubling_u_doubles_difference_distance", ratio_err, Comparison::Le, 1e-9));

    let rows = rungs.iter().map(|r| vec![r.n as f64, r.scalar, r.weak, r.strong_lower, r.strong_upper]).collect();
    report.curve("ladder", Curve::new(&["n", "difference_m1", "pair_wm1", "pair_m1_lower", "pair_m1_upper"], rows));
    Ok(report.finish())
}
