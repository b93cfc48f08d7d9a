//! Fréchet distance between completed graphs under the max-norm.
//!
//! A parametric representation of `Gamma_x` is a nondecreasing continuous
//! traversal of the polygonal chain built in [`super::chain`], so the strong
//! M1 distance is the Fréchet distance of the two chains in
//! `[0, 1] x R^d` with the max-norm. The decision question "is the distance at
//! most `eps`" is answered exactly (up to rounding) by propagating reachable
//! intervals through the free-space diagram; free space inside a cell is
//! convex for any norm, so one interval per cell edge suffices.

use super::chain::{max_norm, Chain};

const EDGE_SLACK: f64 = 1e-12;

type Interval = Option<(f64, f64)>;

/// Parameters `lambda` in `[0, 1]` with `||a + lambda (b - a) - q|| <= eps`.
fn free_interval(a: &[f64], b: &[f64], q: &[f64], eps: f64) -> Interval {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for ((&ac, &bc), &qc) in a.iter().zip(b).zip(q) {
        let d = bc - ac;
        let off = qc - ac;
        if d == 0.0 {
            if off.abs() > eps {
                return None;
            }
        } else {
            let (l, h) = ((off - eps) / d, (off + eps) / d);
            let (l, h) = if d > 0.0 { (l, h) } else { (h, l) };
            lo = lo.max(l);
            hi = hi.min(h);
        }
        if lo > hi {
            return None;
        }
    }
    Some((lo, hi))
}

fn clip_from(interval: Interval, from: f64) -> Interval {
    interval.and_then(|(lo, hi)| {
        let lo = lo.max(from);
        (lo <= hi).then_some((lo, hi))
    })
}

fn starts_at_zero(i: Interval) -> bool {
    matches!(i, Some((lo, _)) if lo <= EDGE_SLACK)
}

fn ends_at_one(i: Interval) -> bool {
    matches!(i, Some((_, hi)) if hi >= 1.0 - EDGE_SLACK)
}

/// `true` iff the Fréchet distance between the chains is at most `eps`.
pub(crate) fn decide(p: &Chain, q: &Chain, eps: f64) -> bool {
    let (np, nq) = (p.len(), q.len());
    if max_norm(p.point(0), q.point(0)) > eps || max_norm(p.last(), q.last()) > eps {
        return false;
    }
    if np == 1 || nq == 1 {
        // one side is a single point: every vertex of the other must be close
        let (single, other) = if np == 1 { (p, q) } else { (q, p) };
        return (0..other.len()).all(|i| max_norm(single.point(0), other.point(i)) <= eps);
    }
    let (segs_p, segs_q) = (np - 1, nq - 1);

    // reachable part of the left edge of each cell in the current column
    let mut column: Vec<Interval> = Vec::with_capacity(segs_q);
    let mut open = true;
    for j in 0..segs_q {
        let f = free_interval(q.point(j), q.point(j + 1), p.point(0), eps);
        let reach = if open && starts_at_zero(f) { f } else { None };
        open = ends_at_one(reach);
        column.push(reach);
    }

    let mut bottom_open = true;
    let mut next_column: Vec<Interval> = vec![None; segs_q];
    let mut top_of_last_row: Interval = None;
    for i in 0..segs_p {
        let (pa, pb) = (p.point(i), p.point(i + 1));
        let f0 = free_interval(pa, pb, q.point(0), eps);
        let mut bottom = if bottom_open && starts_at_zero(f0) { f0 } else { None };
        bottom_open = ends_at_one(bottom);

        for j in 0..segs_q {
            let left = column[j];
            let right_free = free_interval(q.point(j), q.point(j + 1), pb, eps);
            let top_free = free_interval(pa, pb, q.point(j + 1), eps);
            next_column[j] = match (bottom, left) {
                (Some(_), _) => right_free,
                (None, Some((lo, _))) => clip_from(right_free, lo),
                (None, None) => None,
            };
            bottom = match (left, bottom) {
                (Some(_), _) => top_free,
                (None, Some((lo, _))) => clip_from(top_free, lo),
                (None, None) => None,
            };
        }
        top_of_last_row = bottom;
        std::mem::swap(&mut column, &mut next_column);
    }
    ends_at_one(column[segs_q - 1]) || ends_at_one(top_of_last_row)
}

/// Discrete Fréchet distance between the vertex sequences. Any coupling of
/// vertices extends linearly to a coupling of the chains whose cost is
/// attained at vertex pairs, so this is an upper bound on the continuous value.
pub(crate) fn discrete_upper_bound(p: &Chain, q: &Chain) -> f64 {
    let (np, nq) = (p.len(), q.len());
    let mut prev = vec![f64::INFINITY; nq];
    let mut cur = vec![0.0; nq];
    for i in 0..np {
        let pi = p.point(i);
        for j in 0..nq {
            let d = max_norm(pi, q.point(j));
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]),
            };
            cur[j] = d.max(best);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[nq - 1]
}
