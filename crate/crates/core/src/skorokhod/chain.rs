//! Completed graphs as polygonal chains in `[0, 1] x R^d`.

use crate::cadlag::CadlagPath;

/// Vertices of the completed graph `Gamma_x`, stored row-major with
/// `1 + dim` coordinates per vertex (time first).
///
/// The graph is traversed as: initial level, a vertical segment at every jump
/// joining `x(t-)` to `x(t)`, and horizontal runs between jumps. Consecutive
/// duplicate vertices are dropped.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Chain {
    pub(crate) width: usize,
    pub(crate) points: Vec<f64>,
}

impl Chain {
    pub(crate) fn from_path(path: &CadlagPath) -> Self {
        let width = path.dim() + 1;
        let mut chain = Chain { width, points: Vec::with_capacity(width * (2 * path.num_jumps() + 2)) };
        chain.push(0.0, path.level(0));
        for (k, &t) in path.jump_times().iter().enumerate() {
            chain.push(t, path.level(k));
            chain.push(t, path.level(k + 1));
        }
        chain.push(1.0, path.final_value());
        chain
    }

    fn push(&mut self, t: f64, value: &[f64]) {
        let start = self.points.len();
        self.points.push(t);
        self.points.extend_from_slice(value);
        if start >= self.width {
            let (prev, new) = self.points[start - self.width..].split_at(self.width);
            if prev == new {
                self.points.truncate(start);
            }
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.points.len() / self.width
    }

    pub(crate) fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.width..(i + 1) * self.width]
    }

    pub(crate) fn last(&self) -> &[f64] {
        self.point(self.len() - 1)
    }

    /// Resamples the chain to exactly `count` points, keeping every vertex and
    /// spreading the extra points over segments in proportion to their length.
    pub(crate) fn densify(&self, count: usize) -> Chain {
        let n = self.len();
        if count <= n || n < 2 {
            return self.clone();
        }
        let lengths: Vec<f64> = (0..n - 1).map(|i| max_norm(self.point(i), self.point(i + 1))).collect();
        let total: f64 = lengths.iter().sum();
        let extra = count - n;
        let mut per_segment: Vec<usize> =
            lengths.iter().map(|l| ((extra as f64) * l / total).floor() as usize).collect();
        let remainder = extra - per_segment.iter().sum::<usize>();
        // hand out the rounding remainder to the longest segments
        let mut order: Vec<usize> = (0..lengths.len()).collect();
        order.sort_by(|&a, &b| lengths[b].total_cmp(&lengths[a]));
        for &i in order.iter().cycle().take(remainder) {
            per_segment[i] += 1;
        }

        let mut out = Chain { width: self.width, points: Vec::with_capacity(count * self.width) };
        for (i, &m) in per_segment.iter().enumerate() {
            let (a, b) = (self.point(i), self.point(i + 1));
            out.points.extend_from_slice(a);
            for s in 1..=m {
                let lambda = s as f64 / (m + 1) as f64;
                out.points.extend(a.iter().zip(b).map(|(x, y)| x + lambda * (y - x)));
            }
        }
        out.points.extend_from_slice(self.last());
        out
    }
}

pub(crate) fn max_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
