//! Closed-form M1 distance between nondecreasing scalar paths.
//!
//! For a nondecreasing path the completed graph is monotone in both time and
//! value. In rotated coordinates `w = t + v`, `z = v - t` it is the graph of a
//! function `z(w)` with slopes `+1` (vertical pieces) and `-1` (horizontal
//! pieces), i.e. a 1-Lipschitz function, and the max-norm becomes
//! `(|dw| + |dz|) / 2`.
//!
//! By the Lipschitz property the closest point of the other graph to
//! `(w, z1(w))` sits at the same `w` (clamped into the other graph's range),
//! at distance `(|w - w'| + |z1(w) - z2(w')|) / 2`. Pairing points with equal
//! clamped `w` is a monotone traversal of both graphs, so the Fréchet and the
//! Hausdorff distance coincide and both equal the supremum of that quantity.
//! Between breakpoints the quantity is convex in `w`, so the supremum is a
//! maximum over the vertices of both graphs.

use super::chain::Chain;

struct Rotated {
    w: Vec<f64>,
    z: Vec<f64>,
}

impl Rotated {
    fn new(chain: &Chain) -> Self {
        debug_assert_eq!(chain.width, 2);
        let (w, z) = (0..chain.len())
            .map(|i| {
                let p = chain.point(i);
                (p[0] + p[1], p[1] - p[0])
            })
            .unzip();
        Rotated { w, z }
    }

    fn clamp(&self, w: f64) -> f64 {
        w.clamp(self.w[0], self.w[self.w.len() - 1])
    }

    fn z_at(&self, w: f64) -> f64 {
        let k = self.w.partition_point(|&x| x <= w);
        if k == 0 {
            return self.z[0];
        }
        if k == self.w.len() {
            return self.z[k - 1];
        }
        let (w0, w1) = (self.w[k - 1], self.w[k]);
        let (z0, z1) = (self.z[k - 1], self.z[k]);
        z0 + (z1 - z0) * (w - w0) / (w1 - w0)
    }
}

/// Exact distance between the completed graphs of two nondecreasing scalar paths.
pub(crate) fn monotone_distance(x: &Chain, y: &Chain) -> f64 {
    let (a, b) = (Rotated::new(x), Rotated::new(y));
    a.w.iter()
        .chain(b.w.iter())
        .map(|&w| {
            let (wa, wb) = (a.clamp(w), b.clamp(w));
            0.5 * ((wa - wb).abs() + (a.z_at(wa) - b.z_at(wb)).abs())
        })
        .fold(0.0, f64::max)
}
