//! Bloch-sphere grids and golden-section refinement shared by the qubit
//! searches.

use std::f64::consts::{PI, TAU};

pub(crate) fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// `azimuth x polar` grid, polar angle outermost, starting at the north pole.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SphereGrid {
    pub azimuth: usize,
    pub polar: usize,
}

impl SphereGrid {
    pub fn len(&self) -> usize {
        self.azimuth * self.polar
    }

    pub fn angles(&self, index: usize) -> (f64, f64) {
        let (k, j) = (index / self.azimuth, index % self.azimuth);
        let theta = if self.polar > 1 {
            PI * k as f64 / (self.polar - 1) as f64
        } else {
            0.0
        };
        (theta, TAU * j as f64 / self.azimuth as f64)
    }

    /// Half-widths of one grid cell.
    pub fn cell(&self) -> (f64, f64) {
        let dt = if self.polar > 1 {
            PI / (self.polar - 1) as f64
        } else {
            PI
        };
        (dt, TAU / self.azimuth as f64)
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximisation of `f` on `[lo, hi]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Alternating golden-section passes over polar and azimuthal angle inside
/// the cell around `(theta, phi)`. Never returns less than the start value.
pub(crate) fn refine<F: Fn(f64, f64) -> f64>(
    f: F,
    start: (f64, f64),
    cell: (f64, f64),
    iters: usize,
) -> (f64, f64, f64) {
    let (mut theta, mut phi) = start;
    let mut best = f(theta, phi);
    if iters == 0 {
        return (best, theta, phi);
    }
    let (mut dt, mut dp) = cell;
    for _round in 0..2 {
        let (t, v) = golden_max(|t| f(t, phi), theta - dt, theta + dt, iters);
        if v > best {
            best = v;
            theta = t;
        }
        let (p, v) = golden_max(|p| f(theta, p), phi - dp, phi + dp, iters);
        if v > best {
            best = v;
            phi = p;
        }
        dt *= 0.5;
        dp *= 0.5;
    }
    (best, theta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3), -1.0, 1.0, 60);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(v > -1e-15);
    }

    #[test]
    fn grid_starts_at_north_pole() {
        let g = SphereGrid { azimuth: 8, polar: 5 };
        let (t, p) = g.angles(0);
        assert_eq!(direction(t, p), [0.0, 0.0, 1.0]);
        let (t, _) = g.angles(g.len() - 1);
        assert!((t - PI).abs() < 1e-15);
    }

    #[test]
    fn refine_improves_off_grid_peak() {
        let target = direction(1.0, 2.0);
        let f = |t: f64, p: f64| {
            let n = direction(t, p);
            n.iter().zip(&target).map(|(a, b)| a * b).sum::<f64>()
        };
        let (v, _, _) = refine(f, (0.9, 2.1), (0.2, 0.2), 40);
        assert!(v > 1.0 - 1e-10);
    }
}
