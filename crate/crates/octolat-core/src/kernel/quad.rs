//! Adaptive Gauss-Legendre quadrature on a finite interval.
//!
//! Panels carry a pair of embedded rules (n and 2n points); the difference
//! is the error estimate. The worst panel is bisected until the summed
//! estimate meets the requested relative tolerance. Panel selection is
//! deterministic, so repeated runs produce bit-identical values.

use std::sync::OnceLock;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not converge within {max_panels} panels (err {err:.3e}, target {target:.3e})")]
    NonConvergence {
        max_panels: usize,
        err: f64,
        target: f64,
    },
    #[error("invalid tolerance {0}")]
    BadTolerance(f64),
}

/// Gauss-Legendre rule of fixed order on `[-1, 1]`.
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> GaussLegendre {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Bonnet recurrence for P_n(x) and P'_n(x)
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| (GaussLegendre::new(15), GaussLegendre::new(30)))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn make_panel(a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> Panel {
    let (lo, hi) = rules();
    let coarse = lo.integrate(a, b, &mut *f);
    let fine = hi.integrate(a, b, &mut *f);
    Panel {
        a,
        b,
        value: fine,
        err: (fine - coarse).abs(),
    }
}

/// Adaptive integral of `f` over `[a, b]` to relative tolerance `rel_tol`
/// (with absolute floor `abs_floor` for integrals near zero).
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<f64, QuadError> {
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(QuadError::BadTolerance(rel_tol));
    }
    const MAX_PANELS: usize = 4000;

    // geometric initial panels resolve the scale spread of the integrand
    let mut panels = Vec::new();
    let mut left = a;
    let mut width = 1.0f64.min(b - a);
    while left < b {
        let right = (left + width).min(b);
        panels.push(make_panel(left, right, &mut f));
        left = right;
        width *= 2.0;
    }

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let total_abs: f64 = panels.iter().map(|p| p.value.abs()).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        // the 1e-15 * total_abs term stops refinement at the rounding noise
        // of the panel sums themselves
        let target = (rel_tol * total.abs())
            .max(1e-15 * total_abs)
            .max(abs_floor);
        if err <= target {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(QuadError::NonConvergence {
                max_panels: MAX_PANELS,
                err,
                target,
            });
        }
        // split the worst panel (first occurrence on ties: deterministic)
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.err > panels[worst].err {
                worst = i;
            }
        }
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        panels[worst] = make_panel(pa, mid, &mut f);
        panels.push(make_panel(mid, pb, &mut f));
    }
}
