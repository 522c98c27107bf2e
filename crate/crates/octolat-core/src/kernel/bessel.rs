//! Exponentially scaled modified Bessel functions `e^{-z} I_m(z)`.
//!
//! Computed for all orders `0..=m_max` at once by Miller's backward
//! recurrence, normalized with `I_0(z) + 2 sum_{k>=1} I_k(z) = e^z`. The
//! scaled form stays bounded for every `z >= 0`, which is what the kernel
//! integrand needs on the semi-infinite interval.

/// `[e^{-z} I_0(z), ..., e^{-z} I_{m_max}(z)]` for `z >= 0`.
pub fn scaled_bessel_i(z: f64, m_max: usize) -> Vec<f64> {
    assert!(z >= 0.0 && z.is_finite(), "argument must be finite and nonnegative");
    if z == 0.0 {
        let mut out = vec![0.0; m_max + 1];
        out[0] = 1.0;
        return out;
    }

    // Start high enough that the truncation error (which decays like
    // exp(-start^2/(2z)) until orders reach z) is below double precision.
    let start = m_max + 20 + (90.0 * z).sqrt().ceil() as usize;

    let mut out = vec![0.0; m_max + 1];
    let mut above = 0.0f64; // I_{p+1}
    let mut here = 1.0f64; // I_p (arbitrary seed; normalized away)
    let mut sum = 0.0f64; // running I_0 + 2 sum I_k over the raw values

    const RESCALE_LIMIT: f64 = 1e280;
    const RESCALE: f64 = 1e-280;

    for p in (0..=start).rev() {
        if p <= m_max {
            out[p] = here;
        }
        sum += if p == 0 { here } else { 2.0 * here };
        if p > 0 {
            let below = above + (2.0 * p as f64 / z) * here;
            above = here;
            here = below;
            if here.abs() > RESCALE_LIMIT {
                here *= RESCALE;
                above *= RESCALE;
                sum *= RESCALE;
                for v in out.iter_mut() {
                    *v *= RESCALE;
                }
            }
        }
    }

    for v in out.iter_mut() {
        *v /= sum;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: power series of `e^{-z} I_m(z)`, accurate for
    /// small arguments.
    fn scaled_series(z: f64, m: usize) -> f64 {
        let half = 0.5 * z;
        let mut term = 1.0;
        for k in 1..=m {
            term *= half / k as f64;
        }
        let mut acc = term;
        let q = half * half;
        for k in 1..200 {
            term *= q / (k as f64 * (m + k) as f64);
            acc += term;
            if term.abs() < 1e-20 * acc.abs() {
                break;
            }
        }
        acc * (-z).exp()
    }

    /// Second independent oracle: the integral representation
    /// `e^{-z} I_m(z) = (1/pi) int_0^pi e^{z(cos t - 1)} cos(m t) dt`,
    /// evaluated by composite Simpson on a fine grid.
    fn scaled_integral(z: f64, m: usize) -> f64 {
        let n = 200_000; // even
        let h = std::f64::consts::PI / n as f64;
        let f = |t: f64| (z * (t.cos() - 1.0)).exp() * (m as f64 * t).cos();
        let mut acc = f(0.0) + f(std::f64::consts::PI);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h);
        }
        acc * h / 3.0 / std::f64::consts::PI
    }

    #[test]
    fn matches_series_for_small_arguments() {
        for &z in &[1e-8, 1e-3, 0.1, 0.5, 1.0, 2.0] {
            let values = scaled_bessel_i(z, 10);
            for m in 0..=10 {
                let expected = scaled_series(z, m);
                let got = values[m];
                assert!(
                    (got - expected).abs() <= 1e-14 * expected.abs().max(1e-14),
                    "z={z}, m={m}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn matches_integral_for_large_arguments() {
        // 5e-12 relative: the Simpson oracle itself carries a few hundred
        // ulps of summation noise over its 200k panels
        for &z in &[5.0, 50.0, 500.0, 1591.5] {
            let values = scaled_bessel_i(z, 8);
            for m in 0..=8 {
                let expected = scaled_integral(z, m);
                let got = values[m];
                assert!(
                    (got - expected).abs() <= 5e-12 * expected.abs().max(1e-12),
                    "z={z}, m={m}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn zero_argument() {
        let v = scaled_bessel_i(0.0, 4);
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn normalization_sum_is_consistent() {
        // e^{-z}(I_0 + 2 sum I_k) = 1; reconstruct the partial sum and check
        // it approaches 1 once orders reach well past z.
        let z = 30.0;
        let m_max = 30 + (90.0f64 * 30.0).sqrt() as usize + 20;
        let v = scaled_bessel_i(z, m_max);
        let total = v[0] + 2.0 * v[1..].iter().sum::<f64>();
        assert!((total - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn monotone_decreasing_in_order() {
        for &z in &[0.5, 10.0, 300.0] {
            let v = scaled_bessel_i(z, 12);
            for m in 1..v.len() {
                assert!(v[m] <= v[m - 1] + 1e-16, "I_m must decay in m at z={z}");
                assert!(v[m] >= 0.0);
            }
        }
    }
}
