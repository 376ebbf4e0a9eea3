//! Gauss-Legendre rules, composite panels and Richardson extrapolation.

use num_complex::Complex;

use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence in `f64`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Fixed-order rule mapped onto arbitrary intervals.
#[derive(Clone, Debug)]
pub struct GaussRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn new(order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        Self { nodes: x.into_iter().map(T::lit).collect(), weights: w.into_iter().map(T::lit).collect() }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Appends the mapped nodes of `[a, b]` to `out` as `(node, weight)`.
    pub fn push_interval(&self, a: T, b: T, out: &mut Vec<(T, T)>) {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            out.push((mid + half * *x, half * *w));
        }
    }

    /// Composite rule on `[a, b]` with panels no wider than `max_width`.
    pub fn push_composite(&self, a: T, b: T, max_width: T, out: &mut Vec<(T, T)>) {
        if b <= a {
            return;
        }
        let panels = ((b - a) / max_width).ceil().to_usize().unwrap_or(1).max(1);
        let h = (b - a) / T::from_usize_lossy(panels);
        for k in 0..panels {
            let lo = a + h * T::from_usize_lossy(k);
            let hi = if k + 1 == panels { b } else { lo + h };
            self.push_interval(lo, hi, out);
        }
    }

    /// Composite rule on `[lo, hi]` whose breakpoints cluster geometrically
    /// (ratio 2, innermost half-width `h0`) around each of `centers`.
    pub fn push_graded(&self, lo: T, hi: T, centers: &[T], h0: T, max_width: T, out: &mut Vec<(T, T)>) {
        let mut breaks = vec![lo, hi];
        for &c in centers {
            let mut h = h0;
            loop {
                let (l, r) = (c - h, c + h);
                if l > lo && l < hi {
                    breaks.push(l);
                }
                if r > lo && r < hi {
                    breaks.push(r);
                }
                if l <= lo && r >= hi {
                    break;
                }
                h = h * T::lit(2.0);
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        breaks.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * (T::one() + b.abs()));
        for pair in breaks.windows(2) {
            self.push_composite(pair[0], pair[1], max_width, out);
        }
    }
}

/// Neville tableau for values at `delta_k = delta_0 2^{-k}` under the model
/// `u(delta) = u_0 + c_1 delta + c_2 delta^2 + ...`. Returns the extrapolated
/// limit and the difference between the last two diagonal entries.
pub fn richardson<T: Real>(levels: &[Vec<Complex<T>>]) -> (Vec<Complex<T>>, T) {
    assert!(!levels.is_empty(), "need at least one level");
    let mut prev: Vec<Vec<Complex<T>>> = Vec::new();
    let mut estimate = T::zero();
    let mut best = levels[0].clone();
    for (k, row0) in levels.iter().enumerate() {
        let mut row = vec![row0.clone()];
        for j in 1..=k {
            let factor = T::one() / (T::lit(2f64.powi(j as i32)) - T::one());
            let cur = &row[j - 1];
            let above = &prev[j - 1];
            row.push(cur.iter().zip(above).map(|(c, a)| *c + (*c - *a) * factor).collect());
        }
        if k > 0 {
            let last = &row[k];
            let sub = &row[k - 1];
            let num = last.iter().zip(sub).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()));
            estimate = num;
        }
        best = row[k].clone();
        prev = row;
    }
    (best, estimate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 12, 31] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn graded_rule_resolves_lorentzian() {
        let rule = GaussRule::<f64>::new(12);
        let d = 1e-4;
        let mut nodes = Vec::new();
        rule.push_graded(0.0, 2.0, &[1.0], d / 4.0, 0.25, &mut nodes);
        let q: f64 = nodes.iter().map(|(x, w)| w * d / ((x - 1.0).powi(2) + d * d)).sum();
        let exact = 2.0 * (1.0 / d).atan();
        assert!((q - exact).abs() < 1e-10);
    }

    #[test]
    fn richardson_removes_polynomial_error() {
        let levels: Vec<Vec<Complex<f64>>> = (0..6)
            .map(|k| {
                let d = 0.1 * 0.5f64.powi(k);
                vec![Complex::new(1.0 + 3.0 * d - 2.0 * d * d + d.powi(3), 2.0 * d)]
            })
            .collect();
        let (v, _) = richardson(&levels);
        assert!((v[0] - Complex::new(1.0, 0.0)).norm() < 1e-14);
    }
}
