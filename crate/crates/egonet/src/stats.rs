//! Small numeric helpers shared across the pipeline.
//!
//! Population aggregates are always reduced in a fixed (ego-index) order
//! with compensated summation, so report values do not depend on how many
//! worker threads produced the per-ego records.

/// Kahan–Babuška compensated accumulator.
///
/// Keeps a running compensation term so that long sums of small terms do not
/// lose low-order bits; summing in a fixed order therefore yields identical
/// bits run after run.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Compensated sum of a slice in its given order.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Sample mean together with the half-width of a 95% confidence interval
/// under the normal approximation (`1.96 * s / sqrt(n)`).
///
/// Returns `(mean, half_width)`; the half width is zero when fewer than two
/// samples are available.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = kahan_sum(values.iter().copied()) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = kahan_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    let var = ss / (n as f64 - 1.0);
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// Accumulator for the first and second joint moments of paired samples,
/// used by ratio-of-means confidence intervals and regression fits.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments2 {
    pub n: u64,
    sx: KahanSum,
    sy: KahanSum,
    sxx: KahanSum,
    syy: KahanSum,
    sxy: KahanSum,
}

impl Moments2 {
    pub fn new() -> Self {
        Moments2::default()
    }

    pub fn add(&mut self, x: f64, y: f64) {
        self.n += 1;
        self.sx.add(x);
        self.sy.add(y);
        self.sxx.add(x * x);
        self.syy.add(y * y);
        self.sxy.add(x * y);
    }

    pub fn merge(&mut self, other: &Moments2) {
        self.n += other.n;
        self.sx.add(other.sx.value());
        self.sy.add(other.sy.value());
        self.sxx.add(other.sxx.value());
        self.syy.add(other.syy.value());
        self.sxy.add(other.sxy.value());
    }

    pub fn sum_x(&self) -> f64 {
        self.sx.value()
    }

    pub fn sum_y(&self) -> f64 {
        self.sy.value()
    }

    pub fn mean_x(&self) -> f64 {
        self.sx.value() / self.n as f64
    }

    pub fn mean_y(&self) -> f64 {
        self.sy.value() / self.n as f64
    }

    /// Sum of squared deviations of x around its mean.
    pub fn ss_x(&self) -> f64 {
        (self.sxx.value() - self.sx.value() * self.sx.value() / self.n as f64).max(0.0)
    }

    /// Sum of squared deviations of y around its mean.
    pub fn ss_y(&self) -> f64 {
        (self.syy.value() - self.sy.value() * self.sy.value() / self.n as f64).max(0.0)
    }

    /// Sum of products of deviations around the means.
    pub fn ss_xy(&self) -> f64 {
        self.sxy.value() - self.sx.value() * self.sy.value() / self.n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kahan_recovers_lost_bits() {
        // Naive summation of 1.0 followed by 1e16 copies of 1e-16 drifts;
        // the compensated sum stays at the analytic value for a smaller but
        // still telling version of the same pattern.
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..10_000_000 {
            acc.add(1e-16);
        }
        assert_relative_eq!(acc.value(), 1.0 + 1e-9, max_relative = 1e-12);
    }

    #[test]
    fn mean_ci_matches_hand_computation() {
        let (mean, ci) = mean_ci95(&[1.0, 2.0, 3.0, 4.0]);
        assert_relative_eq!(mean, 2.5);
        // sample variance 5/3, se = sqrt(5/12)
        assert_relative_eq!(ci, 1.96 * (5.0f64 / 12.0).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn mean_ci_degenerate_sizes() {
        assert!(mean_ci95(&[]).0.is_nan());
        assert_eq!(mean_ci95(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn moments_match_direct_formulas() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys = [3.0, 5.0, 9.0, 17.0]; // y = 2x + 1
        let mut m = Moments2::new();
        for (x, y) in xs.iter().zip(&ys) {
            m.add(*x, *y);
        }
        let mx = xs.iter().sum::<f64>() / 4.0;
        let ssx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        assert_relative_eq!(m.ss_x(), ssx, max_relative = 1e-12);
        assert_relative_eq!(m.ss_xy() / m.ss_x(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn merge_equals_single_pass() {
        let mut all = Moments2::new();
        let mut a = Moments2::new();
        let mut b = Moments2::new();
        for i in 0..100 {
            let x = i as f64 * 0.25;
            let y = 3.0 - x;
            all.add(x, y);
            if i % 2 == 0 {
                a.add(x, y);
            } else {
                b.add(x, y);
            }
        }
        let mut merged = a;
        merged.merge(&b);
        assert_eq!(merged.n, all.n);
        assert_relative_eq!(merged.ss_xy(), all.ss_xy(), max_relative = 1e-9);
    }
}
