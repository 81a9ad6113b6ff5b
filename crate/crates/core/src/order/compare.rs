/// Thresholds turning finite data into asymptotic verdicts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparePolicy {
    /// Fraction of trailing points discarded before fitting.
    pub tail_fraction: f64,
    /// Central fraction of the remaining `ln alpha` range used for the fit.
    pub window: f64,
    /// `|slope|` of `ln(xi/eta)` against `ln alpha` above which a pair is
    /// ordered.
    pub slope_threshold: f64,
    /// Largest standard deviation of `ln(xi/eta)` about its mean (plateau)
    /// or about the fitted line (trend).
    pub plateau_tolerance: f64,
    pub min_points: usize,
}

impl Default for ComparePolicy {
    fn default() -> Self {
        ComparePolicy {
            tail_fraction: 0.05,
            window: 0.7,
            slope_threshold: 0.1,
            plateau_tolerance: 0.2,
            min_points: 8,
        }
    }
}

/// Asymptotic relation of `xi` to `eta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict {
    /// `xi_n / eta_n -> infinity`.
    Greater,
    /// `xi_n / eta_n -> 0`.
    Less,
    /// `xi_n / eta_n -> lambda` in `(0, infinity)`.
    Equiv(f64),
    Undecided,
}

impl Verdict {
    /// Verdict for the swapped pair.
    pub fn flip(self) -> Verdict {
        match self {
            Verdict::Greater => Verdict::Less,
            Verdict::Less => Verdict::Greater,
            Verdict::Equiv(l) => Verdict::Equiv(1.0 / l),
            Verdict::Undecided => Verdict::Undecided,
        }
    }

    pub fn is_decided(self) -> bool {
        self != Verdict::Undecided
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Greater => ">",
            Verdict::Less => "<",
            Verdict::Equiv(_) => "~",
            Verdict::Undecided => "?",
        }
    }
}

/// Positions (into `alphas`) inside the fitting window.
pub fn trend_window(alphas: &[f64], policy: &ComparePolicy) -> Vec<usize> {
    let n = alphas.len();
    let keep = n - (n as f64 * policy.tail_fraction).floor() as usize;
    if keep == 0 {
        return Vec::new();
    }
    let logs: Vec<f64> = alphas[..keep].iter().map(|a| a.ln()).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let margin = 0.5 * (1.0 - policy.window) * (hi - lo);
    (0..keep).filter(|&i| logs[i] >= lo + margin && logs[i] <= hi - margin).collect()
}

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Compares two positive sequences sampled at the same `alphas`.
pub fn compare(xi: &[f64], eta: &[f64], alphas: &[f64], policy: &ComparePolicy) -> Verdict {
    if xi.len() != eta.len() || xi.len() != alphas.len() {
        return Verdict::Undecided;
    }
    let idx = trend_window(alphas, policy);
    if idx.len() < policy.min_points.max(2) {
        return Verdict::Undecided;
    }
    let x: Vec<f64> = idx.iter().map(|&i| alphas[i].ln()).collect();
    let y: Vec<f64> = idx.iter().map(|&i| (xi[i] / eta[i]).ln()).collect();
    if y.iter().chain(&x).any(|v| !v.is_finite()) {
        return Verdict::Undecided;
    }
    let (slope, icpt) = fit_line(&x, &y);
    let rms = |r: &mut dyn Iterator<Item = f64>| (r.map(|v| v * v).sum::<f64>() / y.len() as f64).sqrt();
    if slope.abs() > policy.slope_threshold {
        // A trend only counts when the line explains the data.
        if rms(&mut x.iter().zip(&y).map(|(a, b)| b - icpt - slope * a)) > policy.plateau_tolerance {
            return Verdict::Undecided;
        }
        return if slope > 0.0 { Verdict::Greater } else { Verdict::Less };
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sd = rms(&mut y.iter().map(|v| v - mean));
    if sd <= policy.plateau_tolerance {
        Verdict::Equiv(mean.exp())
    } else {
        Verdict::Undecided
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| 1.1f64.powi(i as i32)).collect()
    }

    #[test]
    fn identical_sequences_are_equivalent_with_unit_limit() {
        let a = grid(60);
        let xi: Vec<f64> = a.iter().map(|x| x.powf(-0.7)).collect();
        assert_eq!(compare(&xi, &xi, &a, &ComparePolicy::default()), Verdict::Equiv(1.0));
    }

    #[test]
    fn power_laws_are_ordered() {
        let a = grid(60);
        let p1: Vec<f64> = a.iter().map(|x| 1.0 / x).collect();
        let p2: Vec<f64> = a.iter().map(|x| 1.0 / (x * x)).collect();
        let pol = ComparePolicy::default();
        assert_eq!(compare(&p1, &p2, &a, &pol), Verdict::Greater);
        assert_eq!(compare(&p2, &p1, &a, &pol), Verdict::Less);
    }

    #[test]
    fn oscillating_ratio_is_undecided() {
        let a = grid(60);
        let xi: Vec<f64> = (0..60).map(|i| if i % 2 == 0 { 1.0 } else { 2.0 }).collect();
        let eta = vec![1.0; 60];
        assert_eq!(compare(&xi, &eta, &a, &ComparePolicy::default()), Verdict::Undecided);
    }

    #[test]
    fn few_points_are_undecided() {
        let a = grid(6);
        assert_eq!(compare(&a, &a, &a, &ComparePolicy::default()), Verdict::Undecided);
    }

    proptest! {
        #[test]
        fn verdicts_are_antisymmetric(p in -2.0f64..2.0, q in -2.0f64..2.0, c in 0.1f64..10.0, wobble in 0.0f64..0.5) {
            let a = grid(80);
            let xi: Vec<f64> = a.iter().enumerate().map(|(i, x)| c * x.powf(p) * (1.0 + wobble * (i as f64).sin())).collect();
            let eta: Vec<f64> = a.iter().map(|x| x.powf(q)).collect();
            let pol = ComparePolicy::default();
            let f = compare(&xi, &eta, &a, &pol);
            let b = compare(&eta, &xi, &a, &pol);
            match (f, b) {
                (Verdict::Equiv(l), Verdict::Equiv(m)) => prop_assert!((l * m - 1.0).abs() < 1e-12),
                _ => prop_assert_eq!(f.flip(), b),
            }
        }

        #[test]
        fn scaling_changes_only_the_limit(p in -2.0f64..2.0, c in 1e-3f64..1e3) {
            let a = grid(80);
            let xi: Vec<f64> = a.iter().map(|x| x.powf(p)).collect();
            let eta: Vec<f64> = a.iter().map(|x| x.powf(-0.3)).collect();
            let scaled: Vec<f64> = xi.iter().map(|x| c * x).collect();
            let pol = ComparePolicy::default();
            match (compare(&xi, &eta, &a, &pol), compare(&scaled, &eta, &a, &pol)) {
                (Verdict::Equiv(l), Verdict::Equiv(m)) => prop_assert!((c * l - m).abs() <= 1e-9 * m),
                (u, v) => prop_assert_eq!(u, v),
            }
        }
    }
}
