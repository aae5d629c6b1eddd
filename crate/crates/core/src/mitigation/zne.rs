//! Zero-noise extrapolation fits.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitKind {
    Linear,
    Quadratic,
    /// `a·e^{bx} + c`
    Exponential,
}

impl FitKind {
    pub const ALL: [FitKind; 3] = [FitKind::Linear, FitKind::Quadratic, FitKind::Exponential];

    pub fn name(self) -> &'static str {
        match self {
            FitKind::Linear => "linear",
            FitKind::Quadratic => "quadratic",
            FitKind::Exponential => "exponential",
        }
    }

    pub fn min_points(self) -> usize {
        match self {
            FitKind::Linear => 2,
            FitKind::Quadratic | FitKind::Exponential => 3,
        }
    }
}

impl fmt::Display for FitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(FitKind::Linear),
            "quadratic" => Ok(FitKind::Quadratic),
            "exponential" | "exp" => Ok(FitKind::Exponential),
            other => Err(Error::Argument(format!("unknown fit kind '{other}'"))),
        }
    }
}

/// Measured values at increasing noise scales.
#[derive(Debug, Clone, PartialEq)]
pub struct ZneSeries {
    scales: Vec<f64>,
    values: Vec<f64>,
    variances: Vec<f64>,
}

impl ZneSeries {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        let with_var: Vec<(f64, f64, f64)> = points.iter().map(|&(s, v)| (s, v, 0.0)).collect();
        ZneSeries::with_variances(&with_var)
    }

    pub fn with_variances(points: &[(f64, f64, f64)]) -> Result<Self> {
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Argument("ZNE scales must be strictly increasing".into()));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::Argument("ZNE points must be finite".into()));
        }
        Ok(ZneSeries {
            scales: points.iter().map(|p| p.0).collect(),
            values: points.iter().map(|p| p.1).collect(),
            variances: points.iter().map(|p| p.2).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }
}

fn polynomial_intercept(x: &[f64], y: &[f64], degree: usize, kind: &'static str) -> Result<f64> {
    let v = DMatrix::from_fn(x.len(), degree + 1, |i, j| x[i].powi(j as i32));
    let rhs = DVector::from_column_slice(y);
    let coeffs = v
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::FitFailure { kind, reason: e.to_string() })?;
    Ok(coeffs[0])
}

/// Closed form through three equally spaced points.
fn exponential_three_point(x: &[f64], y: &[f64]) -> Result<f64> {
    let fail = |reason: &str| Error::FitFailure {
        kind: "exponential",
        reason: reason.to_string(),
    };
    let h = x[1] - x[0];
    let (d1, d2) = (y[1] - y[0], y[2] - y[1]);
    if d1 == 0.0 {
        return Err(fail("first two values coincide"));
    }
    let r = d2 / d1;
    if r <= 0.0 {
        return Err(fail("values are not monotone"));
    }
    if r >= 1.0 - 1e-9 {
        return Err(fail("differences do not shrink with scale (b >= 0)"));
    }
    let b = r.ln() / h;
    let a = d1 / ((b * x[1]).exp() - (b * x[0]).exp());
    let c = y[0] - a * (b * x[0]).exp();
    Ok(a + c)
}

/// For fixed `b`, `a` and `c` are linear; returns the residual and the
/// intercept `a + c`.
fn exponential_projection(x: &[f64], y: &[f64], b: f64) -> Option<(f64, f64)> {
    let m = DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { (b * x[i]).exp() } else { 1.0 });
    let rhs = DVector::from_column_slice(y);
    let sol = m.clone().svd(true, true).solve(&rhs, 1e-14).ok()?;
    let resid = (m * &sol - rhs).norm_squared();
    Some((resid, sol[0] + sol[1]))
}

/// Variable projection over `b < 0`, golden-section refined.
fn exponential_least_squares(x: &[f64], y: &[f64]) -> Result<f64> {
    let span = x[x.len() - 1] - x[0];
    let cost = |b: f64| exponential_projection(x, y, b).map_or(f64::INFINITY, |r| r.0);
    let grid: Vec<f64> = (1..=400).map(|i| -(i as f64) * 20.0 / (400.0 * span)).collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &b)| (i, cost(b)))
        .min_by(|l, r| l.1.total_cmp(&r.1))
        .expect("nonempty grid");
    if best == 0 || best == grid.len() - 1 {
        return Err(Error::FitFailure {
            kind: "exponential",
            reason: "no interior minimum for the decay rate".into(),
        });
    }
    let (mut lo, mut hi) = (grid[best + 1], grid[best - 1]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if cost(m1) < cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    exponential_projection(x, y, 0.5 * (lo + hi))
        .map(|r| r.1)
        .ok_or(Error::FitFailure {
            kind: "exponential",
            reason: "projection solve failed".into(),
        })
}

/// Extrapolated value at scale 0.
pub fn zne_fit(series: &ZneSeries, kind: FitKind) -> Result<f64> {
    if series.len() < kind.min_points() {
        return Err(Error::Argument(format!(
            "{kind} extrapolation needs at least {} points, got {}",
            kind.min_points(),
            series.len()
        )));
    }
    let (x, y) = (&series.scales[..], &series.values[..]);
    match kind {
        FitKind::Linear if x.len() == 2 => Ok(y[0] - x[0] * (y[1] - y[0]) / (x[1] - x[0])),
        FitKind::Linear => polynomial_intercept(x, y, 1, "linear"),
        FitKind::Quadratic => polynomial_intercept(x, y, 2, "quadratic"),
        FitKind::Exponential => {
            let equal = x.len() == 3 && ((x[1] - x[0]) - (x[2] - x[1])).abs() < 1e-12;
            if equal {
                exponential_three_point(x, y)
            } else {
                exponential_least_squares(x, y)
            }
        }
    }
}

/// Try exponential, then quadratic, then linear; report which one held.
pub fn zne_fit_with_fallback(series: &ZneSeries) -> Result<(FitKind, f64)> {
    let mut last = None;
    for kind in [FitKind::Exponential, FitKind::Quadratic, FitKind::Linear] {
        match zne_fit(series, kind) {
            Ok(v) => return Ok((kind, v)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// CSV with one row per measured scale followed by one row per fit.
pub fn write_zne_table(series: &ZneSeries, fits: &[(FitKind, Result<f64>)]) -> String {
    let mut out = String::from("row,scale,value,variance,note\n");
    for i in 0..series.len() {
        let _ = writeln!(
            out,
            "point,{},{},{},",
            series.scales[i], series.values[i], series.variances[i]
        );
    }
    for (kind, r) in fits {
        match r {
            Ok(v) => {
                let _ = writeln!(out, "{kind},0,{v},,");
            }
            Err(e) => {
                let _ = writeln!(out, "{kind},0,NaN,,{}", e.to_string().replace(',', ";"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn series(f: impl Fn(f64) -> f64, xs: &[f64]) -> ZneSeries {
        ZneSeries::new(&xs.iter().map(|&x| (x, f(x))).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn exact_line() {
        let s = series(|x| -15.5 + 0.02 * x, &[1.0, 3.0, 5.0]);
        assert_abs_diff_eq!(zne_fit(&s, FitKind::Linear).unwrap(), -15.5, epsilon = 1e-10);
    }

    #[test]
    fn exact_exponential() {
        let f = |x: f64| 0.3 * (-0.4 * x).exp() - 15.56;
        let s = series(f, &[1.0, 3.0, 5.0]);
        assert_abs_diff_eq!(zne_fit(&s, FitKind::Exponential).unwrap(), -15.26, epsilon = 1e-8);
        let s = series(f, &[1.0, 2.0, 3.5, 5.0]);
        assert_abs_diff_eq!(zne_fit(&s, FitKind::Exponential).unwrap(), -15.26, epsilon = 1e-8);
    }

    #[test]
    fn exact_quadratic() {
        let s = series(|x| 1.0 - 0.5 * x + 0.1 * x * x, &[1.0, 3.0, 5.0, 7.0]);
        assert_abs_diff_eq!(zne_fit(&s, FitKind::Quadratic).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn two_point_linear_is_the_secant() {
        let s = ZneSeries::new(&[(1.0, -1.3), (3.0, -1.1)]).unwrap();
        let secant = -1.3 - (-1.1 - -1.3) / 2.0;
        assert_eq!(zne_fit(&s, FitKind::Linear).unwrap(), secant);
    }

    #[test]
    fn growing_exponential_fails_and_falls_back() {
        let s = series(|x| 0.01 * (0.5 * x).exp(), &[1.0, 3.0, 5.0]);
        assert!(matches!(zne_fit(&s, FitKind::Exponential), Err(Error::FitFailure { .. })));
        let (kind, _) = zne_fit_with_fallback(&s).unwrap();
        assert_eq!(kind, FitKind::Quadratic);
    }

    #[test]
    fn too_few_points() {
        let s = ZneSeries::new(&[(1.0, 0.0)]).unwrap();
        for kind in FitKind::ALL {
            assert!(matches!(zne_fit(&s, kind), Err(Error::Argument(_))));
        }
        assert!(ZneSeries::new(&[(3.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn table_has_points_and_fits() {
        let s = series(|x| -15.5 + 0.02 * x, &[1.0, 3.0, 5.0]);
        let fits: Vec<_> = FitKind::ALL.iter().map(|&k| (k, zne_fit(&s, k))).collect();
        let t = write_zne_table(&s, &fits);
        assert_eq!(t.lines().count(), 1 + 3 + 3);
        assert!(t.contains("exponential,0,NaN"));
    }
}
