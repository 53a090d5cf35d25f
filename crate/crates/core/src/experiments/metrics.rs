use crate::error::{Error, Result};

fn check_lengths(exact: &[f64], estimates: &[f64]) -> Result<()> {
    if exact.len() != estimates.len() {
        return Err(Error::contract(format!(
            "{} exact values but {} estimates",
            exact.len(),
            estimates.len()
        )));
    }
    if exact.is_empty() {
        return Err(Error::contract("no observations"));
    }
    Ok(())
}

/// Mean squared difference over observations.
pub fn mise(exact: &[f64], estimates: &[f64]) -> Result<f64> {
    check_lengths(exact, estimates)?;
    let total: f64 = exact
        .iter()
        .zip(estimates)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(total / exact.len() as f64)
}

/// MISE divided by the mean square of the exact values.
pub fn rmise(exact: &[f64], estimates: &[f64]) -> Result<f64> {
    let m = mise(exact, estimates)?;
    let scale = exact.iter().map(|a| a * a).sum::<f64>() / exact.len() as f64;
    if scale == 0.0 {
        return Err(Error::data(
            "relative error is undefined when every exact value is zero",
        ));
    }
    Ok(m / scale)
}

/// OLS slope of `log2 value` against `log2 K`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if let Some(&(k, v)) = points.iter().find(|(k, v)| !(*k > 0.0 && *v > 0.0)) {
        return Err(Error::data(format!(
            "log-log fit needs positive values, got ({k}, {v})"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|(k, _)| k.log2()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.log2()).collect();
    fit_slope(&xs, &ys)
}

/// OLS slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::contract("slope fit needs paired values"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if xs.len() < 2 || sxx == 0.0 {
        return Err(Error::data(
            "slope fit needs at least two distinct abscissae",
        ));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Mean and normal-approximation 95% interval `mean ± 1.96 · sd / √n`.
pub fn mean_ci95(values: &[f64]) -> (f64, (f64, f64)) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let half = if values.len() < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        1.96 * (var / n).sqrt()
    };
    (mean, (mean - half, mean + half))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(mise(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mise(&[0.0, 0.0], &[1.0, -1.0]).unwrap(), 1.0);
        assert_eq!(rmise(&[1.0, 1.0], &[2.0, 2.0]).unwrap(), 1.0);
        assert!(rmise(&[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(mise(&[0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn slopes() {
        let inv: Vec<(f64, f64)> = (9..=14)
            .map(|r| (2f64.powi(r), 3.0 / 2f64.powi(r)))
            .collect();
        assert!((fit_loglog_slope(&inv).unwrap() + 1.0).abs() < 1e-12);
        let flat: Vec<(f64, f64)> = (9..=14).map(|r| (2f64.powi(r), 0.7)).collect();
        assert_eq!(fit_loglog_slope(&flat).unwrap(), 0.0);
        assert!(fit_loglog_slope(&[(2.0, 1.0), (4.0, 0.0)]).is_err());
        assert!(fit_loglog_slope(&[(2.0, 1.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn degenerate_interval() {
        assert_eq!(mean_ci95(&[0.25]), (0.25, (0.25, 0.25)));
    }
}
