//! Small statistical helpers shared by the analytics, theory checks and test
//! suites: Kolmogorov-Smirnov statistics, moments, correlation measures and a
//! least-squares slope.

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (denominator `n - 1`).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Population standard deviation (denominator `n`).
pub fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against the reference
/// CDF `cdf`. Sorts a copy of the samples.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
    ks_statistic_sorted(&xs, cdf)
}

/// One-sample KS statistic for already sorted samples.
pub fn ks_statistic_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// KS statistic of `samples` against a reference CDF given by its values on
/// a sorted grid, evaluated by linear interpolation. The grid must cover the
/// sample range.
pub fn ks_statistic_interpolated(samples: &[f64], grid_x: &[f64], grid_f: &[f64]) -> f64 {
    assert_eq!(grid_x.len(), grid_f.len());
    let interp = |x: f64| -> f64 {
        match grid_x.binary_search_by(|g| g.total_cmp(&x)) {
            Ok(i) => grid_f[i],
            Err(0) => grid_f[0],
            Err(i) if i == grid_x.len() => *grid_f.last().unwrap(),
            Err(i) => {
                let t = (x - grid_x[i - 1]) / (grid_x[i] - grid_x[i - 1]);
                grid_f[i - 1] + t * (grid_f[i] - grid_f[i - 1])
            }
        }
    };
    ks_statistic(samples, interp)
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Circular correlation coefficient (Jammalamadaka-SenGupta) between two
/// angle samples.
pub fn circular_correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mean_dir = |xs: &[f64]| {
        let s: f64 = xs.iter().map(|x| x.sin()).sum();
        let c: f64 = xs.iter().map(|x| x.cos()).sum();
        s.atan2(c)
    };
    let ma = mean_dir(a);
    let mb = mean_dir(b);
    let mut num = 0.0;
    let mut da = 0.0;
    let mut db = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let sa = (x - ma).sin();
        let sb = (y - mb).sin();
        num += sa * sb;
        da += sa * sa;
        db += sb * sb;
    }
    num / (da * db).sqrt()
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Pearson chi-squared statistic of observed counts against equal expected
/// counts in each cell.
pub fn chi_squared_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}
