//! Grids, extremum detection and bracketed minimization.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Sampling of a swept variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl Grid {
    pub fn linear(start: f64, stop: f64, count: usize) -> Result<Grid> {
        Grid { start, stop, count, log: false }.checked()
    }

    pub fn log(start: f64, stop: f64, count: usize) -> Result<Grid> {
        Grid { start, stop, count, log: true }.checked()
    }

    fn checked(self) -> Result<Grid> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if self.count < 2 {
            return Err(Error::Config(format!("grid count must be >= 2 (got {})", self.count)));
        }
        if self.start >= self.stop {
            return Err(Error::Config(format!(
                "grid start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        if self.log && self.start <= 0.0 {
            return Err(Error::Config("log grid needs start > 0".into()));
        }
        Ok(self)
    }

    pub fn points(&self) -> Vec<f64> {
        if self.log {
            logspace(self.start, self.stop, self.count)
        } else {
            linspace(self.start, self.stop, self.count)
        }
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `start,stop,count[,log|lin]`
    fn from_str(s: &str) -> Result<Grid> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Config(format!("bad grid `{s}`: expected start,stop,count[,log]"));
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        let log = match parts.get(3) {
            None | Some(&"lin") | Some(&"linear") => false,
            Some(&"log") => true,
            Some(_) => return Err(bad()),
        };
        Grid { start, stop, count, log }.checked()
    }
}

/// `n` evenly spaced points with exact endpoints.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let step = (stop - start) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { stop } else { start + step * i as f64 })
        .collect()
}

pub fn logspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    let (a, b) = (start.ln(), stop.ln());
    linspace(a, b, n)
        .into_iter()
        .enumerate()
        .map(|(i, x)| match i {
            0 => start,
            _ if i == n - 1 => stop,
            _ => x.exp(),
        })
        .collect()
}

/// Index of the smallest finite value.
pub fn argmin(v: &[f64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| x.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

/// Interior strict-left local minima (`v[i-1] > v[i] <= v[i+1]`).
pub fn local_minima(v: &[f64]) -> Vec<usize> {
    interior(v, |l, m, r| l > m && m <= r)
}

pub fn local_maxima(v: &[f64]) -> Vec<usize> {
    interior(v, |l, m, r| l < m && m >= r)
}

fn interior(v: &[f64], pred: impl Fn(f64, f64, f64) -> bool) -> Vec<usize> {
    (1..v.len().saturating_sub(1))
        .filter(|&i| {
            let (l, m, r) = (v[i - 1], v[i], v[i + 1]);
            l.is_finite() && m.is_finite() && r.is_finite() && pred(l, m, r)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimumReport {
    /// Location in units of `omega_m1`.
    pub omega_star: f64,
    pub s_star: f64,
    pub refinement_iterations: usize,
    pub bracket_width: f64,
}

/// Golden-section refinement stops once the bracket is narrower than this.
pub const REFINE_WIDTH: f64 = 1e-12;
/// Required final bracket width for success.
pub const SUCCESS_WIDTH: f64 = 1e-6;
const MAX_REFINE: usize = 200;

/// Minimize `f` on `[lo, hi]`: coarse scan with `coarse` points, then
/// golden-section refinement of the cell pair around the best sample.
///
/// Failed evaluations count as `+inf`. Fails when the best coarse sample
/// sits on the bracket edge.
pub fn minimize<F>(f: F, lo: f64, hi: f64, coarse: usize) -> Result<MinimumReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    use rayon::prelude::*;
    let no_min = Error::NoMinimumInBracket { lo, hi };
    if !(lo < hi) || coarse < 3 {
        return Err(no_min);
    }
    let eval = |x: f64| f(x).ok().filter(|v| v.is_finite()).unwrap_or(f64::INFINITY);
    let xs = linspace(lo, hi, coarse);
    let vs: Vec<f64> = xs.par_iter().map(|&x| eval(x)).collect();
    let i = argmin(&vs).ok_or_else(|| no_min.clone())?;
    if i == 0 || i == coarse - 1 || !vs[i].is_finite() {
        return Err(no_min);
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (xs[i - 1], xs[i + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    let mut iterations = 0;
    while b - a > REFINE_WIDTH && iterations < MAX_REFINE {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
        iterations += 1;
    }
    let (mut x, mut fx) = if fc <= fd { (c, fc) } else { (d, fd) };
    if vs[i] < fx {
        x = xs[i];
        fx = vs[i];
    }
    let width = b - a;
    if width >= SUCCESS_WIDTH || fx > eval(lo) || fx > eval(hi) {
        return Err(no_min);
    }
    Ok(MinimumReport {
        omega_star: x,
        s_star: fx,
        refinement_iterations: iterations,
        bracket_width: width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_grid() {
        let g: Grid = "0.8,1.3,2001".parse().unwrap();
        assert_eq!(g, Grid { start: 0.8, stop: 1.3, count: 2001, log: false });
        let g: Grid = "1e-4, 1, 41, log".parse().unwrap();
        assert!(g.log);
        for bad in ["1,0,5", "0,1,1", "0,1,5,log", "a,b,c", "0,1", "0,1,5,cubic", "nan,1,5"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn spaced_endpoints_exact() {
        let v = linspace(0.8, 1.3, 2001);
        assert_eq!(v[0], 0.8);
        assert_eq!(v[2000], 1.3);
        let l = logspace(1e-4, 1.0, 9);
        assert_eq!(l[0], 1e-4);
        assert_eq!(l[8], 1.0);
        assert!((l[4] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn extrema() {
        let v = [3.0, 1.0, 2.0, 0.5, 0.5, 4.0, f64::NAN, 1.0];
        assert_eq!(local_minima(&v), vec![1, 3]);
        assert_eq!(local_maxima(&v), vec![2]);
        assert_eq!(argmin(&v), Some(3));
    }

    #[test]
    fn golden_section_parabola() {
        let r = minimize(|x| Ok((x - 0.3).powi(2) + 1.0), 0.0, 1.0, 101).unwrap();
        assert!((r.omega_star - 0.3).abs() < 1e-7);
        assert!(r.bracket_width < SUCCESS_WIDTH);
        assert!(r.refinement_iterations > 0);
    }

    #[test]
    fn edge_minimum_rejected() {
        assert!(matches!(
            minimize(Ok, 0.0, 1.0, 101),
            Err(Error::NoMinimumInBracket { .. })
        ));
    }

    proptest! {
        #[test]
        fn grid_points_monotone(start in 1e-3f64..10.0, span in 1e-3f64..10.0, n in 2usize..500, log: bool) {
            let g = Grid { start, stop: start + span, count: n, log }.checked().unwrap();
            let p = g.points();
            prop_assert_eq!(p.len(), n);
            prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn grid_parse_never_panics(s in ".{0,40}") {
            let _ = s.parse::<Grid>();
        }
    }
}
