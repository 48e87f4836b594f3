//! Van der Corput sequences and empirical averages along point sequences.

use std::io::Write;

use crate::costfn::CostFunction;
use crate::error::{Error, Result};
use crate::format::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VdcParams {
    pub base: u64,
    /// First index; sequences start at 1 unless 0 is requested.
    pub start: u64,
    pub count: usize,
}

impl VdcParams {
    pub fn new(base: u64, count: usize) -> Self {
        VdcParams { base, start: 1, count }
    }

    pub fn starting_at(mut self, start: u64) -> Self {
        self.start = start;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_base(self.base)?;
        if self.count < 1 {
            return Err(Error::InvalidSequence("count must be >= 1".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        (self.start..self.start + self.count as u64).map(|n| vdc(n, self.base)).collect()
    }
}

fn check_base(b: u64) -> Result<()> {
    if b < 2 {
        return Err(Error::InvalidSequence(format!("base must be >= 2, got {}", b)));
    }
    Ok(())
}

/// Radical inverse `φ_b(n)`: the base-`b` digits of `n` mirrored about the
/// radix point. Numerator and denominator are exact integers; the only
/// rounding is the final division.
pub fn vdc(n: u64, b: u64) -> Result<f64> {
    check_base(b)?;
    let (b, mut n) = (b as u128, n as u128);
    let mut num: u128 = 0;
    let mut den: u128 = 1;
    while n > 0 {
        num = num * b + n % b;
        den *= b;
        n /= b;
    }
    Ok(num as f64 / den as f64)
}

/// `(1/N) Σ_{n=0}^{N−1} |φ_b(n+1) − φ_b(n)|`.
pub fn avg_consecutive_distance(b: u64, count: usize) -> Result<f64> {
    check_base(b)?;
    if count < 2 {
        return Err(Error::InvalidSequence("need N >= 2".into()));
    }
    let mut prev = 0.0;
    let mut total = 0.0;
    for n in 1..=count as u64 {
        let cur = vdc(n, b)?;
        total += (cur - prev).abs();
        prev = cur;
    }
    Ok(total / count as f64)
}

/// The limit `2(b−1)/b²` of [`avg_consecutive_distance`].
pub fn consecutive_distance_limit(b: u64) -> f64 {
    let b = b as f64;
    2.0 * (b - 1.0) / (b * b)
}

/// `(1/N) Σ c(x_n, y_n)`.
pub fn empirical_limit_average(xs: &[f64], ys: &[f64], c: &CostFunction) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.is_empty() {
        return Err(Error::InvalidSequence("empty sequences".into()));
    }
    let total: f64 = xs.iter().zip(ys).map(|(&x, &y)| c.eval(x, y)).sum();
    Ok(total / xs.len() as f64)
}

/// `(φ_b(n), φ_b(n+1))` for `n = start, …, start + N − 1`.
pub fn consecutive_pairs(params: &VdcParams) -> Result<Vec<(f64, f64)>> {
    let xs = VdcParams {
        count: params.count + 1,
        ..*params
    }
    .values()?;
    Ok(xs.windows(2).map(|w| (w[0], w[1])).collect())
}

/// Fraction of `xs` in each interval `[k/bins, (k+1)/bins)`.
pub fn interval_frequencies(xs: &[f64], bins: usize) -> Vec<f64> {
    let mut counts = vec![0usize; bins];
    for &x in xs {
        let k = ((x * bins as f64) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts.into_iter().map(|c| c as f64 / xs.len() as f64).collect()
}

pub fn write_values_csv<W: Write>(mut w: W, start: u64, values: &[f64]) -> Result<()> {
    writeln!(w, "n,value")?;
    for (k, v) in values.iter().enumerate() {
        writeln!(w, "{},{}", start + k as u64, fmt_f64(*v))?;
    }
    Ok(())
}

pub fn write_pairs_csv<W: Write>(mut w: W, pairs: &[(f64, f64)]) -> Result<()> {
    writeln!(w, "x,y")?;
    for (x, y) in pairs {
        writeln!(w, "{},{}", fmt_f64(*x), fmt_f64(*y))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costfn::registry_cost;

    /// Independent digit reversal through the string form of `n`.
    fn vdc_by_string(n: u64, b: u32) -> f64 {
        let mut digits = Vec::new();
        let mut m = n;
        while m > 0 {
            digits.push(std::char::from_digit((m % b as u64) as u32, b).unwrap());
            m /= b as u64;
        }
        // digits are least significant first, which is the mirrored order.
        digits
            .iter()
            .enumerate()
            .map(|(k, d)| d.to_digit(b).unwrap() as f64 / (b as f64).powi(k as i32 + 1))
            .sum()
    }

    #[test]
    fn radical_inverse_examples() {
        assert_eq!(vdc(1, 2).unwrap(), 0.5);
        assert_eq!(vdc(2, 2).unwrap(), 0.25);
        assert_eq!(vdc(3, 2).unwrap(), 0.75);
        assert_eq!(vdc(0, 2).unwrap(), 0.0);
        assert!((vdc(5, 3).unwrap() - 7.0 / 9.0).abs() < 1e-15);
        assert!(vdc(3, 1).is_err());
        for b in [2u32, 3, 5, 7, 10, 16] {
            for n in [1u64, 2, 17, 255, 1000, 123_456_789] {
                assert!((vdc(n, b as u64).unwrap() - vdc_by_string(n, b)).abs() < 1e-15);
            }
        }
        assert!(vdc(u64::MAX, 2).unwrap() < 1.0 + 1e-15);
    }

    #[test]
    fn distance_examples() {
        assert_eq!(avg_consecutive_distance(2, 2).unwrap(), 0.375);
        assert!(avg_consecutive_distance(2, 1).is_err());
        assert_eq!(consecutive_distance_limit(2), 0.5);
        assert!((consecutive_distance_limit(3) - 4.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn pairs_examples() {
        let p = consecutive_pairs(&VdcParams::new(2, 3)).unwrap();
        assert_eq!(p, vec![(0.5, 0.25), (0.25, 0.75), (0.75, 0.125)]);
        let p0 = consecutive_pairs(&VdcParams::new(2, 1).starting_at(0)).unwrap();
        assert_eq!(p0, vec![(0.0, 0.5)]);
    }

    #[test]
    fn averages() {
        let c = registry_cost("product").unwrap();
        assert_eq!(empirical_limit_average(&[0.5], &[0.5], &c).unwrap(), 0.25);
        assert!(matches!(empirical_limit_average(&[0.5], &[], &c), Err(Error::LengthMismatch(1, 0))));
    }
}
